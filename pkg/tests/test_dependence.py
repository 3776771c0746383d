import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latentorder.dependence import (chi_of_kernels, chi_of_two_state, delta_closed_form,
                                    delta_empirical, empirical_conditional, g_function,
                                    k_step_conditionals, sample_chains, transition_matrix)
from latentorder.errors import DegenerateChainError
from latentorder.generators import MecltgParams, stationary
from latentorder.graph import make_ordering

probs = st.floats(0.01, 0.99)


def test_chi_examples():
    assert chi_of_two_state(0.5, 0.5).chi == 0.0
    prof = chi_of_two_state(0.2, 0.6)
    assert prof.alpha_prime == pytest.approx(0.2)
    assert prof.chi == pytest.approx(0.6)
    assert prof.decay_rate == pytest.approx(0.4)
    assert chi_of_two_state(0.01, 0.99).chi == pytest.approx(0.98)
    with pytest.raises(DegenerateChainError):
        chi_of_two_state(0.0, 0.5)


def test_chi_of_kernels_matches_two_state():
    assert chi_of_kernels(0.2, 0.6) == pytest.approx(0.6)
    q0 = np.array([0.5, 0.3, 0.1])
    q1 = np.array([0.01, 0.5, 0.7])  # first entry is ignored
    assert chi_of_kernels(q0, q1) == pytest.approx(0.8)


@settings(max_examples=200, deadline=None)
@given(p0=probs, p1=probs)
def test_chi_bounds_decay_rate(p0, p1):
    prof = chi_of_two_state(p0, p1)
    assert 0 < prof.alpha_prime <= 0.5
    assert abs(p1 - p0) <= prof.chi + 1e-12


def test_k_step_examples():
    c = k_step_conditionals(0.2, 0.6, 2)
    assert c["1|1"] == pytest.approx(0.44)
    assert c["1|0"] == pytest.approx(0.28)
    for k in (1, 5, 9):
        c = k_step_conditionals(0.3, 0.3, k)
        assert c["1|0"] == pytest.approx(0.3) and c["1|1"] == pytest.approx(0.3)


@settings(max_examples=50, deadline=None)
@given(p0=probs, p1=probs)
def test_k_step_matches_matrix_power(p0, p1):
    P = transition_matrix(p0, p1)
    Pk = np.eye(2)
    for k in range(1, 31):
        Pk = Pk @ P
        c = k_step_conditionals(p0, p1, k)
        assert abs(c["1|0"] - Pk[0, 1]) <= 1e-12
        assert abs(c["1|1"] - Pk[1, 1]) <= 1e-12
        assert abs(c["0|1"] - Pk[1, 0]) <= 1e-12
        assert abs(c["0|0"] - Pk[0, 0]) <= 1e-12
        assert c["1|0"] + c["0|0"] == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(p0=probs, p1=probs)
def test_k_step_converges_monotonically(p0, p1):
    p = stationary(p0, p1)
    gaps = [abs(k_step_conditionals(p0, p1, k)["1|1"] - p) for k in range(1, 20)]
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))


def test_delta_closed_form_examples():
    assert delta_closed_form(0.2, 0.6, 1) == pytest.approx(0.4 * 2 / 3)
    assert delta_closed_form(0.4, 0.4, 3) == 0.0
    # brute force over the four cells
    p = 1 / 3
    c = k_step_conditionals(0.2, 0.6, 1)
    cells = [abs(c["1|0"] - p), abs(c["1|1"] - p), abs(c["0|1"] - (1 - p)), abs(c["0|0"] - (1 - p))]
    assert delta_closed_form(0.2, 0.6, 1) == pytest.approx(max(cells))


@settings(max_examples=50, deadline=None)
@given(p0=probs, p1=probs, k=st.integers(1, 20))
def test_delta_geometric_ratio(p0, p1, k):
    a, b = delta_closed_form(p0, p1, k), delta_closed_form(p0, p1, k + 1)
    assert b <= a + 1e-15 and b >= 0
    if a > 1e-250:
        assert b / a == pytest.approx(abs(p1 - p0), rel=1e-9, abs=1e-300)


def test_g_function_examples():
    assert g_function(0.25, 2, 1) == pytest.approx(1.0)
    assert g_function(0.7, 0, 0) == 1.0
    assert g_function(0.0, 5, 0) == 1.0
    assert g_function(0.0, 5, 2) == 0.0
    with pytest.raises(ValueError):
        g_function(1.0, 3, 1)


def test_delta_empirical_iid_near_zero():
    spec = MecltgParams(0.3, 0.3)
    o = make_ordering("omega1", 20)
    est = delta_empirical(spec, o, 2, [50, 100], 2000, 1)
    # max over eight cells of |deviation|; allow a few SEs
    assert est.value <= 4 * est.se


def test_delta_empirical_matches_closed_form():
    spec = MecltgParams(0.2, 0.6)
    o = make_ordering("omega2", 12)
    est = delta_empirical(spec, o, 1, [40], 5000, 2)
    assert abs(est.value - delta_closed_form(0.2, 0.6, 1)) <= 3 * est.se


def test_delta_empirical_preconditions():
    o = make_ordering("omega1", 6)
    spec = MecltgParams(0.2, 0.6)
    with pytest.raises(ValueError):
        delta_empirical(spec, o, 3, [2], 200, 0)
    with pytest.raises(ValueError):
        delta_empirical(spec, o, 1, [5], 50, 0)
    with pytest.raises(ValueError):
        delta_empirical(spec, o, 1, [16], 200, 0)


def test_empirical_conditional_counts():
    chains = np.array([[0, 1], [0, 0], [1, 1], [0, 1]], dtype=np.uint8)
    est, se, m = empirical_conditional(chains, 2, 1, 0, 1)
    assert (est, m) == (pytest.approx(2 / 3), 3)
    assert np.isnan(empirical_conditional(chains[:2, ::-1] * 0, 2, 1, 1)[0])


def test_sample_chains_shape_and_determinism():
    o = make_ordering("pa", 10)
    a = sample_chains(MecltgParams(0.2, 0.6), o, 5, 3, length=20)
    assert a.shape == (5, 20)
    assert np.array_equal(a, sample_chains(MecltgParams(0.2, 0.6), o, 5, 3, length=20))
