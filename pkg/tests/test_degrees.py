import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from latentorder.degrees import (DegreeHistogram, components, degree_histogram, longest_run,
                                 pool, poisson_poisson_tv, poisson_tv, powerlaw_fit, tail_sets)
from latentorder.errors import InsufficientSupportError
from latentorder.generators import MecltgParams, derive_seed, generate
from latentorder.graph import graph_from_edges, make_ordering


def k4():
    return graph_from_edges(4, [(i, j) for i in range(1, 5) for j in range(i + 1, 5)]).adjacency


def test_histogram_examples():
    assert degree_histogram(k4()).as_dict() == {3: 4}
    assert degree_histogram(np.zeros((4, 4))).as_dict() == {0: 4}
    path = graph_from_edges(3, [(1, 2), (2, 3)]).adjacency
    assert degree_histogram(path).as_dict() == {1: 2, 2: 1}


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 40), seed=st.integers(0, 10 ** 6))
def test_histogram_mass_conservation(n, seed):
    rng = np.random.default_rng(seed)
    A = np.triu(rng.integers(0, 2, (n, n)), 1)
    h = degree_histogram(A + A.T)
    assert h.counts.sum() == n
    assert (h + h).counts.sum() == 2 * n and (h + h).n == 2 * n


def test_powerlaw_exact_data():
    ks = np.arange(1, 11)
    h = DegreeHistogram(np.concatenate(([0.0], 1e6 * ks ** -2.0)), 100)
    fit = powerlaw_fit(h)
    assert fit.gamma1 == pytest.approx(-2.0, abs=1e-9)
    assert fit.k_lo == 1 and fit.k_hi == 10
    rounded = DegreeHistogram(np.round(h.counts).astype(np.int64), 100)
    assert powerlaw_fit(rounded).gamma1 == pytest.approx(-2.0, abs=1e-5)


def test_powerlaw_needs_support():
    with pytest.raises(InsufficientSupportError):
        powerlaw_fit(degree_histogram(k4()))


def test_poisson_tv_examples():
    n = 1000
    lam = 3.0
    ks = np.arange(60)
    h = DegreeHistogram(poisson.pmf(ks, lam) * n, n)
    assert poisson_tv(h, lam) == pytest.approx(0.0, abs=1e-12)
    h0 = DegreeHistogram(np.array([n]), n)
    assert poisson_tv(h0, 1.0) == pytest.approx(1 - math.exp(-1))
    assert poisson_tv(h0, 0.0) == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), lam=st.floats(0.1, 20), lam2=st.floats(0.1, 20))
def test_poisson_tv_bounds_and_triangle(seed, lam, lam2):
    rng = np.random.default_rng(seed)
    h = DegreeHistogram(rng.integers(0, 10, 30), 0)
    h = DegreeHistogram(h.counts, int(h.counts.sum()) or 1)
    tv = poisson_tv(h, lam)
    assert 0 <= tv <= 1 + 1e-12
    assert tv <= poisson_tv(h, lam2) + poisson_poisson_tv(lam, lam2) + 1e-9


def test_tail_sets_examples():
    n = 50
    ks = np.arange(1, n + 1)
    ref = ks ** -2.5 / np.sum(ks ** -2.5)
    h = DegreeHistogram(np.concatenate(([0.0], ref * n)), n)
    A, B = tail_sets(h, 2.5, 0.1)
    assert A == list(range(1, n + 1))
    assert tail_sets(DegreeHistogram(np.array([1]), 1), 2.0, 0.1) == ([], [])
    with pytest.raises(ValueError):
        tail_sets(h, 1.0, 0.1)


def test_tail_run_exists_for_omega1():
    n = 1000
    o = make_ordering("omega1", n)
    spec = MecltgParams.from_lambdas(n, 1, 1, 0.3)
    h = pool(degree_histogram(generate(spec, n, o, derive_seed(21, r)).adjacency) for r in range(60))
    A, _ = tail_sets(h, 2.4, 0.01, nodes=n)
    assert longest_run(A) >= 5


def test_longest_run():
    assert longest_run([]) == 0
    assert longest_run([5, 1, 2, 3, 7, 8]) == 3


def test_components_examples():
    assert components(k4()) == ([4], True)
    assert components(np.zeros((4, 4))) == ([1, 1, 1, 1], False)
    assert components(graph_from_edges(4, [(1, 2), (3, 4)]).adjacency) == ([2, 2], False)


def bfs_component_sizes(A):
    n = len(A)
    seen = [False] * n
    sizes = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue, size = [start], 0
        while queue:
            v = queue.pop()
            size += 1
            for w in np.flatnonzero(A[v]):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        sizes.append(size)
    return sorted(sizes, reverse=True)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10 ** 6))
def test_components_match_bfs(n, seed):
    rng = np.random.default_rng(seed)
    A = np.triu((rng.random((n, n)) < 0.1).astype(int), 1)
    A = A + A.T
    sizes, connected = components(A)
    assert sizes == bfs_component_sizes(A)
    assert connected == (len(sizes) == 1)
