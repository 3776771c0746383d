"""Dependence strength of two-state edge chains: closed forms and Monte Carlo."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateChainError
from .generators import derive_seed, sample_bits, stationary
from .graph import Ordering


@dataclass(frozen=True)
class DependenceProfile:
    chi: float
    alpha_prime: float
    memory: int
    decay_rate: float  # |p1 - p0|, the exact geometric rate
    delta: Callable[[int], float]


def chi_of_two_state(p0: float, p1: float) -> DependenceProfile:
    """Dependence parameter ``chi = 1 - 2 * alpha'`` of a first-order chain,
    where ``alpha'`` is the smallest transition probability."""
    if not (0.0 < p0 < 1.0 and 0.0 < p1 < 1.0):
        raise DegenerateChainError(
            "transition probabilities must be strictly inside (0, 1); the chi bound "
            f"is undefined for p0={p0}, p1={p1}")
    alpha = min(p0, 1 - p0, p1, 1 - p1)
    return DependenceProfile(
        chi=1.0 - 2.0 * alpha,
        alpha_prime=alpha,
        memory=1,
        decay_rate=abs(p1 - p0),
        delta=lambda k: delta_closed_form(p0, p1, k),
    )


def chi_of_kernels(q0, q1) -> float:
    """``1 - 2 * alpha'`` for a chain with per-step kernels ``q0``, ``q1``
    (arrays or scalars), ``alpha'`` being the smallest transition probability
    after the first position."""
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    if q0.size > 1:
        q0, q1 = q0[1:], q1[1:]
    alpha = min(q0.min(), 1 - q0.max(), q1.min(), 1 - q1.max())
    return float(1 - 2 * alpha)


def k_step_conditionals(p0: float, p1: float, k: int) -> dict[str, float]:
    """``P(B_j = a | B_{j-k} = b)`` keyed ``"a|b"``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = stationary(p0, p1)
    r = (p1 - p0) ** k
    return {
        "1|0": p - p * r,
        "1|1": p + (1 - p) * r,
        "0|1": (1 - p) - (1 - p) * r,
        "0|0": (1 - p) + p * r,
    }


def transition_matrix(p0: float, p1: float) -> np.ndarray:
    """Row-stochastic matrix with rows indexed by the previous bit."""
    return np.array([[1 - p0, p0], [1 - p1, p1]])


def delta_closed_form(p0: float, p1: float, k: int) -> float:
    """Largest deviation of ``P(B_i = s | B_{i-k} = b)`` from ``P(B_i = s)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = stationary(p0, p1)
    return max(p, 1 - p) * abs(p1 - p0) ** k


def g_function(chi: float, N: int, u: int) -> float:
    """``sum_{r=0}^{N} r**u * chi**(r/2)`` with ``0**0 = 1``."""
    if not 0.0 <= chi < 1.0:
        raise ValueError("chi must lie in [0, 1)")
    if N < 0 or u < 0 or int(u) != u:
        raise ValueError("N must be >= 0 and u a non-negative integer")
    total = 0.0
    for r in range(N + 1):
        rpow = 1.0 if (r == 0 and u == 0) else float(r) ** u
        cpow = 1.0 if r == 0 else chi ** (r / 2)
        total += rpow * cpow
    return total


def sample_chains(spec, ordering: Ordering, R: int, seed: int, length: int | None = None) -> np.ndarray:
    """``R x length`` matrix of chain prefixes; replication ``r`` uses
    ``derive_seed(seed, r)``."""
    length = ordering.num_pairs if length is None else length
    out = np.empty((R, length), dtype=np.uint8)
    for r in range(R):
        bits, _ = sample_bits(spec, ordering, derive_seed(seed, r))
        out[r] = bits[:length]
    return out


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    se: float
    position: int
    outcome: int
    condition: int


def empirical_conditional(chains: np.ndarray, position: int, k: int, b: int, s: int = 1):
    """``P(B_position = s | B_{position-k} = b)`` and its binomial SE.

    Positions are 1-based. Returns ``(nan, nan, 0)`` if the conditioning
    event was never observed.
    """
    past = chains[:, position - 1 - k]
    now = chains[:, position - 1]
    mask = past == b
    m = int(mask.sum())
    if m == 0:
        return float("nan"), float("nan"), 0
    est = float(np.mean(now[mask] == s))
    return est, float(np.sqrt(est * (1 - est) / m)), m


def delta_empirical(spec, ordering: Ordering, k: int, positions, R: int, seed: int) -> DeltaEstimate:
    """Monte Carlo estimate of the dependence measure at lag ``k``.

    Conditions only on ``B_{i-k}``, which is sufficient for first-order
    chains. The reported SE belongs to the maximising cell.
    """
    positions = [int(i) for i in positions]
    if R < 100:
        raise ValueError("R must be >= 100")
    if k < 1 or any(i < k + 1 or i > ordering.num_pairs for i in positions):
        raise ValueError(f"positions must lie in [k + 1, N] = [{k + 1}, {ordering.num_pairs}]")
    chains = sample_chains(spec, ordering, R, seed, length=max(positions))
    best = DeltaEstimate(-1.0, float("nan"), 0, 0, 0)
    for i in positions:
        marg = float(chains[:, i - 1].mean())
        for b in (0, 1):
            for s in (0, 1):
                est, se, m = empirical_conditional(chains, i, k, b, s)
                if m == 0:
                    warnings.warn(f"B_{i - k} = {b} never observed; cell skipped")
                    continue
                dev = abs(est - (marg if s == 1 else 1 - marg))
                if dev > best.value:
                    best = DeltaEstimate(dev, se, i, s, b)
    return best
