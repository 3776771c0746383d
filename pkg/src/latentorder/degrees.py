"""Degree distributions, log-log power-law fits, Poisson distance, components."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.stats import poisson

from .errors import InsufficientSupportError


@dataclass(frozen=True, eq=False)
class DegreeHistogram:
    """``counts[k]`` nodes of degree ``k``; ``n`` is the pooled node count."""

    counts: np.ndarray
    n: int

    @property
    def freq(self) -> np.ndarray:
        return self.counts / self.n

    def as_dict(self) -> dict[int, int]:
        return {int(k): int(c) for k, c in enumerate(self.counts) if c}

    def __add__(self, other: "DegreeHistogram") -> "DegreeHistogram":
        m = max(len(self.counts), len(other.counts))
        c = np.zeros(m, dtype=np.int64)
        c[:len(self.counts)] += self.counts
        c[:len(other.counts)] += other.counts
        return DegreeHistogram(c, self.n + other.n)


def degree_histogram(A) -> DegreeHistogram:
    A = np.asarray(A)
    n = A.shape[0]
    deg = A.sum(axis=1, dtype=np.int64)
    return DegreeHistogram(np.bincount(deg, minlength=n).astype(np.int64), n)


def pool(hists) -> DegreeHistogram:
    hists = list(hists)
    total = hists[0]
    for h in hists[1:]:
        total = total + h
    return total


@dataclass(frozen=True)
class PowerLawFit:
    gamma0: float
    gamma1: float
    k_lo: int
    k_hi: int
    points_used: int

    def to_dict(self) -> dict:
        return {"gamma0": self.gamma0, "gamma1": self.gamma1,
                "k_lo": self.k_lo, "k_hi": self.k_hi, "points_used": self.points_used}


def powerlaw_fit(hist: DegreeHistogram, nodes: int | None = None) -> PowerLawFit:
    """OLS of ``log count_k`` on ``log k`` between the mode and the max degree.

    ``k_lo`` is the most frequent degree in ``[0, sqrt(nodes)]`` (smallest on
    ties; ``nodes`` defaults to ``hist.n``, pass the graph size for pooled
    histograms) and ``k_hi`` the largest observed degree. Empty bins and
    ``k = 0`` are skipped.
    """
    counts = np.asarray(hist.counts)
    nodes = hist.n if nodes is None else nodes
    lim = min(math.isqrt(nodes), len(counts) - 1)
    k_lo = int(np.argmax(counts[:lim + 1]))
    positive = np.flatnonzero(counts > 0)
    k_hi = int(positive.max())
    ks = np.arange(len(counts))
    use = (ks >= max(k_lo, 1)) & (ks <= k_hi) & (counts > 0)
    if use.sum() < 3:
        raise InsufficientSupportError(
            f"only {int(use.sum())} positive bins in [{k_lo}, {k_hi}]; need 3")
    x = np.log(ks[use])
    y = np.log(counts[use])
    slope, intercept = np.polyfit(x, y, 1)
    return PowerLawFit(float(intercept), float(slope), k_lo, k_hi, int(use.sum()))


def poisson_tv(hist: DegreeHistogram, lam: float) -> float:
    """Total variation between the empirical degree law and Poisson(``lam``)."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    freq = hist.freq
    ks = np.arange(len(freq))
    pmf = poisson.pmf(ks, lam) if lam > 0 else (ks == 0).astype(float)
    tail = poisson.sf(ks[-1], lam) if lam > 0 else 0.0
    return float(0.5 * (np.abs(freq - pmf).sum() + tail))


def poisson_poisson_tv(lam1: float, lam2: float, kmax: int = 2000) -> float:
    ks = np.arange(kmax + 1)
    return float(0.5 * np.abs(poisson.pmf(ks, lam1) - poisson.pmf(ks, lam2)).sum())


def tail_sets(hist: DegreeHistogram, gamma: float, mu: float, nodes: int | None = None):
    """Degrees whose frequency reaches a normalised power law, and a power law
    with exponential cutoff: ``(A_set, B_set)`` as sorted lists.

    Degrees range over ``1..nodes`` (default ``hist.n``; pass the graph size
    for pooled histograms). Unobserved degrees never qualify.
    """
    if gamma <= 1:
        raise ValueError("gamma must be > 1")
    if mu <= 0:
        raise ValueError("mu must be > 0")
    n = hist.n if nodes is None else nodes
    ks = np.arange(1, n + 1, dtype=float)
    pl = ks ** (-gamma)
    plc = pl * np.exp(-mu * ks)
    M_g = 1.0 / pl.sum()
    M_gm = 1.0 / plc.sum()
    fk = np.zeros(n)
    f = hist.freq[1:n + 1]
    fk[:len(f)] = f
    seen = fk > 0
    # relative slack absorbs round-off when freq equals the reference exactly
    A_set = np.flatnonzero(seen & (fk >= M_g * pl * (1 - 1e-12))) + 1
    B_set = np.flatnonzero(seen & (fk >= M_gm * plc * (1 - 1e-12))) + 1
    return A_set.tolist(), B_set.tolist()


def longest_run(values) -> int:
    """Length of the longest run of consecutive integers in ``values``."""
    best = run = 0
    prev = None
    for v in sorted(values):
        run = run + 1 if prev is not None and v == prev + 1 else 1
        best = max(best, run)
        prev = v
    return best


def components(A) -> tuple[list[int], bool]:
    """Component sizes (descending) and whether the graph is connected."""
    ncomp, lab = connected_components(csr_matrix(np.asarray(A)), directed=False)
    sizes = sorted(np.bincount(lab).tolist(), reverse=True)
    return sizes, ncomp == 1
