"""Normalized-Laplacian spectral clustering and mis-clustering accounting."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidSizeError
from .estimation import CommunityAssignment, canonical_labels


@dataclass(frozen=True, eq=False)
class Laplacian:
    """``D^{-1/2} M D^{-1/2}`` restricted to nodes of positive degree."""

    matrix: np.ndarray
    kept: np.ndarray  # 0-based indices of retained nodes
    isolated: np.ndarray  # 1-based ids of zero-degree nodes
    degrees: np.ndarray
    tau: float  # min_i D_ii / n over all nodes


def laplacian(M) -> Laplacian:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T):
        raise ValueError("input must be a symmetric square matrix")
    n = M.shape[0]
    deg = M.sum(axis=1)
    kept = np.flatnonzero(deg > 0)
    if len(kept) == 0:
        raise InvalidSizeError("all-zero matrix has an empty Laplacian")
    inv_sqrt = 1.0 / np.sqrt(deg[kept])
    L = inv_sqrt[:, None] * M[np.ix_(kept, kept)] * inv_sqrt[None, :]
    isolated = np.flatnonzero(deg == 0) + 1
    return Laplacian(L, kept, isolated, deg, float(deg.min() / n))


@dataclass(frozen=True, eq=False)
class LaplacianPair:
    sample: np.ndarray
    population: np.ndarray
    tau: float
    isolated: np.ndarray

    @property
    def discrepancy(self) -> float:
        return laplacian_discrepancy(self.sample, self.population)


def laplacian_pair(A, theta) -> LaplacianPair:
    """Sample and population Laplacians on the nodes not isolated in ``A``."""
    A = np.asarray(A, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sample = laplacian(A)
    keep = sample.kept
    pop = laplacian(theta[np.ix_(keep, keep)])
    if len(pop.kept) != len(keep):
        raise ValueError("population matrix has zero rows on non-isolated nodes")
    tau = float(theta.sum(axis=1).min() / theta.shape[0])
    return LaplacianPair(sample.matrix, pop.matrix, tau, sample.isolated)


def laplacian_discrepancy(sample, population) -> float:
    """Frobenius norm of ``sample @ sample - population @ population``."""
    sample = np.asarray(sample, dtype=float)
    population = np.asarray(population, dtype=float)
    if sample.shape != population.shape:
        raise ValueError(f"size mismatch {sample.shape} vs {population.shape}")
    return float(np.linalg.norm(sample @ sample - population @ population, "fro"))


def top_k_eigvecs(S, k: int):
    """Eigenpairs with the ``k`` largest ``|lambda|``.

    Ties in ``|lambda|`` go to the larger signed value, and each vector is
    flipped so its first nonzero entry is positive.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("input must be square")
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-10:
        raise ValueError("input must be symmetric (tolerance 1e-10)")
    if not 1 <= k <= S.shape[0]:
        raise ValueError(f"k must lie in 1..{S.shape[0]}")
    w, V = np.linalg.eigh(S)
    order = np.lexsort((-w, -np.round(np.abs(w), 10)))[:k]
    w = w[order]
    V = V[:, order]
    for c in range(k):
        nz = np.flatnonzero(np.abs(V[:, c]) > 1e-12)
        if len(nz) and V[nz[0], c] < 0:
            V[:, c] = -V[:, c]
    return w, V


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp(X, k, rng):
    n = len(X)
    centers = [int(rng.integers(n))]
    d2 = ((X - X[centers[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        nxt = int(rng.integers(n)) if total <= 0 else int(rng.choice(n, p=d2 / total))
        centers.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[centers].copy()


def _lloyd(X, C, max_iters):
    history = []
    labels = None
    for _ in range(max_iters):
        D = _sq_dists(X, C)
        new = np.argmin(D, axis=1)
        history.append(float(D[np.arange(len(X)), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for g in range(len(C)):
            members = labels == g
            if members.any():
                C[g] = X[members].mean(axis=0)
            else:
                # re-seed from the point farthest from its own centroid
                far = int(np.argmax(((X - C[labels]) ** 2).sum(axis=1)))
                C[g] = X[far]
    D = _sq_dists(X, C)
    labels = np.argmin(D, axis=1)
    obj = float(D[np.arange(len(X)), labels].sum())
    history.append(obj)
    return labels, C, obj, history


def kmeans(X, k: int, restarts: int = 10, seed: int = 0, max_iters: int = 300):
    """Lloyd's algorithm from k-means++ starts; returns ``(labels, centroids,
    objective)`` with 1-based labels from the lowest-objective restart."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = len(X)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if len(np.unique(X, axis=0)) < k:
        warnings.warn("fewer distinct points than clusters; some clusters stay empty")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(restarts, 1)):
        labels, C, obj, _ = _lloyd(X, _kmeanspp(X, k, rng), max_iters)
        if best is None or obj < best[2] - 1e-12:
            best = (labels, C, obj)
    labels, C, obj = best
    return labels + 1, C, obj


@dataclass(frozen=True, eq=False)
class ClusterResult:
    assignment: CommunityAssignment
    centroids: np.ndarray
    eigenvalues: np.ndarray
    isolated: np.ndarray
    tau: float
    misclustered: int | None = None

    @property
    def largest_cluster(self) -> int:
        return int(self.assignment.sizes.max())

    def to_dict(self) -> dict:
        return {"labels": self.assignment.labels.tolist(),
                "misclustered": self.misclustered,
                "eigenvalues": self.eigenvalues.tolist(),
                "isolated": self.isolated.tolist(),
                "tau": self.tau}


def spectral_cluster(A, k: int, seed: int = 0, restarts: int = 10, truth=None) -> ClusterResult:
    """k-means on the rows of the top-``k`` Laplacian eigenvectors.

    Zero-degree nodes are left out of the Laplacian and then joined to the
    largest cluster.
    """
    lap = laplacian(A)
    if len(lap.kept) < k:
        raise InvalidSizeError(f"only {len(lap.kept)} non-isolated nodes for k={k}")
    w, U = top_k_eigvecs(lap.matrix, k)
    lab, C, _ = kmeans(U, k, restarts=restarts, seed=seed)
    n = len(lap.degrees)
    labels = np.zeros(n, dtype=np.int64)
    labels[lap.kept] = lab
    if len(lap.isolated):
        labels[lap.isolated - 1] = np.argmax(np.bincount(lab, minlength=k + 1))
    order = canonical_labels(labels)
    # keep centroid rows aligned with the canonical labels
    perm = {int(o): int(l) for o, l in zip(order, labels)}
    C = C[[perm[g] - 1 for g in sorted(perm)]] if len(perm) == k else C
    result = ClusterResult(CommunityAssignment(order, k), C, w, lap.isolated, lap.tau)
    if truth is not None:
        result = ClusterResult(result.assignment, C, w, lap.isolated, lap.tau,
                               misclustered_count(order, truth))
    return result


def misclustered_count(z_hat, z_star) -> int:
    """Fewest label disagreements over all matchings of group labels.

    Exhaustive over permutations for up to 8 groups, Hungarian matching on
    the confusion matrix beyond that.
    """
    a = np.asarray(z_hat, dtype=np.int64)
    b = np.asarray(z_star, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("labelings have different lengths")
    ua, ia = np.unique(a, return_inverse=True)
    ub, ib = np.unique(b, return_inverse=True)
    K = max(len(ua), len(ub))
    conf = np.zeros((K, K), dtype=np.int64)
    np.add.at(conf, (ia, ib), 1)
    n = len(a)
    if K <= 8:
        best = max(conf[np.arange(K), list(p)].sum() for p in itertools.permutations(range(K)))
    else:
        r, c = linear_sum_assignment(-conf)
        best = conf[r, c].sum()
    return int(n - best)
