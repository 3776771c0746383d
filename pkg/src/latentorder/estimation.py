"""Combinatorial least-squares block estimation.

Labels are 1-based numpy integer arrays. For an assignment ``z`` the
objective is ``sum_{i<j} (A_ij - Q[z_i, z_j])**2``; for fixed ``z`` it is
minimised by block means, so solvers only search over assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SizeGuardError, UndefinedBlockError

# exhaustive search limit, counted in distinct partitions (2047 for n=12, k=2)
MAX_PARTITIONS = 2048


@dataclass(frozen=True, eq=False)
class CommunityAssignment:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if len(lab) and (lab.min() < 1 or lab.max() > self.k):
            raise ValueError(f"labels must lie in 1..{self.k}")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels - 1, minlength=self.k)

    def __eq__(self, other):
        if not isinstance(other, CommunityAssignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    __hash__ = None


def canonical_labels(labels) -> np.ndarray:
    """Relabel groups in order of first appearance (1, 2, ...)."""
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    mapping = np.empty(labels.max() + 1, dtype=np.int64)
    mapping[np.unique(labels)[order]] = np.arange(1, len(order) + 1)
    return mapping[labels]


def _block_sums(M: np.ndarray, z: np.ndarray, k: int):
    Z = np.zeros((len(z), k))
    Z[np.arange(len(z)), z - 1] = 1.0
    S = Z.T @ M @ Z
    sizes = Z.sum(axis=0)
    counts = np.outer(sizes, sizes)
    np.fill_diagonal(counts, sizes * (sizes - 1))
    return S, counts, sizes


def block_means(M, z, k: int | None = None, singleton_value: float | None = None) -> np.ndarray:
    """Average of ``M`` over each block of the partition ``z``.

    Diagonal blocks average over unordered within-group pairs and are
    undefined for singleton groups; pass ``singleton_value`` to fill them
    instead of raising. Empty groups get zero rows.
    """
    M = np.asarray(M, dtype=float)
    z = np.asarray(z, dtype=np.int64)
    k = int(z.max()) if k is None else k
    S, counts, sizes = _block_sums(M, z, k)
    singles = np.flatnonzero(sizes == 1)
    if len(singles) and singleton_value is None:
        raise UndefinedBlockError(f"group {singles[0] + 1} is a singleton; its diagonal block is undefined")
    with np.errstate(invalid="ignore", divide="ignore"):
        Q = np.where(counts > 0, S / np.where(counts > 0, counts, 1), 0.0)
    for a in singles:
        Q[a, a] = singleton_value
    return Q


def ls_loss(M, z, Q) -> float:
    """``sum_{i<j} (M_ij - Q[z_i, z_j])**2``."""
    M = np.asarray(M, dtype=float)
    z = np.asarray(z, dtype=np.int64) - 1
    fitted = np.asarray(Q)[z[:, None], z[None, :]]
    iu = np.triu_indices(len(z), 1)
    return float(np.sum((M[iu] - fitted[iu]) ** 2))


def theta_from_blocks(Q, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.int64) - 1
    theta = np.asarray(Q, dtype=float)[z[:, None], z[None, :]]
    np.fill_diagonal(theta, 0.0)
    return theta


@dataclass(frozen=True, eq=False)
class BlockEstimate:
    values: np.ndarray  # k x k block probabilities
    assignment: CommunityAssignment
    loss: float
    history: list = field(default_factory=list)

    @property
    def theta_hat(self) -> np.ndarray:
        return theta_from_blocks(self.values, self.assignment.labels)

    def to_dict(self) -> dict:
        return {"k": self.assignment.k, "labels": self.assignment.labels.tolist(),
                "Q": self.values.tolist(), "loss": self.loss}


def _estimate(M, z, k, history=()) -> BlockEstimate:
    Q = block_means(M, z, k, singleton_value=0.0)
    return BlockEstimate(Q, CommunityAssignment(z, k), ls_loss(M, z, Q), list(history))


def _check_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("input must be a square matrix")
    if not np.allclose(M, M.T):
        raise ValueError("input must be symmetric")
    return M


def stirling2(n: int, k: int) -> int:
    """Number of partitions of ``n`` items into exactly ``k`` nonempty groups."""
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def restricted_growth_strings(n: int, k: int) -> np.ndarray:
    """All canonical labelings with exactly ``k`` groups, in lexicographic order.

    Every partition of ``n`` nodes into ``k`` nonempty groups appears once,
    labelled by order of first appearance.
    """
    out = []
    z = [0] * n

    def rec(i, used):
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                out.append(z.copy())
            return
        for g in range(min(used + 1, k)):
            z[i] = g
            rec(i + 1, max(used, g + 1))

    rec(0, 0)
    return np.asarray(out, dtype=np.int64).reshape(-1, n) + 1


def cls_exact(A, k: int) -> BlockEstimate:
    """Global least-squares minimiser by enumerating all partitions.

    Ties are broken toward the lexicographically smallest canonical label
    sequence, e.g. ``(1, 1, 1, 2)`` for an empty graph on four nodes.
    """
    A = _check_square(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    count = stirling2(n, k)
    if count > MAX_PARTITIONS:
        raise SizeGuardError(
            f"{count} partitions for n={n}, k={k} exceeds {MAX_PARTITIONS}; use cls_heuristic")
    Zs = restricted_growth_strings(n, k)
    onehot = np.zeros((len(Zs), n, k))
    np.put_along_axis(onehot, (Zs - 1)[:, :, None], 1.0, axis=2)
    S = np.einsum("pia,ij,pjb->pab", onehot, A, onehot)
    sizes = onehot.sum(axis=1)
    counts = sizes[:, :, None] * sizes[:, None, :]
    idx = np.arange(k)
    counts[:, idx, idx] = sizes * (sizes - 1)
    # sum over unordered pairs: off-diagonal blocks appear twice in S
    with np.errstate(invalid="ignore", divide="ignore"):
        explained = np.where(counts > 0, S ** 2 / np.where(counts > 0, counts, 1), 0.0)
    iu = np.triu_indices(k, 1)
    gain = explained[:, idx, idx].sum(axis=1) / 2 + explained[:, iu[0], iu[1]].sum(axis=1)
    total = np.sum(np.triu(A, 1) ** 2)
    losses = total - gain
    best = losses.min()
    tol = 1e-9 * max(1.0, abs(total))
    choice = int(np.flatnonzero(losses <= best + tol)[0])
    return _estimate(A, Zs[choice], k)


def _repair_empty(M, z, k, Q):
    sizes = np.bincount(z - 1, minlength=k)
    for g in np.flatnonzero(sizes == 0):
        # move the worst-fitting node from a group that can spare one
        fitted = Q[(z - 1)[:, None], (z - 1)[None, :]]
        resid = ((M - fitted) ** 2).sum(axis=1)
        resid[sizes[z - 1] < 2] = -np.inf
        i = int(np.argmax(resid))
        sizes[z[i] - 1] -= 1
        z[i] = g + 1
        sizes[g] += 1
    return z


def _local_search(M, z, k, max_iters):
    """Alternate block means with sequential single-node reassignment."""
    n = len(z)
    z = z.copy()
    Q = block_means(M, z, k, singleton_value=0.0)
    z = _repair_empty(M, z, k, Q)
    Q = block_means(M, z, k, singleton_value=0.0)
    history = [ls_loss(M, z, Q)]
    sizes = np.bincount(z - 1, minlength=k)
    for _ in range(max_iters):
        changed = False
        for i in range(n):
            a = z[i] - 1
            if sizes[a] == 1:
                continue
            # row sums per group over j != i
            nb = np.bincount(z - 1, weights=M[i], minlength=k)
            nb[a] -= M[i, i]
            cnt = sizes.astype(float)
            cnt[a] -= 1
            # sum_{j != i} (M_ij - Q[g, z_j])^2 up to a constant, per candidate g
            cost = (Q ** 2) @ cnt - 2 * (Q @ nb)
            g = int(np.argmin(cost))
            if cost[g] < cost[a] - 1e-12:
                z[i] = g + 1
                sizes[a] -= 1
                sizes[g] += 1
                changed = True
        Q = block_means(M, z, k, singleton_value=0.0)
        history.append(ls_loss(M, z, Q))
        if history[-1] > history[-2] + 1e-9:
            raise AssertionError("least-squares loss increased during local search")
        if not changed:
            break
    return z, history


def random_assignment(n: int, k: int, rng) -> np.ndarray:
    """Uniform labels with every group guaranteed nonempty."""
    z = rng.integers(1, k + 1, size=n)
    z[rng.permutation(n)[:k]] = np.arange(1, k + 1)
    return z


def cls_heuristic(A, k: int, restarts: int = 10, max_iters: int = 100, seed: int = 0) -> BlockEstimate:
    """Least-squares fit by alternating minimisation with restarts.

    The first start is spectral clustering of ``A`` (skipped if the graph has
    no edges); the rest are random. The lowest-loss result wins, ties going
    to the lexicographically smallest canonical labeling.
    """
    from .spectral import spectral_cluster  # local: spectral imports this module

    A = _check_square(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    starts = []
    if k > 1 and A.any():
        try:
            lab = spectral_cluster(A, k, seed=seed).assignment.labels.copy()
            starts.append(lab)
        except Exception:  # degenerate spectra fall back to random starts
            pass
    while len(starts) < max(restarts, 1):
        starts.append(random_assignment(n, k, rng))

    best = None
    for z0 in starts:
        z, history = _local_search(A, np.asarray(z0, dtype=np.int64), k, max_iters)
        z = canonical_labels(z) if len(np.unique(z)) == k else z
        cand = _estimate(A, z, k, history)
        if best is None or cand.loss < best.loss - 1e-12 or (
                abs(cand.loss - best.loss) <= 1e-12 and tuple(cand.assignment.labels) < tuple(best.assignment.labels)):
            best = cand
    return best


def oracle_cls(theta, k: int, solver: str = "auto", **kwargs) -> BlockEstimate:
    """Least-squares block fit of the true probability matrix."""
    theta = _check_square(theta)
    n = theta.shape[0]
    if solver == "auto":
        solver = "exact" if stirling2(n, k) <= MAX_PARTITIONS else "heuristic"
    if solver == "exact":
        return cls_exact(theta, k)
    if solver == "heuristic":
        return cls_heuristic(theta, k, **kwargs)
    raise ValueError(f"unknown solver {solver!r}")


def mse(theta_hat, theta) -> float:
    """``(1/n^2) * sum_{i,j} (theta_hat - theta)**2``."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if theta_hat.shape != theta.shape:
        raise ValueError(f"shape mismatch {theta_hat.shape} vs {theta.shape}")
    return float(np.sum((theta_hat - theta) ** 2) / theta.shape[0] ** 2)


def graphon_k_select(n: int, alpha: float) -> int:
    """Number of blocks ``floor(n ** (1 / (1 + min(alpha, 1))))``."""
    if n < 2 or alpha <= 0:
        raise ValueError("need n >= 2 and alpha > 0")
    k = math.floor(n ** (1.0 / (1.0 + min(alpha, 1.0))) + 1e-9)
    return min(max(k, 1), n)
