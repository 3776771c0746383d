"""Samplers for memory-1 edge chains along a latent ordering.

Every model here reduces to a two-state chain: a success probability for
the first chain position and per-position kernels ``q0[s] = P(B_s=1 |
B_{s-1}=0)`` and ``q1[s] = P(B_s=1 | B_{s-1}=1)``. All samplers consume
exactly one uniform per chain position, drawn from
``numpy.random.default_rng(seed)`` in fixed-size chunks, so two models with
identical kernels produce identical graphs from the same seed.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DegenerateChainError, InfeasibleError
from .graph import Graph, Ordering, adjacency_from_bits, make_ordering

CHUNK = 1 << 20
_TOL = 1e-12


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic child seed for ``keys`` (e.g. cell, replication).

    Uses ``numpy.random.SeedSequence(master, spawn_key=keys)`` and takes its
    first 63-bit word, so the value depends only on ``(master, keys)``.
    """
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_prob(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise InfeasibleError(f"{name} must lie in [0, 1], got {value}")


def _snap(x: np.ndarray) -> np.ndarray:
    # absorb floating round-off only; real violations are reported by callers
    x = np.where((x < 0) & (x > -_TOL), 0.0, x)
    return np.where((x > 1) & (x < 1 + _TOL), 1.0, x)


def stationary(p0: float, p1: float) -> float:
    """Limiting P(B=1) of the two-state chain, ``p0 / (1 + p0 - p1)``."""
    denom = 1.0 + p0 - p1
    if denom <= 0.0:
        raise DegenerateChainError(f"stationary law undefined for p0={p0}, p1={p1}")
    return p0 / denom


# --------------------------------------------------------------------------
# chain sampler


def _bits_from_uniforms(u, q0, q1, first, prev):
    """Chain bits for one chunk of uniforms.

    ``B_s = [u_s < q1_s]`` after a one and ``[u_s < q0_s]`` after a zero.
    Where both candidates agree the bit does not depend on the past; between
    such positions a bit either copies its predecessor or negates it, so the
    chain is recovered from the last determined value and a flip parity.
    """
    a0 = u < q0
    a1 = u < q1
    if first is not None:
        a0[0] = a1[0] = u[0] < first
        prev = 0  # unused: position 0 is determined
    det = np.concatenate(([True], a0 == a1))
    val = np.concatenate(([bool(prev)], a0))
    flip = np.concatenate(([0], (a0 & ~a1).astype(np.int64)))
    idx = np.where(det, np.arange(len(det)), 0)
    last = np.maximum.accumulate(idx)
    parity = np.cumsum(flip)
    bits = val[last] ^ ((parity - parity[last]) & 1).astype(bool)
    return bits[1:].astype(np.uint8)


def _chunks(q, start, stop):
    return q[start:stop] if np.ndim(q) else q


def sample_chain(N: int, first: float, q0, q1, seed) -> np.ndarray:
    """Draw ``B_1..B_N``; ``q0``/``q1`` are scalars or length-``N`` arrays
    (entry 0 is ignored because position 1 uses ``first``)."""
    rng = _rng(seed)
    out = np.empty(N, dtype=np.uint8)
    prev = 0
    for start in range(0, N, CHUNK):
        stop = min(N, start + CHUNK)
        u = rng.random(stop - start)
        out[start:stop] = _bits_from_uniforms(
            u, _chunks(q0, start, stop), _chunks(q1, start, stop),
            first if start == 0 else None, prev)
        prev = out[stop - 1]
    return out


def chain_marginals(N: int, first: float, q0, q1) -> np.ndarray:
    """Exact ``P(B_s = 1)`` by forward recursion."""
    q0 = np.broadcast_to(np.asarray(q0, dtype=float), (N,))
    q1 = np.broadcast_to(np.asarray(q1, dtype=float), (N,))
    m = np.empty(N)
    m[0] = first
    for s in range(1, N):
        m[s] = q0[s] + (q1[s] - q0[s]) * m[s - 1]
    return m


# --------------------------------------------------------------------------
# model parameterisations


@dataclass(frozen=True)
class MecltgParams:
    """Homogeneous two-state edge chain with constant marginal."""

    p0: float
    p1: float

    def __post_init__(self):
        _check_prob("p0", self.p0)
        _check_prob("p1", self.p1)

    @classmethod
    def from_lambdas(cls, n: int, lambda0: float, lambda1: float, c: float) -> "MecltgParams":
        """``p0 = lambda0 / n`` and ``p1 = 1 - lambda1 * n**-c``."""
        return cls(lambda0 / n, 1.0 - lambda1 * n ** (-c))

    @classmethod
    def log_scaled(cls, n: int, lambda0: float, lambda1: float) -> "MecltgParams":
        """``p_w = lambda_w * log(n) / n`` (connectivity threshold scaling)."""
        return cls(lambda0 * math.log(n) / n, lambda1 * math.log(n) / n)

    @property
    def p(self) -> float:
        return stationary(self.p0, self.p1)

    def kernels(self, ordering: Ordering, rng):
        return self.p, self.p0, self.p1, {"theta_const": self.p}


def block_pair_index(k: int) -> np.ndarray:
    """``k x k`` symmetric table mapping groups ``(a, b)`` to the index of
    the pair in the order 11, 12, ..., 1k, 22, ..., kk."""
    idx = np.empty((k, k), dtype=np.int64)
    m = 0
    for a in range(k):
        for b in range(a, k):
            idx[a, b] = idx[b, a] = m
            m += 1
    return idx


def block_pair_labels(k: int) -> list[str]:
    return [f"{a + 1}{b + 1}" for a in range(k) for b in range(a, k)]


def balanced_labels(n: int, k: int) -> np.ndarray:
    """Contiguous groups of near-equal size, 1-based."""
    return (np.arange(n) * k) // n + 1


@dataclass(frozen=True)
class CsbmParams:
    """Composite SBM whose edge law depends on the previous edge's block pair.

    ``rho_diag[m]`` is the after-zero probability for block pair ``m``
    following itself; ``rho_one[prev, cur]`` the after-one probability for
    block pair ``cur`` following ``prev``. Derived fields are filled by
    :func:`solve_csbm`.
    """

    k: int
    rho_diag: np.ndarray
    rho_one: np.ndarray
    rho: np.ndarray  # stationary probability per block pair
    rho_zero: np.ndarray  # after-zero table, same layout as rho_one
    labels: np.ndarray | None = None
    scale: float = 1.0

    @property
    def block_matrix(self) -> np.ndarray:
        """``k x k`` matrix of stationary block probabilities."""
        return self.rho[block_pair_index(self.k)]

    def with_labels(self, labels) -> "CsbmParams":
        return dataclasses.replace(self, labels=np.asarray(labels, dtype=np.int64))

    def kernels(self, ordering: Ordering, rng):
        n = ordering.n
        labels = self.labels if self.labels is not None else balanced_labels(n, self.k)
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != n:
            raise ValueError(f"labels have length {len(labels)}, graph has n={n}")
        if labels.min() < 1 or labels.max() > self.k or len(np.unique(labels)) != self.k:
            raise ValueError(f"labels must use every group 1..{self.k}")
        bidx = block_pair_index(self.k)
        g = labels - 1
        pair_block = bidx[g[ordering.pairs[:, 0]], g[ordering.pairs[:, 1]]]
        prev_block = np.concatenate(([pair_block[0]], pair_block[:-1]))
        q0 = self.rho_zero[prev_block, pair_block] * self.scale
        q1 = self.rho_one[prev_block, pair_block] * self.scale
        first = self.rho[pair_block[0]] * self.scale
        theta = self.rho[bidx[g[:, None], g[None, :]]]
        np.fill_diagonal(theta, 0.0)
        return first, q0, q1, {"labels": labels, "theta": theta if self.scale == 1.0 else None}


def _as_pair_vector(rho_diag, k=None):
    arr = np.asarray(rho_diag, dtype=float)
    if arr.ndim == 2:  # k x k symmetric matrix given
        kk = arr.shape[0]
        return arr[np.triu_indices(kk)], kk
    M = arr.shape[0]
    kk = int(round((math.isqrt(8 * M + 1) - 1) / 2))
    if kk * (kk + 1) // 2 != M:
        raise ValueError(f"{M} entries is not k(k+1)/2 for any k")
    return arr, kk


def solve_csbm(rho_diag, rho_one, labels=None) -> CsbmParams:
    """Complete a composite SBM from its self-transition inputs.

    The stationary probability of block pair ``m`` is
    ``rho_diag[m] / (1 + rho_diag[m] - rho_one[m, m])``; every after-zero
    entry for a change of block pair then follows from requiring the
    stationary marginal to be preserved across the change.
    """
    d, k = _as_pair_vector(rho_diag)
    one = np.asarray(rho_one, dtype=float)
    M = len(d)
    if one.shape != (M, M):
        raise ValueError(f"rho_one must be {M}x{M} for k={k}")
    names = block_pair_labels(k)
    for m in range(M):
        _check_prob(f"rho_diag[{names[m]}]", d[m])
        for l in range(M):
            _check_prob(f"rho_one[{names[m]}->{names[l]}]", one[m, l])

    rho = np.empty(M)
    for m in range(M):
        denom = 1.0 + d[m] - one[m, m]
        if denom <= 0.0:
            raise DegenerateChainError(f"block pair {names[m]}: stationary law is 0/0")
        rho[m] = d[m] / denom

    zero = np.empty((M, M))
    for prev in range(M):
        for cur in range(M):
            if prev == cur:
                zero[prev, cur] = d[cur]
                continue
            if rho[prev] >= 1.0:
                raise InfeasibleError(
                    f"block pair {names[prev]} has stationary probability 1; "
                    f"after-zero probability for {names[cur]} is undefined")
            val = (rho[cur] - one[prev, cur] * rho[prev]) / (1.0 - rho[prev])
            if val < -_TOL or val > 1 + _TOL:
                raise InfeasibleError(
                    f"infeasible after-zero probability {val:.6g} for block pair "
                    f"{names[cur]} following {names[prev]}")
            zero[prev, cur] = min(max(val, 0.0), 1.0)
    lab = None if labels is None else np.asarray(labels, dtype=np.int64)
    return CsbmParams(k, d, one, rho, zero, labels=lab)


# two- and three-group presets; rows of rho_one are the preceding block pair
TWO_GROUP_DIAG = [0.1, 0.01, 0.2]
TWO_GROUP_ONE = [[0.4, 0.05, 0.3],
                 [0.3, 0.1, 0.1],
                 [0.2, 0.03, 0.6]]
THREE_GROUP_DIAG = [0.3, 0.01, 0.02, 0.3, 0.06, 0.3]
THREE_GROUP_ONE = [[0.5, 0.02, 0.05, 0.3, 0.02, 0.04],
                   [0.3, 0.1, 0.05, 0.2, 0.02, 0.04],
                   [0.2, 0.1, 0.08, 0.05, 0.02, 0.04],
                   [0.15, 0.02, 0.02, 0.6, 0.02, 0.04],
                   [0.15, 0.1, 0.05, 0.01, 0.1, 0.04],
                   [0.2, 0.01, 0.02, 0.05, 0.02, 0.7]]


def two_group_preset(labels=None) -> CsbmParams:
    return solve_csbm(TWO_GROUP_DIAG, TWO_GROUP_ONE, labels)


def three_group_preset(labels=None) -> CsbmParams:
    return solve_csbm(THREE_GROUP_DIAG, THREE_GROUP_ONE, labels)


# --------------------------------------------------------------------------
# graphons


def _block_graphon(table, cuts=None):
    table = np.asarray(table, dtype=float)
    k = table.shape[0]
    cuts = np.linspace(0, 1, k + 1)[1:-1] if cuts is None else np.asarray(cuts, dtype=float)

    def f(x, y):
        return table[np.searchsorted(cuts, x, "right"), np.searchsorted(cuts, y, "right")]

    f.groups = lambda x: np.searchsorted(cuts, x, "right") + 1
    return f


def _constant_graphon(c):
    return lambda x, y: np.full(np.broadcast(x, y).shape, float(c))


def _product_graphon(low=0.1, high=0.9):
    return lambda x, y: low + (high - low) * x * y


def _smooth_graphon(low=0.2, high=0.8):
    # Lipschitz (alpha = 1) and bounded away from 0 and 1
    return lambda x, y: low + (high - low) * 0.5 * (np.sin(np.pi * x) * np.sin(np.pi * y) + (x + y) / 2)


GRAPHONS: dict[str, Callable] = {
    "constant": _constant_graphon,
    "block": _block_graphon,
    "product": _product_graphon,
    "smooth": _smooth_graphon,
}


@dataclass(frozen=True)
class GraphonSpec:
    """Composite graphon with one persistence knob for the memory-1 chain.

    ``persistence`` ``d`` sets ``P(B_s=1 | B_{s-1}=1) = m_s + d (1 - m_s)``
    where ``m_s`` is the graphon value of the pair at position ``s``.
    """

    name: str
    params: dict = field(default_factory=dict)
    alpha: float = 1.0
    persistence: float = 0.0
    latent: np.ndarray | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in GRAPHONS:
            raise ValueError(f"unknown graphon {self.name!r}; choose from {sorted(GRAPHONS)}")
        if not 0.0 <= self.persistence < 1.0:
            raise ValueError("persistence must lie in [0, 1)")

    @property
    def function(self):
        return GRAPHONS[self.name](**self.params)

    def kernels(self, ordering: Ordering, rng):
        n = ordering.n
        f = self.function
        xi = np.asarray(self.latent, dtype=float) if self.latent is not None else rng.random(n)
        if len(xi) != n:
            raise ValueError(f"latent has length {len(xi)}, graph has n={n}")
        theta = np.asarray(f(xi[:, None], xi[None, :]), dtype=float)
        if not np.allclose(theta, theta.T, atol=1e-12):
            raise ValueError(f"graphon {self.name!r} is not symmetric")
        if theta.min() < 0 or theta.max() > 1:
            raise InfeasibleError(f"graphon {self.name!r} leaves [0, 1]")
        np.fill_diagonal(theta, 0.0)
        m = theta[ordering.pairs[:, 0], ordering.pairs[:, 1]]
        q0, q1 = persistence_kernels(m, self.persistence)
        meta = {"theta": theta if self.scale == 1.0 else None, "latent": xi}
        if hasattr(f, "groups"):
            meta["labels"] = f.groups(xi)
        return m[0] * self.scale, q0 * self.scale, q1 * self.scale, meta


def persistence_kernels(m: np.ndarray, d: float):
    """Kernels preserving the marginals ``m`` with persistence ``d``."""
    m = np.asarray(m, dtype=float)
    q1 = m + d * (1.0 - m)
    q0 = np.empty_like(m)
    q0[0] = m[0]
    prev = m[:-1]
    if np.any(prev >= 1.0):
        s = int(np.flatnonzero(prev >= 1.0)[0]) + 1
        raise DegenerateChainError(f"marginal equals 1 at position {s}; next kernel undefined")
    q0[1:] = (m[1:] - q1[1:] * prev) / (1.0 - prev)
    bad = q0 < -_TOL
    if np.any(bad):
        s = int(np.flatnonzero(bad)[0])
        dmax = m[s] * (1 - m[s - 1]) / ((1 - m[s]) * m[s - 1])
        raise InfeasibleError(
            f"persistence {d} infeasible at chain position {s + 1}: "
            f"largest feasible value there is {dmax:.6g}")
    return _snap(q0), q1


@dataclass(frozen=True)
class InhomSchedule:
    """Single-group chain with position-dependent kernels and a fixed marginal."""

    target: float
    q1: np.ndarray
    q0: np.ndarray
    scale: float = 1.0

    def kernels(self, ordering: Ordering, rng):
        if len(self.q1) != ordering.num_pairs:
            raise ValueError(f"schedule has length {len(self.q1)}, chain has {ordering.num_pairs}")
        n = ordering.n
        theta = np.full((n, n), self.target)
        np.fill_diagonal(theta, 0.0)
        return (self.target * self.scale, self.q0 * self.scale, self.q1 * self.scale,
                {"theta": theta if self.scale == 1.0 else None})


def make_inhom_schedule(target: float, q1) -> InhomSchedule:
    if not 0.0 < target < 1.0:
        raise ValueError("target marginal must lie in (0, 1)")
    q1 = np.asarray(q1, dtype=float)
    if np.any(q1 < 0) or np.any(q1 >= 1):
        raise InfeasibleError("q1 entries must lie in [0, 1)")
    q0 = target * (1.0 - q1) / (1.0 - target)
    bad = q0 > 1 + _TOL
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InfeasibleError(
            f"schedule infeasible at index {i + 1}: after-zero probability {q0[i]:.6g} > 1")
    return InhomSchedule(target, q1, _snap(q0))


def apply_sparse_scaling(spec, rho_n: float):
    """Multiply every conditional success probability by ``rho_n``."""
    if not 0.0 < rho_n <= 1.0:
        raise ValueError("rho_n must lie in (0, 1]")
    if isinstance(spec, MecltgParams):
        return MecltgParams(spec.p0 * rho_n, spec.p1 * rho_n)
    return dataclasses.replace(spec, scale=spec.scale * rho_n)


# --------------------------------------------------------------------------
# generation


def _spec_name(spec) -> str:
    return {MecltgParams: "mecltg", CsbmParams: "csbm", GraphonSpec: "graphon",
            InhomSchedule: "inhom"}[type(spec)]


def sample_bits(spec, ordering: Ordering, seed) -> tuple[np.ndarray, dict]:
    """Chain bits and generation metadata for any supported model."""
    rng = _rng(seed)
    first, q0, q1, meta = spec.kernels(ordering, rng)
    return sample_chain(ordering.num_pairs, first, q0, q1, rng), meta


def generate(spec, n: int, ordering: Ordering, seed) -> Graph:
    if ordering.n != n:
        raise ValueError(f"ordering is for n={ordering.n}, requested n={n}")
    bits, meta = sample_bits(spec, ordering, seed)
    A = adjacency_from_bits(bits, ordering)
    theta = meta.get("theta")
    if theta is None and "theta_const" in meta:
        theta = np.full((n, n), meta["theta_const"])
        np.fill_diagonal(theta, 0.0)
    info = {"model": _spec_name(spec), "ordering": ordering.kind,
            "seed": seed if isinstance(seed, (int, np.integer)) else None}
    return Graph(A, ordering=ordering, labels=meta.get("labels"), theta=theta, meta=info)


def gen_mecltg(n: int, ordering: Ordering, params: MecltgParams, seed) -> Graph:
    return generate(params, n, ordering, seed)


def gen_csbm(n: int, ordering: Ordering, params: CsbmParams, seed, labels=None) -> Graph:
    if labels is not None:
        params = params.with_labels(labels)
    return generate(params, n, ordering, seed)


def gen_composite_graphon(n: int, ordering: Ordering, spec: GraphonSpec, seed) -> Graph:
    return generate(spec, n, ordering, seed)


def gen_inhom(n: int, ordering: Ordering, schedule: InhomSchedule, seed) -> Graph:
    return generate(schedule, n, ordering, seed)


def gen_erdos_renyi(n: int, p: float, seed) -> Graph:
    return generate(MecltgParams(p, p), n, make_ordering("omega1", n), seed)


def gen_coupled(n: int, ordering: Ordering, p0: float, p1: float, p_a: float, seed):
    """Erdos-Renyi ``G(n, p_a)`` and MECLTG ``(p0, p1)`` from shared uniforms.

    Returns ``(srg, mecltg)``. With ``p_a >= max(p0, p1)`` every non-edge of
    the first graph is a non-edge of the second; with ``p_a <= min(p0, p1)``
    every edge of the first is an edge of the second.
    """
    for name, v in (("p0", p0), ("p1", p1), ("p_a", p_a)):
        _check_prob(name, v)
    p = stationary(p0, p1)
    rng = _rng(seed)
    N = ordering.num_pairs
    srg = np.empty(N, dtype=np.uint8)
    chain = np.empty(N, dtype=np.uint8)
    prev = 0
    for start in range(0, N, CHUNK):
        stop = min(N, start + CHUNK)
        u = rng.random(stop - start)
        srg[start:stop] = u < p_a
        chain[start:stop] = _bits_from_uniforms(u, p0, p1, p if start == 0 else None, prev)
        prev = chain[stop - 1]
    meta = {"ordering": ordering.kind, "seed": seed if isinstance(seed, int) else None}
    g_srg = Graph(adjacency_from_bits(srg, ordering), ordering=ordering,
                  meta={"model": "srg", **meta})
    g_m = Graph(adjacency_from_bits(chain, ordering), ordering=ordering,
                meta={"model": "mecltg", **meta})
    return g_srg, g_m


# --------------------------------------------------------------------------
# serialisation


def spec_to_dict(spec) -> dict:
    if isinstance(spec, MecltgParams):
        return {"model": "mecltg", "p0": spec.p0, "p1": spec.p1}
    if isinstance(spec, CsbmParams):
        d = {"model": "csbm", "rho_diag": spec.rho_diag.tolist(),
             "rho_one": spec.rho_one.tolist()}
        if spec.labels is not None:
            d["labels"] = spec.labels.tolist()
        if spec.scale != 1.0:
            d["scale"] = spec.scale
        return d
    if isinstance(spec, GraphonSpec):
        d = {"model": "graphon", "name": spec.name, "params": spec.params,
             "alpha": spec.alpha, "persistence": spec.persistence}
        if spec.scale != 1.0:
            d["scale"] = spec.scale
        return d
    if isinstance(spec, InhomSchedule):
        return {"model": "inhom", "target": spec.target, "q1": spec.q1.tolist(),
                "scale": spec.scale}
    raise TypeError(f"unsupported spec {type(spec).__name__}")


def spec_from_dict(d: dict, n: int | None = None):
    """Inverse of :func:`spec_to_dict`; also accepts the config shorthands
    ``{"model": "mecltg", "lambda0", "lambda1", "c"}`` (needs ``n``),
    ``{"model": "mecltg", "lambda0", "lambda1", "log_scaled": true}`` and
    ``{"model": "csbm", "preset": "two_group" | "three_group"}``."""
    try:
        return _spec_from_dict(d, n)
    except KeyError as exc:
        raise ValueError(f"model spec {d.get('model')!r} is missing key {exc}") from None


def _spec_from_dict(d: dict, n: int | None = None):
    model = d.get("model")
    scale = float(d.get("scale", 1.0))
    if model == "mecltg":
        if "p0" in d:
            spec = MecltgParams(float(d["p0"]), float(d["p1"]))
        elif d.get("log_scaled"):
            spec = MecltgParams.log_scaled(n, d["lambda0"], d["lambda1"])
        else:
            spec = MecltgParams.from_lambdas(n, d["lambda0"], d["lambda1"], d["c"])
    elif model == "csbm":
        preset = d.get("preset")
        if preset == "two_group":
            spec = two_group_preset()
        elif preset == "three_group":
            spec = three_group_preset()
        elif preset is None:
            spec = solve_csbm(d["rho_diag"], d["rho_one"])
        else:
            raise ValueError(f"unknown csbm preset {preset!r}")
        if "labels" in d:
            spec = spec.with_labels(d["labels"])
    elif model == "graphon":
        spec = GraphonSpec(d["name"], dict(d.get("params", {})), float(d.get("alpha", 1.0)),
                           float(d.get("persistence", 0.0)))
    elif model == "inhom":
        spec = make_inhom_schedule(float(d["target"]), d["q1"])
    else:
        raise ValueError(f"unknown model {model!r}")
    return apply_sparse_scaling(spec, scale) if scale != 1.0 else spec


def write_sidecar(graph: Graph, spec, path) -> None:
    """JSON metadata next to an edge-list file."""
    doc = {"n": graph.n, "spec": spec_to_dict(spec), **graph.meta}
    if graph.labels is not None:
        doc["labels"] = [int(x) for x in graph.labels]
    if isinstance(spec, CsbmParams):
        doc["theta_blocks"] = spec.block_matrix.tolist()
    elif isinstance(spec, MecltgParams):
        doc["theta_blocks"] = [[spec.p]]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
