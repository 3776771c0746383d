"""Latent edge orderings, adjacency containers and the edge-list file format.

Nodes are 1-based in every public function and file; numpy arrays are
0-based internally. An ordering is stored as its inverse, an ``(N, 2)``
array of 0-based ``(i, j)`` pairs with ``i < j`` listed in chain order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InvalidSizeError

ORDERING_KINDS = ("omega1", "omega2", "pa", "random", "explicit")


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def row_major_position(i, j, n):
    """Row-major position of the pair ``i < j`` (1-based in and out)."""
    return n * (i - 1) - i * (i - 1) // 2 + j - i


def diagonal_position(i, j, n):
    """Diagonal-by-diagonal position of the pair ``i < j``."""
    d = j - i
    return i + (2 * n - d) * (d - 1) // 2


def arrival_position(i, j, n=None):
    """Node-arrival position of the pair ``i < j``."""
    return (j - 1) * (j - 2) // 2 + i


_POSITION_MAPS = {"omega1": row_major_position, "omega2": diagonal_position, "pa": arrival_position}


def _upper_pairs(n: int) -> np.ndarray:
    iu, ju = np.triu_indices(n, 1)
    return np.column_stack([iu, ju]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Ordering:
    """Bijection between unordered node pairs and chain positions ``1..num_pairs``."""

    n: int
    kind: str
    pairs: np.ndarray
    seed: int | None = None
    _position: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        n = self.n
        if n < 2:
            raise InvalidSizeError(f"ordering needs n >= 2, got {n}")
        N = num_pairs(n)
        if pairs.shape != (N, 2):
            raise InvalidSizeError(f"expected {N} pairs for n={n}, got shape {pairs.shape}")
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if lo.min() < 0 or hi.max() >= n or np.any(lo == hi):
            raise ValueError("pairs must be distinct nodes in [0, n)")
        position = np.full((n, n), -1, dtype=np.int64)
        position[lo, hi] = np.arange(N)
        position[hi, lo] = np.arange(N)
        if np.count_nonzero(position >= 0) != 2 * N:
            raise ValueError("pairs are not a bijection onto the unordered pairs")
        pairs = np.column_stack([lo, hi])
        pairs.setflags(write=False)
        position.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "_position", position)

    @property
    def num_pairs(self) -> int:
        return num_pairs(self.n)

    @property
    def positions(self) -> np.ndarray:
        """``n x n`` matrix of 0-based chain positions (``-1`` on the diagonal)."""
        return self._position

    def forward(self, i: int, j: int) -> int:
        """Chain position (1-based) of the pair ``{i, j}`` (1-based nodes)."""
        if i == j:
            raise ValueError("self-pairs have no chain position")
        return int(self._position[i - 1, j - 1]) + 1

    def inverse(self, s: int) -> tuple[int, int]:
        """1-based pair ``(i, j)``, ``i < j``, at 1-based chain position ``s``."""
        i, j = self.pairs[s - 1]
        return int(i) + 1, int(j) + 1

    def __eq__(self, other):
        if not isinstance(other, Ordering):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.pairs, other.pairs)

    def __hash__(self):
        return hash((self.n, self.pairs.tobytes()))


def make_ordering(kind: str, n: int, seed: int | None = None,
                  pairs: Iterable[tuple[int, int]] | None = None) -> Ordering:
    """Build one of the named orderings.

    ``omega1`` generates node 1's pairs first, then node 2's, and so on.
    ``omega2`` walks the diagonals ``j - i = 1, 2, ...``. ``pa`` is the
    node-arrival order. ``random`` shuffles the ``omega1`` enumeration with
    a seeded Fisher-Yates permutation. ``explicit`` takes 1-based ``pairs``
    in chain order.
    """
    if n < 2:
        raise InvalidSizeError(f"ordering needs n >= 2, got {n}")
    if kind not in ORDERING_KINDS:
        raise ValueError(f"unknown ordering kind {kind!r}")
    if (seed is not None) != (kind == "random"):
        raise ValueError("seed is required for, and only for, kind='random'")

    if kind == "explicit":
        if pairs is None:
            raise ValueError("kind='explicit' needs pairs")
        arr = np.asarray(list(pairs), dtype=np.int64) - 1
        return Ordering(n, kind, arr)

    base = _upper_pairs(n)
    if kind == "random":
        perm = np.random.default_rng(seed).permutation(len(base))
        return Ordering(n, kind, base[perm], seed=seed)

    s = _POSITION_MAPS[kind](base[:, 0] + 1, base[:, 1] + 1, n) - 1
    inv = np.empty_like(base)
    inv[s] = base
    return Ordering(n, kind, inv)


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with optional generation metadata."""

    adjacency: np.ndarray
    ordering: Ordering | None = None
    labels: np.ndarray | None = None  # 1-based group per node
    theta: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        A = np.asarray(self.adjacency)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidSizeError("adjacency must be square")
        if not np.isin(A, (0, 1)).all():
            raise ValueError("adjacency must be binary")
        A = A.astype(np.uint8)
        if not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(A)):
            raise ValueError("adjacency must have an empty diagonal")
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        if self.ordering is not None and self.ordering.n != A.shape[0]:
            raise InvalidSizeError("ordering size does not match the graph")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class EdgeChain:
    """Ordered edge variables ``B_1..B_N``."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8)
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        if not isinstance(other, EdgeChain):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None


def chain_from_graph(graph: Graph, ordering: Ordering) -> EdgeChain:
    if ordering.n != graph.n:
        raise InvalidSizeError(f"ordering is for n={ordering.n}, graph has n={graph.n}")
    p = ordering.pairs
    return EdgeChain(graph.adjacency[p[:, 0], p[:, 1]])


def adjacency_from_bits(bits: np.ndarray, ordering: Ordering) -> np.ndarray:
    n = ordering.n
    if len(bits) != ordering.num_pairs:
        raise InvalidSizeError(f"chain length {len(bits)} != {ordering.num_pairs} for n={n}")
    A = np.zeros((n, n), dtype=np.uint8)
    p = ordering.pairs
    A[p[:, 0], p[:, 1]] = bits
    A[p[:, 1], p[:, 0]] = bits
    return A


def graph_from_chain(chain: EdgeChain | np.ndarray, ordering: Ordering, n: int | None = None,
                     **meta) -> Graph:
    bits = chain.bits if isinstance(chain, EdgeChain) else np.asarray(chain)
    if n is not None and n != ordering.n:
        raise InvalidSizeError(f"ordering is for n={ordering.n}, requested n={n}")
    return Graph(adjacency_from_bits(bits, ordering), ordering=ordering, **meta)


def empty_graph(n: int) -> Graph:
    return Graph(np.zeros((n, n), dtype=np.uint8))


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph on ``n`` nodes from 1-based edge pairs."""
    A = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop at node {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"edge ({i}, {j}) outside 1..{n}")
        A[i - 1, j - 1] = A[j - 1, i - 1] = 1
    return Graph(A)


def edge_list(graph: Graph) -> list[tuple[int, int]]:
    iu, ju = np.nonzero(np.triu(graph.adjacency, 1))
    return [(int(i) + 1, int(j) + 1) for i, j in zip(iu, ju)]


def write_edge_list(graph: Graph, path) -> None:
    lines = [f"n {graph.n}"]
    lines += [f"{i} {j}" for i, j in edge_list(graph)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> Graph:
    """Parse ``n <count>`` followed by ``<i> <j>`` lines; ``#`` starts a comment."""
    n = None
    edges = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 2 or tokens[0] != "n":
                raise ValueError(f"{path}:{lineno}: expected header 'n <count>'")
            n = int(tokens[1])
            continue
        if len(tokens) != 2:
            raise ValueError(f"{path}:{lineno}: expected '<i> <j>'")
        edges.append((int(tokens[0]), int(tokens[1])))
    if n is None:
        raise ValueError(f"{path}: missing 'n <count>' header")
    return graph_from_edges(n, edges)


def read_labels(path, n: int) -> np.ndarray:
    """Read ``node group`` lines (both 1-based) into a length-``n`` label array."""
    labels = np.zeros(n, dtype=np.int64)
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        node, group = (int(t) for t in line.split())
        labels[node - 1] = group
    if np.any(labels < 1):
        missing = np.flatnonzero(labels < 1) + 1
        raise ValueError(f"labels missing for nodes {missing[:10].tolist()}")
    return labels
