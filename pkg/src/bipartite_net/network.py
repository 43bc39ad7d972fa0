"""Matrix-weighted graphs, their Laplacian and path-level quantities.

Nodes carry 1-based labels ``1..N``; the block of node ``i`` inside a
stacked state vector starts at row ``(i - 1) * d``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .linalg import (DEFAULT_TOL, SignClass, Subspace, Tolerances, classify_sign,
                     null_basis, sum_all)


class GraphValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid network: " + "; ".join(self.violations))


class PathError(ValueError):
    pass


class EdgeKind(enum.Enum):
    DEFINITE_POSITIVE = "definite+"
    DEFINITE_NEGATIVE = "definite-"
    SEMIDEFINITE_POSITIVE = "semidefinite+"
    SEMIDEFINITE_NEGATIVE = "semidefinite-"

    @property
    def definite(self) -> bool:
        return self in (EdgeKind.DEFINITE_POSITIVE, EdgeKind.DEFINITE_NEGATIVE)


class EdgeData(NamedTuple):
    u: int
    v: int
    weight: np.ndarray
    sign: int
    magnitude: np.ndarray
    null: Subspace
    kind: EdgeKind

    @property
    def definite(self) -> bool:
        return self.kind.definite


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class MatrixGraph:
    """Undirected graph whose edges carry symmetric ``d x d`` weights.

    ``edges`` is kept exactly as given so that :func:`validate` can report
    self-loops or duplicates; analysis functions call :meth:`checked` and
    refuse invalid graphs.
    """

    n_nodes: int
    block_dim: int
    edges: tuple[tuple[int, int, np.ndarray], ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, n_nodes: int, block_dim: int,
                   edges: Iterable[tuple[int, int, object]]) -> "MatrixGraph":
        stored = []
        for u, v, W in edges:
            A = np.array(W, dtype=float)
            A.setflags(write=False)
            stored.append((int(u), int(v), A))
        return cls(int(n_nodes), int(block_dim), tuple(stored))

    @property
    def nodes(self) -> range:
        return range(1, self.n_nodes + 1)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"MatrixGraph(n_nodes={self.n_nodes}, block_dim={self.block_dim}, n_edges={self.n_edges})"

    def checked(self, tol: Tolerances = DEFAULT_TOL) -> "MatrixGraph":
        problems = validate(self, tol)
        if problems:
            raise GraphValidationError(problems)
        return self

    def edge_table(self, tol: Tolerances = DEFAULT_TOL) -> dict[tuple[int, int], EdgeData]:
        """Per-edge sign, magnitude and null space keyed by ``(min, max)``."""
        key = ("edges", tol)
        if key not in self._cache:
            self.checked(tol)
            table = {}
            for u, v, W in self.edges:
                cls, mag = classify_sign(W, tol)
                null = null_basis(mag, tol)
                positive = cls is SignClass.POSITIVE
                if null.dim == 0:
                    kind = EdgeKind.DEFINITE_POSITIVE if positive else EdgeKind.DEFINITE_NEGATIVE
                else:
                    kind = EdgeKind.SEMIDEFINITE_POSITIVE if positive else EdgeKind.SEMIDEFINITE_NEGATIVE
                a, b = edge_key(u, v)
                table[(a, b)] = EdgeData(a, b, W, cls.sign, mag, null, kind)
            self._cache[key] = dict(sorted(table.items()))
        return self._cache[key]

    def edge(self, u: int, v: int, tol: Tolerances = DEFAULT_TOL) -> EdgeData:
        try:
            return self.edge_table(tol)[edge_key(u, v)]
        except KeyError:
            raise PathError(f"({u},{v}) is not an edge of the network") from None

    def has_edge(self, u: int, v: int, tol: Tolerances = DEFAULT_TOL) -> bool:
        return edge_key(u, v) in self.edge_table(tol)

    def neighbors(self, u: int, tol: Tolerances = DEFAULT_TOL) -> list[int]:
        return sorted(b if a == u else a for (a, b) in self.edge_table(tol) if u in (a, b))

    def with_weights(self, replacements: dict[tuple[int, int], object]) -> "MatrixGraph":
        """Copy of the graph with some edge weights replaced (keys in any order)."""
        repl = {edge_key(*k): v for k, v in replacements.items()}
        missing = set(repl) - {edge_key(u, v) for u, v, _ in self.edges}
        if missing:
            raise PathError(f"edges not in graph: {sorted(missing)}")
        return MatrixGraph.from_edges(
            self.n_nodes, self.block_dim,
            [(u, v, repl.get(edge_key(u, v), W)) for u, v, W in self.edges])

    def with_edges(self, extra: Iterable[tuple[int, int, object]]) -> "MatrixGraph":
        return MatrixGraph.from_edges(self.n_nodes, self.block_dim, list(self.edges) + list(extra))

    def negated(self, edges: Iterable[tuple[int, int]]) -> "MatrixGraph":
        """Copy with the signs of the given edge weights flipped."""
        flip = {edge_key(*e) for e in edges}
        return MatrixGraph.from_edges(
            self.n_nodes, self.block_dim,
            [(u, v, -W if edge_key(u, v) in flip else W) for u, v, W in self.edges])

    def induced(self, nodes: Iterable[int]) -> tuple["MatrixGraph", dict[int, int]]:
        """Induced subgraph relabelled ``1..k`` in ascending order, plus the label map."""
        keep = sorted(set(nodes))
        relabel = {old: new for new, old in enumerate(keep, start=1)}
        sub = [(relabel[u], relabel[v], W) for u, v, W in self.edges
               if u in relabel and v in relabel]
        return MatrixGraph.from_edges(len(keep), self.block_dim, sub), relabel


def validate(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> list[str]:
    """List every violated invariant; empty iff the graph is valid."""
    problems = []
    if graph.n_nodes < 1:
        problems.append(f"node count must be >= 1, got {graph.n_nodes}")
    if graph.block_dim < 1:
        problems.append(f"block dimension must be >= 1, got {graph.block_dim}")
    seen: set[tuple[int, int]] = set()
    d = graph.block_dim
    for u, v, W in graph.edges:
        name = f"edge ({u},{v})"
        if not (1 <= u <= graph.n_nodes and 1 <= v <= graph.n_nodes):
            problems.append(f"{name}: node label outside 1..{graph.n_nodes}")
        if u == v:
            problems.append(f"{name}: self-loop")
            continue
        key = edge_key(u, v)
        if key in seen:
            problems.append(f"{name}: duplicate of edge {key} (multi-edge)")
        seen.add(key)
        if W.shape != (d, d):
            problems.append(f"{name}: weight has shape {W.shape}, expected ({d}, {d})")
            continue
        if not np.all(np.isfinite(W)):
            problems.append(f"{name}: weight has non-finite entries")
            continue
        if not np.array_equal(W, W.T):
            problems.append(f"{name}: weight is not symmetric")
            continue
        cls, _ = classify_sign(W, tol)
        if cls is SignClass.INDEFINITE:
            problems.append(f"{name}: weight is indefinite")
        elif cls is SignClass.ZERO:
            problems.append(f"{name}: weight is zero (absent edges must be omitted)")
    return problems


def laplacian(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Block Laplacian ``L = C - A`` with ``C_i = sum_j |A_ij|``."""
    d, N = graph.block_dim, graph.n_nodes
    L = np.zeros((N * d, N * d))
    for (u, v), e in graph.edge_table(tol).items():
        i, j = (u - 1) * d, (v - 1) * d
        L[i:i + d, i:i + d] += e.magnitude
        L[j:j + d, j:j + d] += e.magnitude
        L[i:i + d, j:j + d] -= e.weight
        L[j:j + d, i:i + d] -= e.weight
    return L


def incidence_factorization(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL
                            ) -> tuple[np.ndarray, list[np.ndarray]]:
    """Signed incidence ``H`` and edge magnitudes with ``L = H^T blkdiag(|A_k|) H``.

    Edges are oriented lexicographically; block row ``k`` of ``H`` holds
    ``+I`` at the smaller endpoint and ``-sgn(A_k) I`` at the larger one.
    """
    d, N = graph.block_dim, graph.n_nodes
    table = graph.edge_table(tol)
    H = np.zeros((len(table) * d, N * d))
    blocks = []
    I = np.eye(d)
    for k, ((u, v), e) in enumerate(table.items()):
        H[k * d:(k + 1) * d, (u - 1) * d:u * d] = I
        H[k * d:(k + 1) * d, (v - 1) * d:v * d] = -e.sign * I
        blocks.append(e.magnitude)
    return H, blocks


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    if not blocks:
        return np.zeros((0, 0))
    return scipy.linalg.block_diag(*blocks)


def path_edges(path: Sequence[int]) -> list[tuple[int, int]]:
    """Consecutive node pairs of a node path, in traversal order."""
    if len(path) < 2:
        raise PathError("a path needs at least one edge")
    if len(set(path)) != len(path):
        raise PathError(f"path {tuple(path)} repeats a node")
    return [(path[i], path[i + 1]) for i in range(len(path) - 1)]


def path_sign(path: Sequence[int], graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> int:
    s = 1
    for u, v in path_edges(path):
        s *= graph.edge(u, v, tol).sign
    return s


def path_null(path: Sequence[int], graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Minkowski sum of the edge null spaces along the path."""
    spaces = [graph.edge(u, v, tol).null for u, v in path_edges(path)]
    return sum_all(spaces, graph.block_dim, tol)


def block_of(x: np.ndarray, node: int, d: int) -> np.ndarray:
    return x[(node - 1) * d:node * d]


def gauge_vector(signs: Sequence[int], v: np.ndarray) -> np.ndarray:
    """``D (1_N ⊗ v)`` for the per-node sign pattern ``signs``."""
    return np.kron(np.asarray(signs, dtype=float), np.asarray(v, dtype=float))
