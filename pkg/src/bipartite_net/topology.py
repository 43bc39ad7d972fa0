"""Structural decomposition: continents, semidefinite paths, balancing sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .linalg import DEFAULT_TOL, Subspace, Tolerances, intersect_all
from .network import MatrixGraph, edge_key, path_edges

DEFAULT_MAX_PARTITION_NODES = 24
DEFAULT_MAX_PATHS = 10_000


class EnumerationLimitError(RuntimeError):
    pass


def underlying_graph(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL,
                     definite_only: bool = False) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(graph.nodes)
    G.add_edges_from(k for k, e in graph.edge_table(tol).items()
                     if e.definite or not definite_only)
    return G


def is_connected(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> bool:
    return nx.is_connected(underlying_graph(graph, tol))


@dataclass(frozen=True)
class Bipartition:
    """Split of ``1..N`` into ``V1`` (always holding node 1) and ``V2``."""

    n_nodes: int
    v2: frozenset[int]

    def __post_init__(self):
        if 1 in self.v2:
            raise ValueError("node 1 belongs to V1 by convention")
        if any(not 1 <= i <= self.n_nodes for i in self.v2):
            raise ValueError("V2 holds a label outside 1..N")

    @classmethod
    def from_signs(cls, signs: Sequence[int]) -> "Bipartition":
        """From a sign per node; flipped globally so that node 1 is positive."""
        signs = list(signs)
        ref = signs[0]
        return cls(len(signs), frozenset(i for i, s in enumerate(signs, 1) if s != ref))

    @classmethod
    def from_mask(cls, n_nodes: int, mask: int) -> "Bipartition":
        """Bit ``k`` of ``mask`` places node ``k + 2`` in ``V2``."""
        return cls(n_nodes, frozenset(k + 2 for k in range(n_nodes - 1) if mask >> k & 1))

    @property
    def v1(self) -> frozenset[int]:
        return frozenset(range(1, self.n_nodes + 1)) - self.v2

    @property
    def mask(self) -> int:
        return sum(1 << (i - 2) for i in self.v2)

    def sigma(self, node: int) -> int:
        return -1 if node in self.v2 else 1

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(self.sigma(i) for i in range(1, self.n_nodes + 1))


@dataclass(frozen=True)
class NbsRecord:
    """A nontrivial balancing set: the edges to negate and their common null space."""

    partition: Bipartition
    negation_edges: frozenset[tuple[int, int]]
    null_space: Subspace

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.negation_edges)


@dataclass(frozen=True)
class ContinentDecomposition:
    continents: tuple[frozenset[int], ...]
    islands: frozenset[int]
    # sign of each continent node relative to the continent's smallest label
    gauge: dict[int, int]
    tree_edges: tuple[frozenset[tuple[int, int]], ...]

    def continent_of(self, node: int) -> int | None:
        for k, K in enumerate(self.continents):
            if node in K:
                return k
        return None

    def representative(self, k: int) -> int:
        return min(self.continents[k])


def _tree_gauge(graph: MatrixGraph, nodes: Iterable[int], tol: Tolerances
                ) -> tuple[dict[int, int], set[tuple[int, int]]]:
    """Signs propagated along a BFS tree of definite edges from the smallest node."""
    nodes = set(nodes)
    table = graph.edge_table(tol)
    D = nx.Graph()
    D.add_nodes_from(nodes)
    D.add_edges_from(k for k, e in table.items() if e.definite and k[0] in nodes and k[1] in nodes)
    root = min(nodes)
    gauge = {root: 1}
    tree = set()
    for parent, child in nx.bfs_edges(D, root, sort_neighbors=sorted):
        gauge[child] = gauge[parent] * table[edge_key(parent, child)].sign
        tree.add(edge_key(parent, child))
    return gauge, tree


def decompose_continents(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL) -> ContinentDecomposition:
    """Continents are components of the definite-edge subgraph with at least one edge."""
    D = underlying_graph(graph, tol, definite_only=True)
    comps = [frozenset(c) for c in nx.connected_components(D) if len(c) > 1]
    comps.sort(key=min)
    gauge: dict[int, int] = {}
    trees = []
    for K in comps:
        g, tree = _tree_gauge(graph, K, tol)
        gauge.update(g)
        trees.append(frozenset(tree))
    covered = frozenset().union(*comps) if comps else frozenset()
    return ContinentDecomposition(tuple(comps), frozenset(graph.nodes) - covered, gauge, tuple(trees))


def internal_gauge_consistency(graph: MatrixGraph, continent: Iterable[int],
                               tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every definite cycle inside the continent is positive."""
    nodes = set(continent)
    gauge, tree = _tree_gauge(graph, nodes, tol)
    for k, e in graph.edge_table(tol).items():
        if e.definite and k[0] in nodes and k[1] in nodes and k not in tree:
            if e.sign != gauge[k[0]] * gauge[k[1]]:
                return False
    return True


def semidefinite_paths(graph: MatrixGraph, decomposition: ContinentDecomposition,
                       kl: int, km: int, max_len: int | None = None,
                       max_paths: int = DEFAULT_MAX_PATHS,
                       tol: Tolerances = DEFAULT_TOL) -> list[tuple[int, ...]]:
    """All simple all-semidefinite paths from continent ``kl`` to continent ``km``.

    Intermediate nodes must be islands. Paths are node tuples oriented from
    ``kl`` to ``km``, returned in lexicographic order.
    """
    if kl == km:
        raise ValueError("paths are enumerated between two distinct continents")
    if max_len is None:
        max_len = graph.n_nodes
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    table = graph.edge_table(tol)
    semi_adj: dict[int, list[int]] = {i: [] for i in graph.nodes}
    for (u, v), e in table.items():
        if not e.definite:
            semi_adj[u].append(v)
            semi_adj[v].append(u)
    for nbrs in semi_adj.values():
        nbrs.sort()
    source, target = decomposition.continents[kl], decomposition.continents[km]
    islands = decomposition.islands
    found: list[tuple[int, ...]] = []

    def walk(path: list[int]):
        if len(path) - 1 >= max_len:
            return
        for nxt in semi_adj[path[-1]]:
            if nxt in target:
                found.append(tuple(path + [nxt]))
                if len(found) > max_paths:
                    raise EnumerationLimitError(
                        f"more than {max_paths} semidefinite paths between continents "
                        f"{kl + 1} and {km + 1}; raise the cap with --max-paths")
            elif nxt in islands and nxt not in path:
                path.append(nxt)
                walk(path)
                path.pop()

    for start in sorted(source):
        walk([start])
    return sorted(found)


def is_structurally_balanced(graph: MatrixGraph, partition: Bipartition,
                             tol: Tolerances = DEFAULT_TOL) -> bool:
    return not inconsistent_edges(graph, partition, tol)


def inconsistent_edges(graph: MatrixGraph, partition: Bipartition,
                       tol: Tolerances = DEFAULT_TOL) -> frozenset[tuple[int, int]]:
    """Edges whose sign disagrees with the partition's balanced pattern."""
    return frozenset(k for k, e in graph.edge_table(tol).items()
                     if e.sign != partition.sigma(k[0]) * partition.sigma(k[1]))


def nbs_for_partition(graph: MatrixGraph, partition: Bipartition,
                      tol: Tolerances = DEFAULT_TOL) -> NbsRecord | None:
    table = graph.edge_table(tol)
    bad = inconsistent_edges(graph, partition, tol)
    if any(table[k].definite for k in bad):
        return None
    null = intersect_all((table[k].null for k in sorted(bad)), graph.block_dim, tol)
    if null.dim == 0:
        return None
    return NbsRecord(partition, bad, null)


def find_all_nbs(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL,
                 max_nodes: int = DEFAULT_MAX_PARTITION_NODES) -> list[NbsRecord]:
    """Every partition (node 1 in V1) that admits a nontrivial balancing set.

    Exhaustive over ``2**(N-1)`` partitions, sorted by partition mask.
    """
    N = graph.n_nodes
    if N > max_nodes:
        raise EnumerationLimitError(
            f"{N} nodes exceeds the partition enumeration cap of {max_nodes}; "
            f"raise it with --max-partitions")
    table = graph.edge_table(tol)
    definite = [(u - 1, v - 1, e.sign) for (u, v), e in table.items() if e.definite]
    records = []
    for mask in range(1 << (N - 1)):
        # cheap rejection: node k (0-based, k>=1) is in V2 iff bit k-1 is set
        if definite:
            bits = (mask << 1)
            if any(e_sign != (1 if ((bits >> u) ^ (bits >> v)) & 1 == 0 else -1)
                   for u, v, e_sign in definite):
                continue
        rec = nbs_for_partition(graph, Bipartition.from_mask(N, mask), tol)
        if rec is not None:
            records.append(rec)
    return records
