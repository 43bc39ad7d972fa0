"""Sufficient conditions for bipartite consensus on weakly connected networks.

The checker is one-directional: a failed condition yields ``Undetermined``,
never a claim that consensus is impossible.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .linalg import (DEFAULT_TOL, Subspace, Tolerances, bases_independent, intersect,
                     intersect_all, matrix_nullity, minkowski_sum)
from .network import MatrixGraph, edge_key, path_edges, path_null, path_sign
from .topology import (DEFAULT_MAX_PARTITION_NODES, DEFAULT_MAX_PATHS, ContinentDecomposition,
                       NbsRecord, decompose_continents, find_all_nbs, is_connected,
                       semidefinite_paths)

BIPARTITE_PREDICTED = "BipartitePredicted"
UNDETERMINED = "Undetermined"


class Relation(enum.Enum):
    DIFFERENCE = "I"   # x_l - x_m in null(P)
    SUM = "II"         # x_l + x_m in null(P)


@dataclass(frozen=True)
class PathClass:
    path: tuple[int, ...]
    relation: Relation
    sign: int
    nbs_edges: tuple[tuple[int, int], ...]

    @property
    def contains_nbs_edge(self) -> bool:
        return bool(self.nbs_edges)


@dataclass
class Verdict:
    passed: bool | None            # None: not evaluated
    diagnostics: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.passed)

    @property
    def label(self) -> str:
        return {True: "pass", False: "fail", None: "not evaluated"}[self.passed]


def fmt_path(path: Sequence[int]) -> str:
    return "-".join(str(i) for i in path)


def fmt_vectors(S: Subspace, digits: int = 4) -> str:
    if S.dim == 0:
        return "{0}"
    cols = []
    for v in S.basis.T:
        k = int(np.argmax(np.abs(v)))
        v = v / v[k] if abs(v[k]) > 0 else v
        cols.append("[" + " ".join(f"{x:.{digits}g}" for x in v + 0.0) + "]")
    return "span{" + ", ".join(cols) + "}"


def pair_paths(graph: MatrixGraph, decomposition: ContinentDecomposition,
               max_len: int | None = None, max_paths: int = DEFAULT_MAX_PATHS,
               tol: Tolerances = DEFAULT_TOL) -> dict[tuple[int, int], list[tuple[int, ...]]]:
    """Semidefinite paths for every continent pair ``l < m`` that has at least one."""
    out = {}
    for l, m in combinations(range(len(decomposition.continents)), 2):
        paths = semidefinite_paths(graph, decomposition, l, m, max_len, max_paths, tol)
        if paths:
            out[(l, m)] = paths
    return out


def continent_null_spaces(graph: MatrixGraph, decomposition: ContinentDecomposition,
                          tol: Tolerances = DEFAULT_TOL,
                          max_nodes: int = DEFAULT_MAX_PARTITION_NODES
                          ) -> tuple[list[Subspace | None], list[NbsRecord | None], list[str]]:
    """NBS null space of every continent's induced subgraph.

    Entries are ``None`` when a continent lacks a unique NBS of its own.
    """
    spaces, records, notes = [], [], []
    for k, K in enumerate(decomposition.continents):
        sub, relabel = graph.induced(K)
        found = find_all_nbs(sub, tol, max_nodes)
        if len(found) != 1:
            spaces.append(None)
            records.append(None)
            notes.append(f"continent K{k + 1} has {len(found)} NBS records (expected exactly one)")
            continue
        rec = found[0]
        back = {new: old for old, new in relabel.items()}
        mapped = NbsRecord(rec.partition,
                           frozenset(edge_key(back[a], back[b]) for a, b in rec.negation_edges),
                           rec.null_space)
        spaces.append(rec.null_space)
        records.append(mapped)
    return spaces, records, notes


def _relative_gauge(decomposition: ContinentDecomposition, node: int, rep: int) -> int:
    return decomposition.gauge[node] * decomposition.gauge[rep]


def classify_paths(graph: MatrixGraph, decomposition: ContinentDecomposition, nbs: NbsRecord,
                   kl: int, km: int, paths: Sequence[Sequence[int]],
                   representatives: tuple[int, int] | None = None,
                   tol: Tolerances = DEFAULT_TOL) -> list[PathClass]:
    """Assign each path the relation it imposes between the two representatives.

    The chained edge relation ``x_a - sgn(P) x_b in null(P)`` between the
    endpoints is moved onto the representatives (smallest labels unless given)
    with the continent-internal gauge, giving a difference (type I) or a sum
    (type II).
    """
    Kl, Km = decomposition.continents[kl], decomposition.continents[km]
    rl, rm = representatives or (min(Kl), min(Km))
    if rl not in Kl or rm not in Km:
        raise ValueError(f"representatives {rl}, {rm} are not in continents K{kl + 1}, K{km + 1}")
    out = []
    for path in paths:
        path = tuple(path)
        a, b = path[0], path[-1]
        if a in Km and b in Kl:
            a, b = b, a
        if a not in Kl or b not in Km:
            raise ValueError(f"path {fmt_path(path)} does not join K{kl + 1} and K{km + 1}")
        s = path_sign(path, graph, tol)
        c = _relative_gauge(decomposition, a, rl) * s * _relative_gauge(decomposition, b, rm)
        touched = tuple(edge_key(u, v) for u, v in path_edges(path)
                        if edge_key(u, v) in nbs.negation_edges)
        out.append(PathClass(path, Relation.DIFFERENCE if c == 1 else Relation.SUM, s, touched))
    return out


def check_condition1(graph: MatrixGraph, decomposition: ContinentDecomposition, nbs: NbsRecord,
                     tol: Tolerances = DEFAULT_TOL,
                     paths: dict[tuple[int, int], list] | None = None,
                     continent_spaces: Sequence[Subspace | None] | None = None) -> Verdict:
    """Exactly one relation class meets ``span(B_Kl ∪ B_Km)`` trivially, for every pair."""
    if paths is None:
        paths = pair_paths(graph, decomposition, tol=tol)
    if continent_spaces is None:
        continent_spaces, _, _ = continent_null_spaces(graph, decomposition, tol)
    d = graph.block_dim
    verdict = Verdict(True)
    for (l, m), plist in sorted(paths.items()):
        Bl, Bm = continent_spaces[l], continent_spaces[m]
        if Bl is None or Bm is None:
            verdict.passed = False
            verdict.diagnostics.append(f"K{l + 1}-K{m + 1}: a continent lacks its own unique NBS")
            continue
        S = minkowski_sum(Bl, Bm, tol)
        classes = classify_paths(graph, decomposition, nbs, l, m, plist, tol=tol)
        dims = {}
        for rel in Relation:
            members = [pc.path for pc in classes if pc.relation is rel]
            inter = intersect_all((path_null(p, graph, tol) for p in members), d, tol)
            dims[rel] = (members, intersect(S, inter, tol))
        trivial = [rel for rel in Relation if dims[rel][1].dim == 0]
        ok = len(trivial) == 1
        parts = []
        for rel in Relation:
            members, inter = dims[rel]
            names = ", ".join(fmt_path(p) for p in members) or "none"
            parts.append(f"type {rel.value} [{names}] meets S in dim {inter.dim}")
        verdict.diagnostics.append(f"K{l + 1}-K{m + 1}: " + "; ".join(parts)
                                   + ("" if ok else " -> need exactly one trivial class"))
        if not ok:
            verdict.passed = False
    return verdict


def check_condition2(paths: dict[tuple[int, int], list[tuple[int, ...]]]) -> Verdict:
    """Paths joining the same continent pair share no intermediate node."""
    verdict = Verdict(True)
    for (l, m), plist in sorted(paths.items()):
        for p, q in combinations(plist, 2):
            shared = set(p[1:-1]) & set(q[1:-1])
            if shared:
                verdict.passed = False
                verdict.diagnostics.append(
                    f"K{l + 1}-K{m + 1}: paths {fmt_path(p)} and {fmt_path(q)} share "
                    f"intermediate node(s) {sorted(shared)}")
    return verdict


def check_condition3(paths: dict[tuple[int, int], list[tuple[int, ...]]], graph: MatrixGraph,
                     tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Edge null-space bases along every path are linearly independent."""
    verdict = Verdict(True)
    for (l, m), plist in sorted(paths.items()):
        for p in plist:
            bases = [graph.edge(u, v, tol).null for u, v in path_edges(p)]
            if not bases_independent(bases, tol):
                verdict.passed = False
                verdict.diagnostics.append(
                    f"K{l + 1}-K{m + 1}: edge null bases on path {fmt_path(p)} are dependent")
    return verdict


def check_condition4(graph: MatrixGraph, paths: dict[tuple[int, int], list[tuple[int, ...]]],
                     nbs: NbsRecord, continent_spaces: Sequence[Subspace | None],
                     tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """For paths crossing the NBS, off-NBS edge null bases and ``B_Kl ∩ B_Km`` are independent.

    A path with two or more NBS edges falls outside the single-edge case the
    condition covers and is reported as a failure.
    """
    verdict = Verdict(True)
    for (l, m), plist in sorted(paths.items()):
        Bl, Bm = continent_spaces[l], continent_spaces[m]
        for p in plist:
            edges = [edge_key(u, v) for u, v in path_edges(p)]
            in_nbs = [e for e in edges if e in nbs.negation_edges]
            if not in_nbs:
                continue
            if len(in_nbs) > 1:
                verdict.passed = False
                verdict.diagnostics.append(
                    f"K{l + 1}-K{m + 1}: path {fmt_path(p)} holds {len(in_nbs)} NBS edges")
                continue
            if Bl is None or Bm is None:
                verdict.passed = False
                verdict.diagnostics.append(f"K{l + 1}-K{m + 1}: a continent lacks its own unique NBS")
                continue
            common = intersect(Bl, Bm, tol)
            bases = [graph.edge(*e, tol).null for e in edges if e not in nbs.negation_edges]
            if common.dim:
                bases.append(common)
            ok = bases_independent(bases, tol)
            verdict.diagnostics.append(
                f"K{l + 1}-K{m + 1}: path {fmt_path(p)} crosses NBS edge {in_nbs[0]}; "
                f"off-NBS null bases with B_K{l + 1} ∩ B_K{m + 1} = {fmt_vectors(common)} are "
                + ("independent" if ok else "dependent"))
            if not ok:
                verdict.passed = False
    return verdict


def check_coverage(decomposition: ContinentDecomposition,
                   paths: dict[tuple[int, int], list[tuple[int, ...]]]) -> Verdict:
    """The network must split into continents and the semidefinite paths between them."""
    if not decomposition.continents:
        return Verdict(False, ["no continent: the network has no definite edge"])
    on_path = set()
    for plist in paths.values():
        for p in plist:
            on_path.update(p[1:-1])
    stray = sorted(decomposition.islands - on_path)
    if stray:
        return Verdict(False, [f"island node(s) {stray} lie on no semidefinite path between continents"])
    return Verdict(True)


@dataclass
class ConditionReport:
    connected: bool
    coverage: Verdict
    assumption1: Verdict
    nbs_records: list[NbsRecord]
    cond1: Verdict
    cond2: Verdict
    cond3: Verdict
    cond4: Verdict
    decomposition: ContinentDecomposition
    paths: dict[tuple[int, int], list[tuple[int, ...]]]
    continent_spaces: list[Subspace | None]
    continent_records: list[NbsRecord | None]
    path_classes: dict[tuple[int, int], list[PathClass]]

    @property
    def unique_nbs(self) -> NbsRecord | None:
        return self.nbs_records[0] if len(self.nbs_records) == 1 else None

    @property
    def reasons(self) -> list[str]:
        if not self.connected:
            return ["disconnected"]   # nothing else is meaningful on a disconnected graph
        out = []
        if not self.coverage:
            out.append("coverage")
        if not self.assumption1:
            out.append("assumption1")
        for k, v in enumerate((self.cond1, self.cond2, self.cond3, self.cond4), start=1):
            if not v:
                out.append(f"cond{k}")
        return out

    @property
    def overall(self) -> str:
        return UNDETERMINED if self.reasons else BIPARTITE_PREDICTED

    @property
    def predicted(self) -> bool:
        return not self.reasons


def full_report(graph: MatrixGraph, tol: Tolerances = DEFAULT_TOL,
                max_partitions: int = DEFAULT_MAX_PARTITION_NODES,
                max_paths: int = DEFAULT_MAX_PATHS,
                max_len: int | None = None) -> ConditionReport:
    graph.checked(tol)
    connected = is_connected(graph, tol)
    decomposition = decompose_continents(graph, tol)
    paths = pair_paths(graph, decomposition, max_len, max_paths, tol)
    records = find_all_nbs(graph, tol, max_partitions)
    spaces, crecords, notes = continent_null_spaces(graph, decomposition, tol, max_partitions)
    coverage = check_coverage(decomposition, paths)

    if len(records) == 1:
        assumption1 = Verdict(True, [f"unique NBS {records[0].sorted_edges()}"])
    else:
        assumption1 = Verdict(False, [f"{len(records)} NBS records found (need exactly one)"])
    nbs = records[0] if len(records) == 1 else None
    if nbs is not None:
        for k, rec in enumerate(crecords):
            if rec is None:
                continue
            K = sorted(decomposition.continents[k])
            sub_side = {node: rec.partition.sigma(i) for i, node in enumerate(K, 1)}
            ref = nbs.partition.sigma(K[0])
            if any(nbs.partition.sigma(node) != ref * s for node, s in sub_side.items()):
                notes.append(f"continent K{k + 1}: its NBS partition disagrees with the global one")

    cond2 = check_condition2(paths)
    cond3 = check_condition3(paths, graph, tol)
    classes = {}
    if nbs is not None:
        cond1 = check_condition1(graph, decomposition, nbs, tol, paths, spaces)
        cond4 = check_condition4(graph, paths, nbs, spaces, tol)
        classes = {pair: classify_paths(graph, decomposition, nbs, *pair, plist, tol=tol)
                   for pair, plist in paths.items()}
    else:
        cond1 = Verdict(None, ["requires a unique NBS"])
        cond4 = Verdict(None, ["requires a unique NBS"])
    cond1.diagnostics.extend(notes)
    return ConditionReport(connected, coverage, assumption1, records, cond1, cond2, cond3, cond4,
                           decomposition, paths, spaces, crecords, classes)


# --- block-matrix nullity oracles for a single semidefinite path ---------------------------

@dataclass(frozen=True)
class GammaResult:
    case: int
    nullity: int
    expected: int
    relation_sign: int


def _path_blocks(graph: MatrixGraph, path: Sequence[int], tol: Tolerances):
    edges = path_edges(path)
    data = [graph.edge(u, v, tol) for u, v in edges]
    return data, [e.sign for e in data]


def gamma0(graph: MatrixGraph, path: Sequence[int], endpoint_space: Subspace, s: int,
           tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Constraint matrix on the stacked path states ``[x_1; ...; x_{rho+1}]``.

    Rows: endpoint restriction to ``endpoint_space``, the endpoint relation
    ``x_1 = s x_{rho+1}``, then ``|A_i| (x_i - s_i x_{i+1}) = 0`` per edge.
    """
    d = graph.block_dim
    data, signs = _path_blocks(graph, path, tol)
    rho = len(data)
    I = np.eye(d)
    G = np.zeros(((rho + 2) * d, (rho + 1) * d))
    G[0:d, 0:d] = endpoint_space.complement_projector()
    G[d:2 * d, 0:d] = I
    G[d:2 * d, rho * d:(rho + 1) * d] = -s * I
    for i, (e, si) in enumerate(zip(data, signs)):
        r = (i + 2) * d
        G[r:r + d, i * d:(i + 1) * d] = e.magnitude
        G[r:r + d, (i + 1) * d:(i + 2) * d] = -si * e.magnitude
    return G


def gamma0_bar(graph: MatrixGraph, path: Sequence[int], endpoint_space: Subspace,
               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Reduced form used for a path crossing one NBS edge (cross-check only)."""
    d = graph.block_dim
    data, signs = _path_blocks(graph, path, tol)
    rho = len(data)
    alpha = np.cumprod(signs)
    I = np.eye(d)
    G = np.zeros(((rho + 2) * d, (rho + 1) * d))
    G[0:d, 0:d] = 2 * I
    for i in range(1, rho + 1):
        coef = alpha[i - 1] if i < rho else -alpha[rho - 1]
        G[0:d, i * d:(i + 1) * d] = coef * I
    G[d:2 * d, 0:d] = endpoint_space.complement_projector()
    for i, (e, si) in enumerate(zip(data, signs)):
        r = (i + 2) * d
        G[r:r + d, (i + 1) * d:(i + 2) * d] = -si * e.magnitude
    return G


def path_constraint_system(graph: MatrixGraph, path: Sequence[int], endpoint_space: Subspace,
                           s: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Laplacian of the path subgraph stacked with the same endpoint constraints.

    Independent of :func:`gamma0`: it goes through the Laplacian rather than
    through the edgewise null conditions.
    """
    d = graph.block_dim
    nodes = list(path)
    idx = {node: k for k, node in enumerate(nodes)}
    n = len(nodes)
    L = np.zeros((n * d, n * d))
    for u, v in path_edges(path):
        e = graph.edge(u, v, tol)
        i, j = idx[u] * d, idx[v] * d
        L[i:i + d, i:i + d] += e.magnitude
        L[j:j + d, j:j + d] += e.magnitude
        L[i:i + d, j:j + d] -= e.weight
        L[j:j + d, i:i + d] -= e.weight
    E = np.zeros((2 * d, n * d))
    E[0:d, 0:d] = endpoint_space.complement_projector()
    E[d:2 * d, 0:d] = np.eye(d)
    E[d:2 * d, (n - 1) * d:n * d] = -s * np.eye(d)
    return np.vstack([L, E])


def gamma_nullity_oracle(graph: MatrixGraph, path: Sequence[int], endpoint_space: Subspace,
                         nbs: NbsRecord, tol: Tolerances = DEFAULT_TOL) -> GammaResult:
    """Nullity of the path constraint system and the value Conditions (3)-(4) predict.

    With no NBS edge on the path the endpoints obey ``x_1 = sgn(P) x_end`` and
    the prediction is ``dim(endpoint_space)``; with one NBS edge ``A_n`` they
    obey ``x_1 = -sgn(P) x_end`` and the prediction is
    ``dim(endpoint_space ∩ null(A_n))``.
    """
    edges = [edge_key(u, v) for u, v in path_edges(path)]
    hits = [e for e in edges if e in nbs.negation_edges]
    sgn = path_sign(path, graph, tol)
    if len(hits) > 1:
        raise ValueError(f"path {fmt_path(path)} crosses {len(hits)} NBS edges; at most one is supported")
    if not hits:
        s, case, expected = sgn, 1, endpoint_space.dim
    else:
        s, case = -sgn, 2
        expected = intersect(endpoint_space, graph.edge(*hits[0], tol).null, tol).dim
    nullity = matrix_nullity(gamma0(graph, path, endpoint_space, s, tol), tol)
    return GammaResult(case, nullity, expected, s)
