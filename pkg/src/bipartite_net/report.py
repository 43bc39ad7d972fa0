"""Analysis documents, three-way verification and CSV output."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conditions import ConditionReport, Verdict, fmt_path, fmt_vectors, full_report
from .dynamics import (SimConfig, SimTrace, best_signs, detect_convergence, e_b,
                       integrate_laplacian)
from .linalg import DEFAULT_TOL, Tolerances
from .network import MatrixGraph, laplacian
from .spectral import BipartiteStructure, NullSpaceAnalysis, analyze_null, bipartite_structure
from .topology import DEFAULT_MAX_PARTITION_NODES, DEFAULT_MAX_PATHS, Bipartition

HORIZON_MIN, HORIZON_MAX = 50.0, 5000.0
HORIZON_DECAYS = 25.0      # e-foldings of the slowest mode
SIM_EB_THRESHOLD = 1e-5    # e_b below this at the horizon counts as bipartite consensus

_REASON_TEXT = {
    "disconnected": "disconnected",
    "coverage": "island coverage failed",
    "assumption1": "NBS not unique",
    "cond1": "Condition 1 failed",
    "cond2": "Condition 2 failed",
    "cond3": "Condition 3 failed",
    "cond4": "Condition 4 failed",
}


def fmt_set(nodes) -> str:
    return "{" + ",".join(str(i) for i in sorted(nodes)) + "}"


def auto_horizon(analysis: NullSpaceAnalysis) -> float:
    """Long enough for the slowest decaying mode to shrink by ``exp(-HORIZON_DECAYS)``."""
    lam = analysis.smallest_positive
    if lam is None:
        return HORIZON_MIN
    return float(min(HORIZON_MAX, max(HORIZON_MIN, HORIZON_DECAYS / lam)))


@dataclass
class Analysis:
    graph: MatrixGraph
    name: str
    conditions: ConditionReport
    L: np.ndarray
    null: NullSpaceAnalysis
    structure: BipartiteStructure

    @property
    def oracle_label(self) -> str:
        return "bipartite" if self.structure.is_bipartite else "not bipartite"


def analyze(graph: MatrixGraph, name: str = "network", tol: Tolerances = DEFAULT_TOL,
            max_partitions: int = DEFAULT_MAX_PARTITION_NODES,
            max_paths: int = DEFAULT_MAX_PATHS) -> Analysis:
    rep = full_report(graph, tol, max_partitions, max_paths)
    L = laplacian(graph, tol)
    null = analyze_null(L, graph.block_dim, tol)
    return Analysis(graph, name, rep, L, null, bipartite_structure(null, tol))


def summary_line(a: Analysis) -> str:
    rep = a.conditions
    if rep.predicted:
        head = rep.overall
    else:
        head = f"{rep.overall} ({', '.join(_REASON_TEXT[r] for r in rep.reasons)})"
    parts = [head, f"oracle: {a.oracle_label}"]
    part = None
    if rep.predicted:
        part = rep.unique_nbs.partition
    elif a.structure.is_bipartite:
        part = Bipartition.from_signs(a.structure.gauge)
    if part is not None:
        parts.append(f"partition V₂ = {fmt_set(part.v2)}")
    return "; ".join(parts)


def summary_text(a: Analysis) -> str:
    rep = a.conditions
    lines = [summary_line(a)]
    dec = rep.decomposition
    lines.append("continents: " + (", ".join(f"K{k + 1}={fmt_set(K)}"
                                            for k, K in enumerate(dec.continents)) or "none"))
    lines.append("islands: " + (fmt_set(dec.islands) if dec.islands else "none"))
    for pair, plist in sorted(rep.paths.items()):
        lines.append(f"paths K{pair[0] + 1}-K{pair[1] + 1}: " + ", ".join(fmt_path(p) for p in plist))
    for r in rep.nbs_records:
        lines.append(f"NBS {r.sorted_edges()} V₂ = {fmt_set(r.partition.v2)} "
                     f"null = {fmt_vectors(r.null_space)}")
    for label, v in _verdicts(rep):
        lines.append(f"{label}: {v.label}")
        lines.extend(f"    {d}" for d in v.diagnostics)
    lines.append(f"null(L) dimension {a.null.nullity}; smallest positive eigenvalue "
                 f"{a.null.smallest_positive if a.null.smallest_positive is not None else 'none'}")
    return "\n".join(lines)


def _verdicts(rep: ConditionReport):
    return [("connected", _bool_verdict(rep.connected)), ("island coverage", rep.coverage),
            ("unique NBS", rep.assumption1), ("Condition 1", rep.cond1),
            ("Condition 2", rep.cond2), ("Condition 3", rep.cond3), ("Condition 4", rep.cond4)]


def _bool_verdict(flag: bool) -> Verdict:
    return Verdict(bool(flag))


def _vec(v) -> list[float]:
    return [float(x) + 0.0 for x in np.asarray(v).ravel()]


def report_document(a: Analysis, settings: dict | None = None) -> dict:
    """Structured report; plain dicts and lists in a fixed key order."""
    rep, dec = a.conditions, a.conditions.decomposition
    nbs_docs = [{
        "edges": [list(e) for e in r.sorted_edges()],
        "v1": sorted(r.partition.v1),
        "v2": sorted(r.partition.v2),
        "null_dim": r.null_space.dim,
        "null_basis": [_vec(v) for v in r.null_space.basis.T],
    } for r in rep.nbs_records]
    classes = {}
    for pair, plist in sorted(rep.path_classes.items()):
        classes[f"K{pair[0] + 1}-K{pair[1] + 1}"] = [
            {"path": list(c.path), "type": c.relation.value, "sign": c.sign,
             "nbs_edges": [list(e) for e in c.nbs_edges]} for c in plist]
    return {
        "network": a.name,
        "nodes": a.graph.n_nodes,
        "block_dim": a.graph.block_dim,
        "edges": a.graph.n_edges,
        "settings": settings or {},
        "prediction": rep.overall,
        "reasons": rep.reasons,
        "topology": {
            "connected": rep.connected,
            "continents": [sorted(K) for K in dec.continents],
            "islands": sorted(dec.islands),
            "paths": {f"K{p[0] + 1}-K{p[1] + 1}": [list(x) for x in pl]
                      for p, pl in sorted(rep.paths.items())},
            "path_classes": classes,
        },
        "nbs": nbs_docs,
        "conditions": {label: {"result": v.label, "diagnostics": list(v.diagnostics)}
                       for label, v in _verdicts(rep)},
        "spectral": {
            "nullity": a.null.nullity,
            "eps": a.null.eps,
            "smallest_positive": a.null.smallest_positive,
            "bipartite": a.structure.is_bipartite,
            "gauge": list(a.structure.gauge) if a.structure.gauge else None,
            "residual": a.structure.residual if math.isfinite(a.structure.residual) else None,
        },
        "summary": summary_line(a),
    }


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --- three-way verification ----------------------------------------------------------------

@dataclass
class Trial:
    seed: int
    e_b: float
    signs: tuple[int, ...]
    converged: bool
    bipartite: bool


@dataclass
class Verification:
    analysis: Analysis
    t_final: float
    trials: list[Trial]
    sim_label: str
    problems: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.problems


def run_trials(a: Analysis, n_trials: int, seed: int, t_final: float | None = None,
               dt: float | None = None) -> tuple[float, list[Trial]]:
    N, d = a.graph.n_nodes, a.graph.block_dim
    horizon = auto_horizon(a.null) if t_final is None else t_final
    out = []
    for k in range(n_trials):
        s = seed + k
        tr = integrate_laplacian(a.L, N, d, SimConfig(t_final=horizon, dt=dt, seed=s,
                                                      record_every=50))
        signs = best_signs(tr.final, N, d)
        eb = float(e_b(tr.final, signs, N, d)[0])
        conv, _ = detect_convergence(tr, a.L)
        lead = float(np.linalg.norm(tr.final[:d]))
        out.append(Trial(s, eb, signs, conv, eb <= SIM_EB_THRESHOLD and lead > SIM_EB_THRESHOLD))
    return horizon, out


def verify(a: Analysis, n_trials: int = 20, seed: int = 0, t_final: float | None = None,
           dt: float | None = None) -> Verification:
    horizon, trials = run_trials(a, n_trials, seed, t_final, dt)
    problems = []
    if not trials:
        sim = "not run"
    elif all(t.bipartite for t in trials) and len({t.signs for t in trials}) == 1:
        sim = "bipartite"
    elif not any(t.bipartite for t in trials) and all(t.converged for t in trials):
        sim = "not bipartite"
    elif all(t.converged for t in trials):
        sim = "mixed"
        problems.append("simulated limits disagree across random starts")
    else:
        sim = "inconclusive"
    oracle = a.structure.is_bipartite
    rep = a.conditions
    if rep.predicted:
        if not oracle:
            problems.append("prediction is BipartitePredicted but the oracle finds no bipartite structure")
        elif a.structure.gauge != rep.unique_nbs.partition.signs:
            problems.append("oracle gauge differs from the predicted NBS partition")
        if sim in ("not bipartite", "mixed"):
            problems.append("prediction is BipartitePredicted but simulations do not reach bipartite consensus")
    if sim == "bipartite" and not oracle:
        problems.append("simulations reach bipartite consensus but the oracle does not")
    if sim == "not bipartite" and oracle:
        problems.append("oracle reports bipartite structure but simulations do not reach it")
    if sim == "bipartite" and oracle and trials[0].signs != a.structure.gauge:
        problems.append("simulated sign pattern differs from the oracle gauge")
    return Verification(a, horizon, trials, sim, problems)


def verification_text(v: Verification) -> str:
    a = v.analysis
    worst = max((t.e_b for t in v.trials), default=float("nan"))
    best = min((t.e_b for t in v.trials), default=float("nan"))
    lines = [
        f"prediction: {a.conditions.overall}"
        + (f" ({', '.join(_REASON_TEXT[r] for r in a.conditions.reasons)})" if a.conditions.reasons else ""),
        f"oracle: {a.oracle_label}",
        f"simulation: {v.sim_label} ({len(v.trials)} trials, t_final={v.t_final:.6g}, "
        f"e_b range [{best:.3e}, {worst:.3e}])",
    ]
    if v.consistent:
        lines.append("consistent")
    else:
        lines.append("INCONSISTENT")
        lines.extend(f"    {p}" for p in v.problems)
    return "\n".join(lines)


# --- CSV -----------------------------------------------------------------------------------

def _comment(fh, meta: dict) -> None:
    fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")


def state_columns(n_nodes: int, block_dim: int) -> list[str]:
    return [f"x{i}_{c}" for i in range(1, n_nodes + 1) for c in range(1, block_dim + 1)]


def write_trace_csv(trace: SimTrace, path: str | Path, meta: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _comment(fh, meta)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + state_columns(trace.n_nodes, trace.block_dim))
        for t, x in zip(trace.times, trace.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x])


def write_metric_csv(times, values, path: str | Path, meta: dict, name: str = "e_b") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _comment(fh, meta)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", name])
        for t, v in zip(times, values):
            w.writerow([repr(float(t)), repr(float(v))])


def write_null_basis_csv(analysis: NullSpaceAnalysis, path) -> None:
    """One row per (node, component), one column per basis vector; ``path`` may be a stream."""
    if hasattr(path, "write"):
        _write_null_rows(analysis, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_null_rows(analysis, fh)


def _write_null_rows(analysis: NullSpaceAnalysis, fh) -> None:
    blocks = analysis.per_node_blocks      # (m, N, d)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node", "component"] + [f"eta{k}" for k in range(1, analysis.nullity + 1)])
    for i in range(analysis.n_nodes):
        for c in range(analysis.block_dim):
            w.writerow([i + 1, c + 1] + [repr(float(blocks[k, i, c]) + 0.0)
                                         for k in range(analysis.nullity)])


def read_csv_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body of a CSV written by this module (comment lines skipped)."""
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return rows[0], np.array(rows[1:], dtype=float)
