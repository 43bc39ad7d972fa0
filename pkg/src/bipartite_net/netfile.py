"""Plain-text network files (grammar in docs/format.md)."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances
from .network import MatrixGraph, edge_key, validate


class NetworkFormatError(ValueError):
    def __init__(self, errors: list[tuple[int, str]], source: str = "<text>"):
        self.errors = errors
        self.source = source
        lines = [f"{source}:{line}: {msg}" if line else f"{source}: {msg}" for line, msg in errors]
        super().__init__("\n".join(lines))


def _statements(text: str):
    """Yield ``(line_no, statement)`` with bracketed matrices joined across lines."""
    buf, start, depth = [], 0, 0
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not buf:
            start = no
        buf.append(line)
        depth += line.count("[") - line.count("]")
        if depth <= 0:
            yield start, " ".join(buf)
            buf, depth = [], 0
    if buf:
        yield start, " ".join(buf)


def parse_network(text: str, source: str = "<text>", tol: Tolerances = DEFAULT_TOL) -> MatrixGraph:
    errors: list[tuple[int, str]] = []
    dim = nodes = None
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for no, stmt in _statements(text):
        keyword, _, rest = stmt.partition(" ")
        rest = rest.strip()
        if keyword in ("dim", "nodes"):
            try:
                value = int(rest)
                if value < 1:
                    raise ValueError
            except ValueError:
                errors.append((no, f"'{keyword}' needs a positive integer, got {rest!r}"))
                continue
            if keyword == "dim":
                dim = value
            else:
                nodes = value
        elif keyword == "edge":
            parts = rest.split(None, 2)
            if len(parts) < 3:
                errors.append((no, "expected 'edge <u> <v> <matrix>'"))
                continue
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                errors.append((no, f"node labels must be integers, got {parts[0]!r} {parts[1]!r}"))
                continue
            try:
                W = np.array(json.loads(parts[2]), dtype=float)
            except (json.JSONDecodeError, ValueError, TypeError) as exc:
                errors.append((no, f"malformed matrix: {exc}"))
                continue
            edges.append((no, u, v, W))
        else:
            errors.append((no, f"unknown statement {keyword!r}"))
    if dim is None:
        errors.append((0, "missing 'dim' statement"))
    if nodes is None:
        errors.append((0, "missing 'nodes' statement"))
    if errors:
        raise NetworkFormatError(errors, source)

    for no, u, v, W in edges:
        if u == v:
            errors.append((no, f"edge ({u},{v}): self-loop"))
            continue
        key = edge_key(u, v)
        if key in seen:
            errors.append((no, f"edge ({u},{v}): duplicate of the edge on line {seen[key]} (multi-edge)"))
            continue
        seen[key] = no
        if W.ndim != 2:
            errors.append((no, f"edge ({u},{v}): weight must be a {dim}x{dim} matrix"))
            continue
        for problem in validate(MatrixGraph.from_edges(nodes, dim, [(u, v, W)]), tol):
            errors.append((no, problem))
    if errors:
        raise NetworkFormatError(errors, source)
    return MatrixGraph.from_edges(nodes, dim, [(u, v, W) for _, u, v, W in edges]).checked(tol)


def _num(x: float) -> str:
    return repr(float(x) + 0.0)  # shortest round-trip text; -0.0 written as 0.0


def render_network(graph: MatrixGraph, comment: str | None = None) -> str:
    """Text form that parses back to bit-identical weights."""
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"dim {graph.block_dim}")
    out.append(f"nodes {graph.n_nodes}")
    for u, v, W in sorted(graph.edges, key=lambda e: edge_key(e[0], e[1])):
        a, b = edge_key(u, v)
        rows = ", ".join("[" + ", ".join(_num(x) for x in row) + "]" for row in W)
        out.append(f"edge {a} {b} [{rows}]")
    return "\n".join(out) + "\n"


def read_network(path: str | Path, tol: Tolerances = DEFAULT_TOL) -> MatrixGraph:
    path = Path(path)
    return parse_network(path.read_text(encoding="utf-8"), str(path), tol)


def write_network(graph: MatrixGraph, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(render_network(graph, comment), encoding="utf-8")


def load_network(source: str, tol: Tolerances = DEFAULT_TOL) -> tuple[MatrixGraph, str]:
    """A built-in name (g1..g4) or a path to a network file, with a display name."""
    from .fixtures import BUILTINS, builtin

    if source.lower() in BUILTINS and not Path(source).exists():
        return builtin(source).checked(tol), source.lower()
    path = Path(source)
    if not path.is_file():
        raise FileNotFoundError(f"no network file {source!r} and no built-in of that name "
                                f"(built-ins: {', '.join(sorted(BUILTINS))})")
    return read_network(path, tol), path.stem
