"""Command-line interface: analyze, simulate, verify, spectrum, examples."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .dynamics import SimConfig, SimulationError, best_signs, e_b_series, integrate_laplacian
from .fixtures import BUILTINS, DESCRIPTIONS, builtin
from .linalg import Tolerances
from .netfile import NetworkFormatError, load_network, render_network
from .network import GraphValidationError
from .report import (analyze, auto_horizon, dump_document, report_document, summary_text,
                     verification_text, verify, write_metric_csv, write_null_basis_csv,
                     write_trace_csv)
from .topology import DEFAULT_MAX_PARTITION_NODES, DEFAULT_MAX_PATHS, EnumerationLimitError

SEED_ENV = "BIPARTITE_NET_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV}={raw!r} is not an integer") from None


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    g = parser.add_argument_group("numerical settings")
    g.add_argument("--tol-rank", type=float, default=default(1e-9),
                   help="relative rank cutoff (default 1e-9)")
    g.add_argument("--tol-eig", type=float, default=default(1e-9),
                   help="relative zero-eigenvalue cutoff (default 1e-9)")
    g.add_argument("--max-partitions", type=int, default=default(DEFAULT_MAX_PARTITION_NODES),
                   help="largest node count for exhaustive bipartition search "
                        f"(default {DEFAULT_MAX_PARTITION_NODES})")
    g.add_argument("--max-paths", type=int, default=default(DEFAULT_MAX_PATHS),
                   help=f"cap on enumerated semidefinite paths (default {DEFAULT_MAX_PATHS})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bipartite-net",
        description="Bipartite consensus analysis for matrix-weighted networks.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _global_options(p, suppress=True)
        return p

    p = add("analyze", "check the sufficient conditions and compare with the spectral oracle")
    p.add_argument("network", help="network file or built-in name (g1..g4)")
    p.add_argument("--json", metavar="PATH", help="also write the structured report here ('-' for stdout)")
    p.set_defaults(func=cmd_analyze)

    p = add("simulate", "integrate x' = -Lx and write trace and e_b CSV files")
    p.add_argument("network")
    p.add_argument("--t-final", type=float, default=None,
                   help="horizon (default: long enough for the slowest mode to decay, at least 50)")
    p.add_argument("--dt", type=float, default=None, help="step size (default 1/lambda_max clamped)")
    p.add_argument("--seed", type=int, default=None, help=f"random start seed (default ${SEED_ENV} or 0)")
    p.add_argument("--init", choices=["random", "zeros", "file"], default="random")
    p.add_argument("--x0", metavar="PATH", help="initial state for --init file (N*d numbers)")
    p.add_argument("--signs", help="sign pattern for e_b, e.g. 1,-1,1 (default: predicted or oracle gauge)")
    p.add_argument("--record-every", type=int, default=10)
    p.add_argument("--out", default=".", help="output directory (default .)")
    p.add_argument("--prefix", help="file name prefix (default: network name)")
    p.add_argument("--plot", action="store_true", help="also write PNG figures")
    p.set_defaults(func=cmd_simulate)

    p = add("verify", "three-way check of prediction, oracle and simulation")
    p.add_argument("network")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=None, help="first seed; trial k uses seed + k")
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = add("spectrum", "print the Laplacian spectrum and write the null-space basis")
    p.add_argument("network")
    p.add_argument("--csv", metavar="PATH", help="null basis CSV destination (default stdout)")
    p.set_defaults(func=cmd_spectrum)

    p = add("examples", "list the built-in networks")
    p.add_argument("--write", metavar="DIR", help="write each built-in as a network file into DIR")
    p.set_defaults(func=cmd_examples)
    return parser


def _tol(args) -> Tolerances:
    return Tolerances(rank_rel=args.tol_rank, eig_zero_rel=args.tol_eig)


def _analysis(args):
    tol = _tol(args)
    graph, name = load_network(args.network, tol)
    return analyze(graph, name, tol, args.max_partitions, args.max_paths)


def _settings(args) -> dict:
    return {"tol_rank": args.tol_rank, "tol_eig": args.tol_eig,
            "max_partitions": args.max_partitions, "max_paths": args.max_paths}


def _parse_signs(text: str, n: int) -> tuple[int, ...]:
    try:
        signs = tuple(int(s) for s in text.replace(" ", "").split(","))
    except ValueError:
        raise SystemExit(f"error: --signs must be comma-separated +1/-1 values, got {text!r}") from None
    if len(signs) != n or any(s not in (1, -1) for s in signs) or signs[0] != 1:
        raise SystemExit(f"error: --signs needs {n} entries of +1/-1 starting with 1")
    return signs


def cmd_analyze(args) -> int:
    a = _analysis(args)
    print(summary_text(a))
    if args.json:
        text = dump_document(report_document(a, _settings(args)))
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text, encoding="utf-8")
    return 0


def cmd_simulate(args) -> int:
    a = _analysis(args)
    N, d = a.graph.n_nodes, a.graph.block_dim
    seed = default_seed() if args.seed is None else args.seed
    x0 = None
    if args.init == "zeros":
        x0 = np.zeros(N * d)
    elif args.init == "file":
        if not args.x0:
            raise SystemExit("error: --init file needs --x0 PATH")
        text = "\n".join(line.split("#", 1)[0] for line in Path(args.x0).read_text().splitlines())
        x0 = np.array(text.replace(",", " ").split(), dtype=float)
    t_final = auto_horizon(a.null) if args.t_final is None else args.t_final
    config = SimConfig(t_final=t_final, dt=args.dt, record_every=args.record_every, seed=seed, x0=x0)
    trace = integrate_laplacian(a.L, N, d, config)

    if args.signs:
        signs = _parse_signs(args.signs, N)
    elif a.conditions.predicted:
        signs = a.conditions.unique_nbs.partition.signs
    elif a.structure.is_bipartite:
        signs = a.structure.gauge
    else:
        signs = best_signs(trace.final, N, d)
    eb = e_b_series(trace, signs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prefix = args.prefix or a.name
    meta = {"network": a.name, "seed": seed if x0 is None else args.init, "t_final": repr(t_final),
            "dt": repr(trace.dt), "signs": ",".join(str(s) for s in signs)}
    trace_path, eb_path = out / f"{prefix}_trace.csv", out / f"{prefix}_eb.csv"
    write_trace_csv(trace, trace_path, meta)
    write_metric_csv(trace.times, eb, eb_path, meta)
    written = [trace_path, eb_path]
    if args.plot:
        from .plotting import plot_e_b, plot_states
        written.append(plot_e_b(trace.times, {a.name: eb}, out / f"{prefix}_eb.png",
                                title=f"{a.name}: bipartite distance"))
        written.append(plot_states(trace, signs, out / f"{prefix}_states.png",
                                   title=f"{a.name}: agent states"))
    print(f"t_final={t_final:.6g} dt={trace.dt:.6g} steps={round(t_final / trace.dt)} "
          f"e_b(t_final)={eb[-1]:.6e}")
    for p in written:
        print(f"wrote {p}")
    return 0


def cmd_verify(args) -> int:
    a = _analysis(args)
    seed = default_seed() if args.seed is None else args.seed
    v = verify(a, args.trials, seed, args.t_final, args.dt)
    print(verification_text(v))
    return 0 if v.consistent else 1


def cmd_spectrum(args) -> int:
    a = _analysis(args)
    print(f"# eigenvalues of L ({a.L.shape[0]}), zero cutoff {a.null.eps:.3e}")
    for k, lam in enumerate(a.null.eigenvalues, 1):
        mark = "  *" if abs(lam) <= a.null.eps else ""
        print(f"{k:4d} {lam: .12e}{mark}")
    print(f"# nullity {a.null.nullity}; bipartite structure: {a.oracle_label}")
    if args.csv:
        write_null_basis_csv(a.null, args.csv)
        print(f"wrote {args.csv}")
    else:
        write_null_basis_csv(a.null, sys.stdout)
    return 0


def cmd_examples(args) -> int:
    for name in sorted(BUILTINS):
        g = builtin(name)
        print(f"{name}: N={g.n_nodes} d={g.block_dim} edges={g.n_edges}  {DESCRIPTIONS[name]}")
    if args.write:
        out = Path(args.write)
        out.mkdir(parents=True, exist_ok=True)
        for name in sorted(BUILTINS):
            path = out / f"{name}.net"
            path.write_text(render_network(builtin(name), DESCRIPTIONS[name]), encoding="utf-8")
            print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetworkFormatError, GraphValidationError, EnumerationLimitError, SimulationError,
            FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
