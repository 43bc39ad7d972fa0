import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_net.cli import main
from bipartite_net.fixtures import BUILTINS, builtin
from bipartite_net.netfile import NetworkFormatError, load_network, parse_network, render_network
from bipartite_net.report import read_csv_table

from helpers import random_definite, random_mixed_graph

SIMPLE = """\
# a two-node example
dim 2
nodes 2
edge 2 1 [[2.0, 0.5],
          [0.5, 1.0]]   # spans two lines
"""


def same_graph(a, b):
    if (a.n_nodes, a.block_dim) != (b.n_nodes, b.block_dim):
        return False
    ta, tb = a.edge_table(), b.edge_table()
    return ta.keys() == tb.keys() and all(np.array_equal(ta[k].weight, tb[k].weight) for k in ta)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- file format ---------------------------------------------------------------------------

def test_parse_simple_file_normalises_orientation():
    G = parse_network(SIMPLE)
    assert (G.n_nodes, G.block_dim, G.n_edges) == (2, 2, 1)
    assert G.edge(1, 2).sign == 1


def test_g1_file_shape():
    G, name = load_network("g1")
    assert name == "g1" and (G.n_nodes, G.n_edges, G.block_dim) == (9, 12, 4)


def test_shipped_files_match_builtins():
    data = resources.files("bipartite_net") / "data"
    for name in BUILTINS:
        text = (data / f"{name}.net").read_text(encoding="utf-8")
        assert same_graph(parse_network(text), builtin(name))


def errors_of(text):
    with pytest.raises(NetworkFormatError) as info:
        parse_network(text, "t.net")
    return info.value.errors


def test_wrong_shape_reports_line():
    (err,) = errors_of("dim 4\nnodes 2\nedge 1 2 " + json.dumps(np.eye(3, 4).tolist()) + "\n")
    assert err[0] == 3 and "shape (3, 4)" in err[1]


def test_duplicate_edge_reports_multi_edge():
    errs = errors_of("dim 1\nnodes 3\nedge 1 3 [[1]]\nedge 3 1 [[2]]\n")
    assert errs == [(4, "edge (3,1): duplicate of the edge on line 3 (multi-edge)")]


@pytest.mark.parametrize("text, line, fragment", [
    ("nodes 2\nedge 1 2 [[1]]\n", 0, "missing 'dim'"),
    ("dim 1\nnodes x\n", 2, "positive integer"),
    ("dim 1\nnodes 2\nvertex 1\n", 3, "unknown statement"),
    ("dim 1\nnodes 2\nedge 1 [[1]]\n", 3, "expected 'edge"),
    ("dim 1\nnodes 2\nedge 1 2 [[1,]]\n", 3, "malformed"),
    ("dim 1\nnodes 2\nedge 1 3 [[1]]\n", 3, "outside 1..2"),
    ("dim 1\nnodes 2\nedge 2 2 [[1]]\n", 3, "self-loop"),
    ("dim 2\nnodes 2\nedge 1 2 [[1, 0], [0, -1]]\n", 3, "indefinite"),
    ("dim 2\nnodes 2\nedge 1 2 [[1, 2], [0, 1]]\n", 3, "not symmetric"),
    ("dim 2\nnodes 2\nedge 1 2 [[1, 2], [3]]\n", 3, "malformed"),
])
def test_format_errors(text, line, fragment):
    errs = errors_of(text)
    assert any(l == line and fragment in m for l, m in errs), errs


def test_error_message_carries_source_and_line():
    with pytest.raises(NetworkFormatError, match=r"t\.net:3: "):
        parse_network("dim 1\nnodes 2\nedge 1 2 [[0]]\n", "t.net")


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 2 ** 32 - 1))
def test_render_parse_round_trip_is_exact(seed):
    G = random_mixed_graph(np.random.default_rng(seed))
    back = parse_network(render_network(G, comment="round trip"))
    assert same_graph(G, back)
    assert render_network(back) == render_network(G)


def test_fixture_round_trip():
    for name in BUILTINS:
        assert same_graph(parse_network(render_network(builtin(name))), builtin(name))


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("g9")
    with pytest.raises(FileNotFoundError):
        load_network("g9")


# --- analyze -------------------------------------------------------------------------------

def test_analyze_g1(capsys):
    code, out, _ = run(capsys, "analyze", "g1")
    assert code == 0
    assert out.splitlines()[0] == "BipartitePredicted; oracle: bipartite; partition V₂ = {2,4,5}"


def test_analyze_g4(capsys):
    code, out, _ = run(capsys, "analyze", "g4")
    assert code == 0
    assert out.splitlines()[0] == "Undetermined (Condition 4 failed); oracle: not bipartite"


def test_analyze_disconnected_file(tmp_path, capsys):
    f = tmp_path / "split.net"
    f.write_text("dim 1\nnodes 4\nedge 1 2 [[1]]\nedge 3 4 [[-1]]\n")
    code, out, _ = run(capsys, "analyze", str(f))
    assert code == 0 and out.startswith("Undetermined (disconnected)")


def test_analyze_bad_file_exits_nonzero(tmp_path, capsys):
    f = tmp_path / "bad.net"
    f.write_text("dim 2\nnodes 2\nedge 1 2 [[1, 0, 0], [0, 1, 0]]\n")
    code, _, err = run(capsys, "analyze", str(f))
    assert code != 0 and "bad.net:3" in err


def test_analyze_cap_breach_exits_nonzero(capsys):
    code, _, err = run(capsys, "--max-partitions", "5", "analyze", "g1")
    assert code != 0 and "cap" in err
    code, _, _ = run(capsys, "analyze", "g1", "--max-paths", "1")
    assert code != 0


def test_json_report_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "analyze", "g1", "--json", str(a))
    run(capsys, "analyze", "g1", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text(encoding="utf-8"))
    assert list(doc)[:4] == ["network", "nodes", "block_dim", "edges"]
    assert doc["prediction"] == "BipartitePredicted"
    assert doc["nbs"][0]["edges"] == [[1, 3], [1, 9], [4, 6]]
    assert doc["spectral"]["gauge"] == [1, -1, 1, -1, -1, 1, 1, 1, 1]
    assert doc["conditions"]["Condition 4"]["result"] == "pass"


def test_tolerance_flags_are_validated(capsys):
    code, _, err = run(capsys, "--tol-rank", "0.5", "analyze", "g1")
    assert code != 0 and "tol" in err


# --- simulate ------------------------------------------------------------------------------

def test_simulate_g1_seed7(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "g1", "--seed", "7", "--out", str(tmp_path))
    assert code == 0
    header, body = read_csv_table(tmp_path / "g1_eb.csv")
    assert header == ["t", "e_b"] and body[-1, 1] < 1e-5
    header, body = read_csv_table(tmp_path / "g1_trace.csv")
    assert len(header) == 1 + 9 * 4 and header[1] == "x1_1" and header[-1] == "x9_4"
    assert np.all(np.diff(body[:, 0]) > 0)
    first = (tmp_path / "g1_trace.csv").read_text().splitlines()[0]
    assert first.startswith("# network=g1 seed=7 ")


def test_simulate_g2_stays_away(tmp_path, capsys):
    run(capsys, "simulate", "g2", "--seed", "7", "--out", str(tmp_path))
    _, body = read_csv_table(tmp_path / "g2_eb.csv")
    assert body[-1, 1] > 0.01


def test_simulate_zeros(tmp_path, capsys):
    run(capsys, "simulate", "g1", "--init", "zeros", "--t-final", "5", "--out", str(tmp_path))
    _, body = read_csv_table(tmp_path / "g1_trace.csv")
    assert not np.any(body[:, 1:])


def test_simulate_from_file_and_fixed_horizon(tmp_path, capsys):
    x0 = tmp_path / "x0.txt"
    x0.write_text("# start\n" + "\n".join(",".join(["0.5"] * 4) for _ in range(9)))
    code, _, _ = run(capsys, "simulate", "g1", "--init", "file", "--x0", str(x0), "--t-final", "2",
                     "--dt", "0.01", "--out", str(tmp_path), "--prefix", "custom")
    assert code == 0
    _, body = read_csv_table(tmp_path / "custom_trace.csv")
    assert np.allclose(body[0, 1:], 0.5) and body[-1, 0] == pytest.approx(2.0)


def test_simulate_writes_figures(tmp_path, capsys):
    run(capsys, "simulate", "g2", "--t-final", "5", "--plot", "--out", str(tmp_path))
    for name in ("g2_eb.png", "g2_states.png"):
        data = (tmp_path / name).read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"


def test_seed_environment_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BIPARTITE_NET_SEED", "11")
    run(capsys, "simulate", "g1", "--t-final", "1", "--out", str(tmp_path))
    assert "seed=11 " in (tmp_path / "g1_eb.csv").read_text().splitlines()[0]
    monkeypatch.setenv("BIPARTITE_NET_SEED", "x")
    with pytest.raises(SystemExit):
        main(["simulate", "g1", "--t-final", "1", "--out", str(tmp_path)])


def test_simulate_custom_signs(tmp_path, capsys):
    run(capsys, "simulate", "g1", "--t-final", "1", "--signs", ",".join(["1"] * 9),
        "--out", str(tmp_path))
    assert "signs=1,1,1,1,1,1,1,1,1" in (tmp_path / "g1_eb.csv").read_text()
    with pytest.raises(SystemExit):
        main(["simulate", "g1", "--t-final", "1", "--signs", "1,-1", "--out", str(tmp_path)])


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "simulate", "g1", "--t-final", "1", "--out", str(blocker / "sub"))
    assert code != 0 and err


# --- verify / spectrum / examples ----------------------------------------------------------

@pytest.mark.parametrize("name", ["g1", "g3"])
def test_verify_fixtures(name, capsys):
    code, out, _ = run(capsys, "verify", name, "--trials", "20")
    assert code == 0 and out.rstrip().endswith("consistent")


def test_verify_strongly_connected_balanced(tmp_path, capsys):
    from bipartite_net.netfile import write_network
    from bipartite_net.network import MatrixGraph
    rng = np.random.default_rng(4)
    sig = (1, 1, -1, -1)
    edges = [(u, v, random_definite(rng, 2, sig[u - 1] * sig[v - 1]))
             for u, v in [(1, 2), (2, 3), (3, 4), (1, 3)]]
    f = tmp_path / "tree.net"
    write_network(MatrixGraph.from_edges(4, 2, edges), f)
    code, out, _ = run(capsys, "verify", str(f), "--trials", "5")
    assert code == 0
    assert "prediction: BipartitePredicted" in out and "oracle: bipartite" in out


def test_verify_short_horizon_is_inconclusive(capsys):
    # unconverged runs are not evidence either way
    code, out, _ = run(capsys, "verify", "g1", "--trials", "3", "--t-final", "5")
    assert code == 0 and "simulation: inconclusive" in out


def test_verify_flags_an_inconsistency():
    from dataclasses import replace

    from bipartite_net.report import analyze, verify
    from bipartite_net.spectral import BipartiteStructure
    a = analyze(builtin("g1"), "g1")
    broken = replace(a, structure=BipartiteStructure(False, None, None, 1.0))
    v = verify(broken, n_trials=2)
    assert not v.consistent
    assert any("oracle finds no bipartite structure" in p for p in v.problems)
    assert any("simulations reach bipartite consensus but the oracle" in p for p in v.problems)


def test_spectrum_g1(tmp_path, capsys):
    csv_path = tmp_path / "null.csv"
    code, out, _ = run(capsys, "spectrum", "g1", "--csv", str(csv_path))
    assert code == 0
    assert sum(1 for line in out.splitlines() if line.endswith("*")) == 1
    header, body = read_csv_table(csv_path)
    assert header == ["node", "component", "eta1"] and body.shape == (36, 3)


def test_spectrum_edgeless(tmp_path, capsys):
    f = tmp_path / "empty.net"
    f.write_text("dim 1\nnodes 2\n")
    code, out, _ = run(capsys, "spectrum", str(f))
    lines = out.splitlines()
    assert code == 0 and lines[1].split()[1:] == ["0.000000000000e+00", "*"]
    assert lines[2].split()[1:] == ["0.000000000000e+00", "*"]


def test_spectrum_g2_is_not_bipartite(capsys):
    _, out, _ = run(capsys, "spectrum", "g2")
    assert "bipartite structure: not bipartite" in out


def test_examples_lists_and_writes(tmp_path, capsys):
    code, out, _ = run(capsys, "examples", "--write", str(tmp_path))
    assert code == 0
    assert [line.split(":")[0] for line in out.splitlines()[:4]] == ["g1", "g2", "g3", "g4"]
    assert same_graph(load_network(str(tmp_path / "g3.net"))[0], builtin("g3"))


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "bipartite_net.cli", "analyze", "g2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("Undetermined (Condition 1 failed); oracle: not bipartite")
