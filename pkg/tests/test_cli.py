import json
import subprocess
import sys
from pathlib import Path

import pytest

from randconsensus.cli import main, parse_scenario
from randconsensus.errors import ParseError, ValidationError

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def _write(tmp_path, obj, name="s.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


BASE = {"nodes": 3, "edges": [[0, 1], [1, 2]], "probs": [0.5, 0.5, 0.5], "initial": [0.0, 0.5, 1.0], "trials": 20, "seed": 4}


def test_parse_rules(tmp_path):
    obj = dict(BASE, probs={"rule": "uniform", "args": {"p": 0.4}}, initial={"rule": "linear_i_over_n"})
    sc = parse_scenario(_write(tmp_path, obj))
    assert list(sc.graph.probs) == [0.4] * 3
    assert list(sc.initial) == pytest.approx([1 / 3, 2 / 3, 1.0])


def test_parse_follower_rule():
    sc = parse_scenario(SCENARIOS / "chain_p3_over_followers.json")
    assert sc.graph.n == 31
    assert [sc.graph.probs[v] for v in (0, 5, 14)] == pytest.approx([3 / 4, 3 / 8, 3 / 16])


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"edges": [[0, 1]], "probs": [0.5, 0.5], "initial": [0, 1]}),
        json.dumps(dict(BASE, probs={"rule": "mystery"})),
        json.dumps([1, 2]),
    ],
)
def test_parse_errors(tmp_path, text):
    with pytest.raises(ParseError):
        parse_scenario(_write(tmp_path, text))


def test_validation_errors_surface(tmp_path):
    with pytest.raises(ValidationError):
        parse_scenario(_write(tmp_path, dict(BASE, edges=[[0, 1]])))


@pytest.mark.parametrize(
    "obj",
    [
        dict(BASE, trials=0),
        dict(BASE, probs=[0.5, 1.0, 0.5]),
        dict(BASE, edges=[[0, 0], [1, 2]]),
    ],
)
def test_bad_scenarios_exit_one(tmp_path, obj, capsys):
    path = _write(tmp_path, obj)
    assert main(["simulate", "--scenario", str(path), "--out", str(tmp_path / "o")]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_exits_one(tmp_path):
    assert main(["analyze", "--scenario", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 1


def test_relaxed_flag(tmp_path):
    path = _write(tmp_path, dict(BASE, probs=[1.0, 1.0, 1.0]))
    assert main(["analyze", "--scenario", str(path), "--out", str(tmp_path)]) == 1
    assert main(["analyze", "--relaxed-probs", "--scenario", str(path), "--out", str(tmp_path)]) == 0


def test_analyze_report(tmp_path):
    assert main(["analyze", "--scenario", str(SCENARIOS / "single_edge.json"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["mean"] == pytest.approx(0.5)
    assert rep["eigenvalues"][1] == pytest.approx([0.5, 0.0])


def test_analyze_over_budget_is_noted(tmp_path):
    assert main(["analyze", "--scenario", str(SCENARIOS / "chain_p1_over_degree.json"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    # n = 31 is inside the default cap; the exact variance is present
    assert rep["exact_variance"] is not None


def test_simulate_is_byte_identical(tmp_path):
    args = ["simulate", "--scenario", str(SCENARIOS / "mixed_triangle_tail.json"), "--trials", "300", "--seed", "9"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    for name in ("ensemble.csv", "histogram.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_bound_study(tmp_path):
    assert main(["bound-study", "--scenario", str(SCENARIOS / "mixed_triangle_tail.json"), "--out", str(tmp_path)]) == 0
    terms = json.loads((tmp_path / "bound_terms.json").read_text())
    assert terms["exact_variance"] <= terms["bound_total"]
    assert terms["ratio"] >= 1.0


def test_verify_exit_codes(tmp_path, monkeypatch, capsys):
    from randconsensus import oracle

    monkeypatch.setattr("randconsensus.cli.small_graph_corpus", lambda: oracle.small_graph_corpus(max_nodes=3))
    assert main(["verify", "--out", str(tmp_path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["passed"] and summary["instances"] == 30
    assert json.loads((tmp_path / "verify.json").read_text())[0]["passed"]

    real = oracle.s_values
    monkeypatch.setattr(oracle, "s_values", lambda g: real(g) + 1e-6)
    assert main(["verify"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "randconsensus", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "bound-study" in out.stdout
