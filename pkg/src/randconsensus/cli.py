"""Command-line entry point: ``randconsensus {analyze,simulate,verify,bound-study}``.

Scenario files are JSON::

    {"nodes": 3, "edges": [[0, 1], [1, 2]],
     "probs": [0.5, 0.5, 0.5]  or  {"rule": "...", "args": {...}},
     "initial": [0.0, 0.5, 1.0]  or  {"rule": "linear_i_over_n"},
     "trials": 1000, "seed": 1, "tol": 1e-10, "max_steps": 100000}

Probability rules: ``uniform`` (``p``) and ``scaled_inverse_degree``
(``scale``, ``nodes``, ``default``, ``count`` = ``"all"`` or ``"external"``;
``external`` counts only neighbours outside ``nodes``).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analysis import analyze, variance_upper_bound
from .errors import BudgetExceeded, ConsensusError, ParseError, ValidationError, VerificationFailure
from .graph import Scenario, build_graph
from .montecarlo import run_ensemble, write_ensemble_csv, write_histogram_csv, write_summary_json
from .oracle import MAX_DIRECTED_EDGES, small_graph_corpus, verify_closed_forms

UNLIMITED = sys.maxsize


def _field(data: dict, key: str, path):
    if key not in data:
        raise ParseError(f"{path}: missing required field {key!r}")
    return data[key]


def _resolve_probs(value, n: int, edges: list, path) -> list[float]:
    if isinstance(value, list):
        return [float(p) for p in value]
    if not isinstance(value, dict) or "rule" not in value:
        raise ParseError(f"{path}: field 'probs' must be a list or a {{'rule': ...}} object")
    rule, args = value["rule"], value.get("args", {})
    if rule == "uniform":
        return [float(args["p"])] * n
    if rule == "scaled_inverse_degree":
        nodes = [int(v) for v in args.get("nodes", range(n))]
        chosen = set(nodes)
        if len(chosen) < n and "default" not in args:
            raise ParseError(f"{path}: probs rule needs 'default' for nodes outside 'nodes'")
        count = args.get("count", "all")
        if count not in ("all", "external"):
            raise ParseError(f"{path}: probs.args.count must be 'all' or 'external'")
        probs = [float(args.get("default", 0.0))] * n
        for v in nodes:
            nbrs = [b if a == v else a for a, b in edges if v in (a, b)]
            if count == "external":
                nbrs = [u for u in nbrs if u not in chosen]
            if not nbrs:
                raise ValidationError(f"node {v} has no neighbours to count")
            probs[v] = float(args.get("scale", 1.0)) / len(nbrs)
        return probs
    raise ParseError(f"{path}: unknown probs rule {rule!r}")


def _resolve_initial(value, n: int, path) -> list[float]:
    if isinstance(value, list):
        return [float(v) for v in value]
    if isinstance(value, dict) and value.get("rule") == "linear_i_over_n":
        return [(i + 1) / n for i in range(n)]
    if isinstance(value, dict) and value.get("rule") == "constant":
        return [float(value.get("args", {}).get("value", 1.0))] * n
    raise ParseError(f"{path}: field 'initial' must be a list or a known rule")


def parse_scenario(path, *, relaxed: bool = False, overrides: dict | None = None) -> Scenario:
    """Read and validate a scenario file.

    Raises
    ------
    ParseError
        Malformed JSON or missing/ill-typed fields.
    ValidationError
        The content parses but describes an invalid graph or run.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    try:
        n = int(_field(data, "nodes", path))
        edges = [tuple(int(x) for x in e) for e in _field(data, "edges", path)]
        probs = _resolve_probs(_field(data, "probs", path), n, edges, path)
        initial = _resolve_initial(_field(data, "initial", path), n, path)
    except (TypeError, KeyError) as exc:
        raise ParseError(f"{path}: malformed field ({exc})") from exc
    run = {
        "trials": int(data.get("trials", 100)),
        "master_seed": int(data.get("seed", 0)),
        "tol": float(data.get("tol", 1e-10)),
        "max_steps": int(data.get("max_steps", 100_000)),
        "bins": int(data.get("bins", 20)),
    }
    for key, value in (overrides or {}).items():
        if value is not None:
            run[key] = value
    graph = build_graph(edges, probs, n=n, relaxed=relaxed)
    return Scenario(graph=graph, initial=np.array(initial), meta={"source": str(path)}, **run)


def _encode(obj) -> str:
    """JSON with fixed key order and ``%.17g`` floats; non-finite floats become null."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def write_json(obj, path) -> None:
    Path(path).write_text(_encode(obj) + "\n", encoding="utf-8", newline="\n")


def _cmd_analyze(scenario: Scenario, out: Path, args) -> int:
    rep = analyze(scenario.graph, scenario.initial, max_nodes=args.max_nodes)
    write_json(rep.to_dict(), out / "report.json")
    return 0


def _cmd_simulate(scenario: Scenario, out: Path, args) -> int:
    stats = run_ensemble(scenario, workers=args.workers, bins=args.bins)
    write_ensemble_csv(stats, out / "ensemble.csv")
    write_histogram_csv(stats, out / "histogram.csv")
    write_summary_json(stats, out / "summary.json")
    return 0


def _cmd_bound_study(scenario: Scenario, out: Path, args) -> int:
    rep = variance_upper_bound(scenario.graph, scenario.initial, max_nodes=args.max_nodes)
    ratio = None
    if rep.exact_variance and math.isfinite(rep.bound_total):
        ratio = rep.bound_total / rep.exact_variance
    write_json(
        {
            "A": rep.bound_term_a,
            "B": rep.bound_term_b,
            "C": rep.bound_term_c,
            "log_C": rep.log_bound_term_c,
            "bound_total": rep.bound_total,
            "log_bound_total": (
                math.log(rep.bound_term_a * rep.bound_term_b) + rep.log_bound_term_c
                if rep.bound_term_a > 0 and rep.bound_term_b > 0
                else None
            ),
            "exact_variance": rep.exact_variance,
            "ratio": ratio,
            "stationary_gap": rep.stationary_gap,
            "kappa_exact": rep.kappa_exact,
            "delta_inf_norm": rep.delta_inf_norm,
        },
        out / "bound_terms.json",
    )
    return 0


def _cmd_verify(scenario: Scenario | None, out: Path | None, args) -> int:
    reports = [verify_closed_forms(g) for g in small_graph_corpus()]
    fields = ["max_err_ew", "max_err_q", "max_err_r", "max_err_delta", "max_err_delta_norm", "max_err_mean", "max_err_variance"]
    summary = {"instances": len(reports)}
    summary.update({f: max(getattr(r, f) for r in reports) for f in fields})
    summary["cases_checked"] = sum(r.cases_checked for r in reports)
    summary["scenario"] = None
    if scenario is not None:
        if scenario.graph.directed_edges().shape[0] <= MAX_DIRECTED_EDGES:
            summary["scenario"] = verify_closed_forms(scenario.graph, x0=scenario.initial).to_dict()
        else:
            summary["scenario"] = "skipped: over enumeration budget"
    summary["passed"] = True
    text = _encode(summary)
    print(text)
    if out is not None:
        write_json([r.to_dict() for r in reports], out / "verify.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randconsensus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("analyze", "simulate", "verify", "bound-study"):
        p = sub.add_parser(verb)
        p.add_argument("--scenario", type=Path, required=verb != "verify")
        p.add_argument("--out", type=Path, default=None if verb == "verify" else Path("."))
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--bins", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--allow-large", action="store_true", help="lift the Kronecker node cap")
        p.add_argument("--relaxed-probs", action="store_true", help="permit p = 1")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.max_nodes = UNLIMITED if args.allow_large else None
    try:
        scenario = None
        if args.scenario is not None:
            overrides = {"trials": args.trials, "master_seed": args.seed, "tol": args.tol, "bins": args.bins}
            scenario = parse_scenario(args.scenario, relaxed=args.relaxed_probs, overrides=overrides)
        out = args.out
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
        if args.verb == "verify":
            return _cmd_verify(scenario, out, args)
        handler = {"analyze": _cmd_analyze, "simulate": _cmd_simulate, "bound-study": _cmd_bound_study}[args.verb]
        return handler(scenario, out, args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: {exc} (use --allow-large)", file=sys.stderr)
        return 1
    except (ConsensusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
