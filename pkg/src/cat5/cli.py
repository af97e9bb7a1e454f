"""Command-line front end: input parsing, subcommand dispatch, artifact emission.

Exit codes: 0 for a mathematical "holds / feasible / success", 1 for
"fails / infeasible / hits", 2 for structured errors, 3 for undecided.
All emitted JSON is byte-stable for identical inputs and configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import arrays as arrays_mod
from . import gamma as gamma_mod
from . import spacelike, verify
from .errors import Cat5Error, ComparisonFailed, ParseError
from .forms import ZERO_REL_TOL
from .metric import COMPARE_REL_TOL, FiniteMetricSpace, cat0_comparison_all, validate_metric

log = logging.getLogger("cat5")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_UNDECIDED = 3


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_input(path: str, fmt: str | None = None) -> FiniteMetricSpace:
    """Load a metric from JSON {"n": int, "d": [[...]]} or CSV (n rows of n reals)."""
    if fmt is None:
        fmt = "csv" if path.lower().endswith(".csv") else "json"
    if fmt == "json":
        data = _load_json(path)
        if not isinstance(data, dict) or "d" not in data:
            raise ParseError(f"{path}: expected an object with a 'd' matrix")
        d = data["d"]
        if "n" in data and len(d) != data["n"]:
            raise ParseError(f"{path}: 'n' = {data['n']} does not match matrix size {len(d)}")
        return validate_metric(d)
    if fmt == "csv":
        rows = []
        with open(path, encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                fields = line.split(",")
                row = []
                for col, tok in enumerate(fields, start=1):
                    try:
                        row.append(float(tok))
                    except ValueError:
                        raise ParseError(
                            f"{path}: non-numeric field {tok!r}", line=ln, field=col
                        ) from None
                rows.append(row)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ParseError(f"{path}: expected a square numeric matrix")
        return validate_metric(rows)
    raise ParseError(f"unknown input format {fmt!r}")


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})", line=exc.lineno) from None


def _tolerances(args) -> dict:
    return {
        "compare_rel_tol": args.tol_compare,
        "zero_rel_tol": args.tol_zero,
    }


def cmd_check(args) -> int:
    space = parse_input(args.input, args.format)
    report = cat0_comparison_all(space, rel_tol=args.tol_compare)
    emit(
        {
            "holds": report.holds,
            "worst_slack": report.worst_slack,
            "worst_labeling": report.worst_labeling,
            "n_checked": report.n_checked,
            "failures": [
                {"labeling": f.labeling, "slack": f.slack} for f in report.failures
            ],
            "tolerances": _tolerances(args),
        },
        args.out,
    )
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_embed(args) -> int:
    space = parse_input(args.input, args.format)
    try:
        result = spacelike.cat0_embed(
            space, compare_rel_tol=args.tol_compare, zero_rel_tol=args.tol_zero
        )
    except ComparisonFailed as exc:
        emit(
            {
                "error": "comparison_failed",
                "worst_slack": exc.report.worst_slack,
                "worst_labeling": exc.report.worst_labeling,
                "tolerances": _tolerances(args),
            },
            args.out,
        )
        return EXIT_FAIL
    payload = spacelike.complex_to_dict(result.complex)
    payload["diagnostics"] = result.diagnostics
    payload["tolerances"] = _tolerances(args)
    if result.profile is not None:
        payload["profile"] = _profile_dict(result.profile)
    emit(payload, args.out)
    return EXIT_OK


def _profile_dict(profile) -> dict:
    return {
        "facet_signs": list(profile.facet_signs),
        "n_plus": profile.n_plus,
        "n_zero": profile.n_zero,
        "n_minus": profile.n_minus,
        "m": profile.m,
        "stratum": profile.stratum,
        "side": profile.side,
    }


def cmd_classify(args) -> int:
    data = _load_json(args.input)
    if not isinstance(data, dict) or "points" not in data:
        raise ParseError(f"{args.input}: expected an object with a 'points' array")
    pts = np.array(data["points"], dtype=float)
    if args.jitter:
        rng = np.random.default_rng(args.seed)
        pts = pts + rng.normal(scale=args.jitter, size=pts.shape)
    arr = arrays_mod.array5(pts)
    profile = arrays_mod.classify(arr)
    payload = _profile_dict(profile)
    payload["structural_check"] = arrays_mod.structural_check(arr, profile)
    if args.jitter:
        payload["jitter"] = {"scale": args.jitter, "seed": args.seed}
    emit(payload, args.out)
    return EXIT_OK


def cmd_gamma(args) -> int:
    if args.graph is None:
        data = _load_json(args.input)
        if "graph" not in data or "d" not in data:
            raise ParseError(f"{args.input}: instance needs 'graph' and 'd'")
        graph = gamma_mod.graph_from_dict(data["graph"])
        dists = np.array(data["d"], dtype=float)
    else:
        if os.path.exists(args.graph):
            graph = gamma_mod.graph_from_dict(_load_json(args.graph))
        else:
            graph = gamma_mod.builtin_graph(args.graph)
        space = parse_input(args.input, args.format)
        if space.n != graph.n_vertices:
            raise ParseError(
                f"metric has {space.n} points but graph {graph.name or args.graph} "
                f"needs {graph.n_vertices}"
            )
        dists = space.d
    wit = gamma_mod.gamma_feasible(graph, dists)
    emit(
        {
            "graph": gamma_mod.graph_to_dict(graph),
            "status": wit.status,
            "residual": wit.residual,
            "iterations": wit.iterations,
            "gram": wit.gram,
            "tolerances": {"feas_tol": wit.feas_tol, "infeas_floor": wit.infeas_floor},
        },
        args.out,
    )
    if wit.status == gamma_mod.FEASIBLE:
        return EXIT_OK
    if wit.status == gamma_mod.INFEASIBLE:
        return EXIT_FAIL
    return EXIT_UNDECIDED


def cmd_verify(args) -> int:
    space = parse_input(args.input, args.format)
    cx = spacelike.complex_from_dict(_load_json(args.complex))
    emb = spacelike.MinkowskiEmbedding(
        cx.vertices, cx.metric_signs, cx.time_axis, base_index=4
    )
    result = spacelike.EmbeddingResult(space, emb, cx, None, {})
    report = verify.check_distance_preservation(result, resolution=args.resolution)
    emit(
        {
            "passed": report.passed,
            "max_edge_residual": report.max_edge_residual,
            "max_shortcut": report.max_shortcut,
            "bad_edges": [list(e) for e in report.bad_edges],
            "bounds": report.bounds,
            "resolution": args.resolution,
        },
        args.out,
    )
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_hunt(args) -> int:
    data = _load_json(args.input)
    if args.budget is not None:
        data["budget"] = args.budget
    if args.seed is not None:
        data["seed"] = args.seed
    cfg = verify.HuntConfig(
        generator=data["generator"],
        n_points=int(data["n_points"]),
        budget=int(data["budget"]),
        seed=int(data.get("seed", 0)),
        predicate=data["predicate"],
        keep=int(data.get("keep", 10)),
        delta=float(data.get("delta", 0.05)),
    )
    report = verify.hunt_counterexamples(cfg, workers=args.workers)
    emit(report, args.out)
    return EXIT_FAIL if report["hits"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cat5",
        description=(
            "Five-point comparison checks, explicit spacelike-complex "
            "embeddings, and graph-comparison feasibility."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input file path")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
        p.add_argument("--tol-compare", type=float, default=COMPARE_REL_TOL,
                       help="relative comparison tolerance (default %(default)g)")
        p.add_argument("--tol-zero", type=float, default=ZERO_REL_TOL,
                       help="relative eigenvalue zero tolerance (default %(default)g)")
        p.add_argument("--resolution", type=int, default=verify.DEFAULT_RESOLUTION)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--graph", default=None,
                       help="builtin graph name or path to a graph JSON")
        p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("check", help="run the comparison over all quadruples")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("embed", help="embed a five-point metric into a complex")
    common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("classify", help="orientation profile of a five-point array")
    common(p)
    p.add_argument("--jitter", type=float, default=0.0,
                   help="seeded coordinate jitter for exploratory runs (off by default)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gamma", help="graph-comparison feasibility")
    common(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("verify", help="re-check a complex file against a metric file")
    common(p)
    p.add_argument("complex", help="complex JSON produced by the embed subcommand")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hunt", help="run a counterexample hunt from a config file")
    common(p)
    p.set_defaults(func=cmd_hunt)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("CAT5_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Cat5Error as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, getattr(args, "out", None))
        log.debug("structured error", exc_info=exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
