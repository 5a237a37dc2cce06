"""Command-line entry point: validate, solve, sweep, presets, report, lp."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bnb import BnbOptions, solve_bnb
from .catalog import layer_security_report, presets_json, report_to_text
from .exhaustive import Status, solve_exhaustive
from .lp import to_lp_text
from .model import AssignmentError, validate_scenario
from .relaxation import build_relaxation
from .scenario_io import ScenarioFormatError, dumps_plan, load_scenario, plan_assignment, plan_to_dict
from .sweep import DIMENSIONS, SweepError, SweepSpec, frontier_to_csv, pareto_frontier, run_sweep, sweep_to_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_LIMIT = 4


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_valid(path: str):
    """Scenario from ``path``, or an exit code after printing what is wrong."""
    try:
        scenario = load_scenario(path)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_INVALID
    report = validate_scenario(scenario)
    if not report.ok:
        print(report.to_text(), file=sys.stderr)
        return None, EXIT_INVALID
    return scenario, EXIT_OK


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except ScenarioFormatError as exc:
        print(f"STRUCT: {exc}")
        return EXIT_INVALID
    report = validate_scenario(scenario)
    print(report.to_text())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_solve(args) -> int:
    scenario, code = _load_valid(args.file)
    if scenario is None:
        return code
    if args.method == "bnb":
        result = solve_bnb(scenario, BnbOptions(args.node_limit, args.time_limit))
    else:
        result = solve_exhaustive(scenario)
    doc = plan_to_dict(scenario, result)
    _write(args.out, dumps_plan(doc))

    st = result.stats
    print(f"method: {args.method}")
    print(f"status: {result.status.value}")
    print(f"nodes/candidates: {st.nodes_or_candidates}  lp solves: {st.lp_solves}  time: {st.wall_time:.3f}s")
    if result.status is Status.OPTIMAL:
        print(f"objective: {doc['objective']:g}")
        return EXIT_OK
    if result.status is Status.INFEASIBLE:
        for d in doc["infeasible"]:
            for reason in d["unsatisfiable"]:
                if reason == "qos":
                    print(f"slice {d['slice']}: qos unsatisfiable, q_min={d['q_min']:g} but max q={d['max_quality']:g}")
                elif reason == "security":
                    print(f"slice {d['slice']}: security unsatisfiable, s_min={d['s_min']:g} but max s={d['max_security']:g}")
                else:
                    print(f"slice {d['slice']}: qos and security minima cannot hold together")
        return EXIT_INFEASIBLE
    inc = "none" if result.assignment is None else f"{result.objective:g}"
    gap = result.gap
    print(f"limit reached: incumbent {inc}, bound {result.bound:g}, gap {'inf' if gap is None or math.isinf(gap) else f'{gap:g}'}")
    return EXIT_LIMIT


def _parse_values(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise SweepError(f"cannot read forced values {text!r}") from None


def cmd_sweep(args) -> int:
    scenario, code = _load_valid(args.file)
    if scenario is None:
        return code
    try:
        if args.dim == "frontier":
            if args.slice not in scenario.slice_ids:
                raise SweepError(f"unknown slice {args.slice}")
            points = pareto_frontier(scenario, args.slice)
            _write(args.out, frontier_to_csv(scenario, args.slice, points))
            print(f"frontier: {len(points)} points for slice {args.slice}")
            return EXIT_OK
        spec = SweepSpec(args.dim, args.slice, args.layer, _parse_values(args.values))
        rows = run_sweep(scenario, spec, args.method)
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write(args.out, sweep_to_csv(rows))
    print(f"sweep {args.dim}: {len(rows)} rows, {sum(r.feasible for r in rows)} feasible")
    return EXIT_OK


def cmd_presets(args) -> int:
    print(presets_json())
    return EXIT_OK


def cmd_report(args) -> int:
    scenario, code = _load_valid(args.file)
    if scenario is None:
        return code
    try:
        doc = json.loads(Path(args.plan).read_text())
        report = layer_security_report(scenario, plan_assignment(doc))
    except (OSError, json.JSONDecodeError, ScenarioFormatError, KeyError) as exc:
        print(f"error: cannot read plan: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssignmentError as exc:
        print(f"error: plan does not fit the scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "text":
        _write(args.out, report_to_text(report) + "\n")
    else:
        _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def cmd_lp(args) -> int:
    scenario, code = _load_valid(args.file)
    if scenario is None:
        return code
    if args.slice not in scenario.slice_ids:
        print(f"error: unknown slice {args.slice}", file=sys.stderr)
        return EXIT_INVALID
    problem = build_relaxation(scenario.subscenario([args.slice]), {})
    if problem is None:
        print("error: slice has an empty decision domain", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write(args.out, to_lp_text(problem.lp, f"slice {args.slice} root relaxation"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sliceiso", description="Minimum-cost isolation planning for 5G network slices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file against the model axioms")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="compute a minimum-cost plan")
    p.add_argument("file")
    p.add_argument("--method", choices=("exhaustive", "bnb"), default="exhaustive")
    p.add_argument("--out", help="plan JSON path (default stdout)")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="re-solve one slice under forced floors, or list its cost/security frontier")
    p.add_argument("file")
    p.add_argument("--dim", choices=DIMENSIONS + ("frontier",), required=True)
    p.add_argument("--slice", type=int, required=True)
    p.add_argument("--layer", type=int, default=None, help="restrict the floor to one layer (default all)")
    p.add_argument("--values", default=None, help="comma-separated forced values (default whole domain)")
    p.add_argument("--method", choices=("exhaustive", "bnb"), default="exhaustive")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="print slice-type presets and taxonomies")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("report", help="map a plan onto the security layers")
    p.add_argument("file")
    p.add_argument("--plan", required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("lp", help="dump the root relaxation of one slice in LP format")
    p.add_argument("file")
    p.add_argument("--slice", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_lp)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
