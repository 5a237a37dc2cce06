"""Trade-off sweeps and the security/cost frontier of one slice."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bnb import solve_slice_bnb
from .evaluator import evaluate_slice
from .exhaustive import Status, decode_assignment, flatten_tables, layer_tables, solve_slice_exhaustive
from .model import TOL, Assignment, PairRestriction, Scenario, clean

DIMENSIONS = ("isolation_floor", "tenant_control_floor", "mno_control_floor")
SWEEP_COLUMNS = ("forced_value", "optimal_cost", "q", "s", "tenant_control_sum", "mno_control_sum", "feasible")
FRONTIER_COLUMNS = ("slice", "cost", "s", "q", "tenant_control_sum", "mno_control_sum", "assignment")


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    dimension: str
    slice_id: int
    layer_id: Optional[int] = None
    values: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class SweepRow:
    forced_value: float
    feasible: bool
    optimal_cost: Optional[float] = None
    q: Optional[float] = None
    s: Optional[float] = None
    tenant_control_sum: Optional[float] = None
    mno_control_sum: Optional[float] = None
    assignment: Optional[Assignment] = None


def _targets(scenario: Scenario, spec: SweepSpec):
    if spec.dimension not in DIMENSIONS:
        raise SweepError(f"unknown sweep dimension {spec.dimension!r}; expected one of {DIMENSIONS}")
    if spec.slice_id not in scenario.slice_ids:
        raise SweepError(f"unknown slice {spec.slice_id}")
    if spec.layer_id is not None and spec.layer_id not in scenario.layer_order:
        raise SweepError(f"unknown layer {spec.layer_id}")
    layers = scenario.layer_order if spec.layer_id is None else (spec.layer_id,)
    return [(spec.slice_id, p) for p in layers]


def _domain_values(scenario: Scenario, spec: SweepSpec) -> list[float]:
    vals: set[float] = set()
    for pair in _targets(scenario, spec):
        d = scenario.domain[pair]
        if spec.dimension == "isolation_floor":
            vals.update(float(i) for i in d.levels)
        elif spec.dimension == "tenant_control_floor":
            vals.update(d.control_grid)
        else:
            vals.update(clean(1.0 - t) for t in d.control_grid)
    return sorted(vals)


def sweep_values(scenario: Scenario, spec: SweepSpec) -> list[float]:
    """Forced values to visit: the requested ones (checked), else the whole domain."""
    domain = _domain_values(scenario, spec)
    if spec.values is None:
        return domain
    out = []
    for v in spec.values:
        if not any(abs(v - d) <= TOL for d in domain):
            raise SweepError(f"forced value {v} lies outside the {spec.dimension} domain {domain}")
        out.append(float(v))
    return sorted(out)


def forced_restrictions(scenario: Scenario, spec: SweepSpec, value: float) -> dict:
    if spec.dimension == "isolation_floor":
        r = PairRestriction(i_lo=value)
    elif spec.dimension == "tenant_control_floor":
        r = PairRestriction(t_lo=value)
    else:
        r = PairRestriction(t_hi=1.0 - value)
    return {pair: r for pair in _targets(scenario, spec)}


def run_sweep(scenario: Scenario, spec: SweepSpec, method: str = "exhaustive") -> list[SweepRow]:
    n = spec.slice_id
    rows = []
    for value in sweep_values(scenario, spec):
        restrictions = forced_restrictions(scenario, spec, value)
        if method == "bnb":
            res = solve_slice_bnb(scenario, n, restrictions)
        else:
            res = solve_slice_exhaustive(scenario, n, restrictions)
        if res.status is not Status.OPTIMAL:
            rows.append(SweepRow(value, False))
            continue
        a = res.assignment
        ev = evaluate_slice(scenario, n, a)
        pairs = [(n, p) for p in scenario.layer_order]
        rows.append(
            SweepRow(
                value,
                True,
                ev.cost,
                ev.quality,
                ev.security,
                sum(a.T[k] for k in pairs),
                sum(a.mno(k) for k in pairs),
                a,
            )
        )
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(clean(x))


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in SWEEP_COLUMNS])
    return buf.getvalue()


@dataclass(frozen=True)
class FrontierPoint:
    cost: float
    security: float
    quality: float
    assignment: Assignment


def pareto_frontier(scenario: Scenario, n: int, restrictions=None, collect_product=None) -> list[FrontierPoint]:
    """Feasible plans of slice ``n`` not beaten on both cost (lower) and security (higher).

    One plan per distinct (cost, security) point, the lexicographically
    first; points come out by ascending cost.
    """
    collect_product = collect_product or kernels.collect_product
    tables = layer_tables(scenario, n, restrictions)
    if any(len(t.choices) == 0 for t in tables):
        return []
    cost, q, s, offsets, counts = flatten_tables(tables)
    spec = scenario.slice(n)
    idx, c, qq, ss = collect_product(cost, q, s, offsets, counts, float(spec.q_min), float(spec.s_min), TOL)
    order = np.lexsort((idx, -ss, c))
    points = []
    best_s = -np.inf
    for k in order:
        if ss[k] > best_s + TOL:
            best_s = ss[k]
            a = decode_assignment(n, tables, int(idx[k]))
            ev = evaluate_slice(scenario, n, a)
            points.append(FrontierPoint(ev.cost, ev.security, ev.quality, a))
    return points


def frontier_to_csv(scenario: Scenario, n: int, points: Sequence[FrontierPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FRONTIER_COLUMNS)
    pairs = [(n, p) for p in scenario.layer_order]
    for pt in points:
        a = pt.assignment
        plan = " ".join(f"{p}:{a.I[(n, p)]}/{_fmt(a.T[(n, p)])}/{a.V[(n, p)]}" for _, p in pairs)
        w.writerow(
            [
                n,
                _fmt(pt.cost),
                _fmt(pt.security),
                _fmt(pt.quality),
                _fmt(sum(a.T[k] for k in pairs)),
                _fmt(sum(a.mno(k) for k in pairs)),
                plan,
            ]
        )
    return buf.getvalue()
