"""Continuous relaxation of the planning problem.

Every discrete decision of a pair becomes an interval: isolation ``i`` spans
its allowed levels, tenant control ``t`` its allowed grid range, and ``v``
the unit interval.  Table-driven terms are replaced by piecewise-linear
envelopes over the allowed grid points:

* costs use the convex lower envelope (epigraph variables ``zc``, ``zo``),
* quality and security use the concave upper envelope (``wq``, ``ws``),
* the control cap ``t <= t_max(i)`` uses the concave upper envelope of the
  largest admissible grid control per level.

Physical-vs-virtual cost is bounded below by the virtual envelope plus
``(1 - v) * min_i (c_phys - c_virt)``.  Any integer plan inside the node maps
to an LP-feasible point whose LP objective does not exceed its true cost,
so the LP optimum is a valid lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .lp import LinearProgram, LPSolution, LPStatus, solve_lp
from .model import NO_RESTRICTION, TOL, Assignment, Pair, PairRestriction, Scenario, lookup_control

KINDS = ("i", "t", "v")
AUX = ("zc", "zo", "wq", "ws")


@dataclass(frozen=True)
class Segment:
    """Line ``intercept + slope * x`` on ``[x0, x1]``."""

    x0: float
    x1: float
    slope: float
    intercept: float

    def __call__(self, x: float) -> float:
        return self.intercept + self.slope * x


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_segments(xs, ys, lower: bool) -> list[Segment]:
    pts = sorted(zip(map(float, xs), map(float, ys)))
    if len(pts) == 1:
        x, y = pts[0]
        return [Segment(x, x, 0.0, y)]
    hull: list[tuple[float, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            turn = _cross(hull[-2], hull[-1], pt)
            if (turn <= 0) if lower else (turn >= 0):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = (y1 - y0) / (x1 - x0)
        segs.append(Segment(x0, x1, slope, y0 - slope * x0))
    return segs


def lower_convex_envelope(xs, ys) -> list[Segment]:
    """Segments of the largest convex function below the points (xs ascending, distinct)."""
    return _hull_segments(xs, ys, lower=True)


def upper_concave_envelope(xs, ys) -> list[Segment]:
    return _hull_segments(xs, ys, lower=False)


def envelope_value(segs: list[Segment], x: float, upper: bool = False) -> float:
    """Evaluate an envelope: max of the lines for a lower hull, min for an upper one."""
    vals = [s(x) for s in segs]
    return min(vals) if upper else max(vals)


@dataclass(frozen=True)
class PairDomain:
    """Discrete choices of one pair left open by a node's restriction."""

    levels: tuple[int, ...]
    controls: tuple[float, ...]
    vs: tuple[int, ...]
    # largest admissible control per allowed level
    t_top: Mapping[int, float]

    @property
    def size(self) -> int:
        return len(self.levels) * len(self.controls) * len(self.vs)


def restricted_domain(
    scenario: Scenario, n: int, p: int, restriction: PairRestriction = NO_RESTRICTION
) -> Optional[PairDomain]:
    """Allowed levels/controls/flags of a pair, or None when nothing survives."""
    dom = scenario.domain[(n, p)]
    vs = tuple(sorted(restriction.allowed_v()))
    controls = [t for t in dom.control_grid if restriction.allows_control(t)]
    if not vs or not controls:
        return None
    t_top = {}
    for i in dom.levels:
        if not restriction.allows_level(i):
            continue
        ok = [t for t in controls if t <= dom.t_max[i] + TOL]
        if ok:
            t_top[i] = max(ok)
    if not t_top:
        return None
    cap = max(t_top.values())
    return PairDomain(tuple(sorted(t_top)), tuple(t for t in controls if t <= cap + TOL), vs, t_top)


@dataclass
class RelaxedProblem:
    lp: LinearProgram
    index: dict[tuple[int, int, str], int]
    domains: dict[Pair, PairDomain]
    segments: dict[tuple[int, int, str], list[Segment]] = field(default_factory=dict)
    physical_gap: dict[Pair, float] = field(default_factory=dict)

    def value(self, x: np.ndarray, n: int, p: int, kind: str) -> float:
        return float(x[self.index[(n, p, kind)]])


class _Rows:
    def __init__(self, nvar):
        self.nvar = nvar
        self.A: list[np.ndarray] = []
        self.b: list[float] = []

    def le(self, coeffs: dict[int, float], rhs: float):
        row = np.zeros(self.nvar)
        for j, a in coeffs.items():
            row[j] += a
        self.A.append(row)
        self.b.append(rhs)


def build_relaxation(
    scenario: Scenario, node_restrictions: Optional[Mapping[Pair, PairRestriction]] = None
) -> Optional[RelaxedProblem]:
    """LP relaxation of the (restricted) problem; None if a pair has no admissible choice."""
    node_restrictions = node_restrictions or {}
    pairs = list(scenario.pairs())
    domains = {}
    for n, p in pairs:
        d = restricted_domain(scenario, n, p, node_restrictions.get((n, p), NO_RESTRICTION))
        if d is None:
            return None
        domains[(n, p)] = d

    index: dict[tuple[int, int, str], int] = {}
    names = []
    for n, p in pairs:
        for kind in KINDS + AUX:
            index[(n, p, kind)] = len(names)
            names.append(f"{kind}[{n},{p}]")
    nvar = len(names)
    c = np.zeros(nvar)
    lb = np.zeros(nvar)
    ub = np.zeros(nvar)
    rows = _Rows(nvar)
    constant = 0.0
    segments: dict[tuple[int, int, str], list[Segment]] = {}
    gaps: dict[Pair, float] = {}

    for n, p in pairs:
        d = domains[(n, p)]
        costs = scenario.costs[(n, p)]
        qm = scenario.quality[(n, p)]
        sm = scenario.security[(n, p)]
        col = {k: index[(n, p, k)] for k in KINDS + AUX}
        lv = list(d.levels)

        lb[col["i"]], ub[col["i"]] = lv[0], lv[-1]
        lb[col["t"]], ub[col["t"]] = d.controls[0], d.controls[-1]
        lb[col["v"]], ub[col["v"]] = d.vs[0], d.vs[-1]

        if d.vs == (0,):
            infra = [costs.physical[i] for i in lv]
            gap = 0.0
        else:
            infra = [costs.virtual[i] for i in lv]
            gap = min(costs.physical[i] - costs.virtual[i] for i in lv) if 0 in d.vs else 0.0
        gaps[(n, p)] = gap
        op = [lookup_control(costs.operations, t) for t in d.controls]
        phi = [qm.phi[i] for i in lv]
        sigma = [sm.sigma[i] for i in lv]
        tcap = [d.t_top[i] for i in lv]

        env = {
            "zc": lower_convex_envelope(lv, infra),
            "zo": lower_convex_envelope(d.controls, op),
            "wq": upper_concave_envelope(lv, phi),
            "ws": upper_concave_envelope(lv, sigma),
            "tcap": upper_concave_envelope(lv, tcap),
        }
        for key, segs in env.items():
            segments[(n, p, key)] = segs

        # epigraph rows: z >= a + b x  ->  b x - z <= -a
        for seg in env["zc"]:
            rows.le({col["i"]: seg.slope, col["zc"]: -1.0}, -seg.intercept)
        for seg in env["zo"]:
            rows.le({col["t"]: seg.slope, col["zo"]: -1.0}, -seg.intercept)
        # hypograph rows: w <= a + b x  ->  w - b x <= a
        for seg in env["wq"]:
            rows.le({col["wq"]: 1.0, col["i"]: -seg.slope}, seg.intercept)
        for seg in env["ws"]:
            rows.le({col["ws"]: 1.0, col["i"]: -seg.slope}, seg.intercept)
        for seg in env["tcap"]:
            rows.le({col["t"]: 1.0, col["i"]: -seg.slope}, seg.intercept)

        lb[col["zc"]], ub[col["zc"]] = min(infra), max(infra)
        lb[col["zo"]], ub[col["zo"]] = min(op), max(op)
        lb[col["wq"]], ub[col["wq"]] = min(phi), max(phi)
        lb[col["ws"]], ub[col["ws"]] = min(sigma), max(sigma)

        c[col["zc"]] += 1.0
        c[col["zo"]] += 1.0
        c[col["v"]] -= gap
        constant += gap

    for n in scenario.slice_ids:
        spec = scenario.slice(n)
        q_row: dict[int, float] = {}
        s_row: dict[int, float] = {}
        q_rhs, s_rhs = -spec.q_min, -spec.s_min
        for p in scenario.layer_order:
            qm, sm = scenario.quality[(n, p)], scenario.security[(n, p)]
            q_row[index[(n, p, "wq")]] = -1.0
            q_row[index[(n, p, "v")]] = qm.phys_bonus
            q_rhs += qm.phys_bonus
            s_row[index[(n, p, "ws")]] = -1.0
            s_row[index[(n, p, "t")]] = -sm.alpha
            s_row[index[(n, p, "v")]] = sm.phys_bonus
            s_rhs += sm.phys_bonus
        # sum(w + bonus * (1 - v)) >= min, written as <=
        rows.le(q_row, q_rhs + TOL)
        rows.le(s_row, s_rhs + TOL)

    A_ub = np.array(rows.A) if rows.A else np.zeros((0, nvar))
    lp = LinearProgram(c, A_ub, np.array(rows.b), np.zeros((0, nvar)), np.zeros(0), lb, ub, names, constant)
    return RelaxedProblem(lp, index, domains, segments, gaps)


def embed_assignment(problem: RelaxedProblem, assignment: Assignment) -> np.ndarray:
    """Continuous point of an integer plan, auxiliaries set to their envelope values."""
    x = np.zeros(problem.lp.n_vars)
    for (n, p), _ in problem.domains.items():
        i, t, v = assignment.choice((n, p))
        seg = problem.segments
        x[problem.index[(n, p, "i")]] = i
        x[problem.index[(n, p, "t")]] = t
        x[problem.index[(n, p, "v")]] = v
        x[problem.index[(n, p, "zc")]] = envelope_value(seg[(n, p, "zc")], i)
        x[problem.index[(n, p, "zo")]] = envelope_value(seg[(n, p, "zo")], t)
        x[problem.index[(n, p, "wq")]] = envelope_value(seg[(n, p, "wq")], i, upper=True)
        x[problem.index[(n, p, "ws")]] = envelope_value(seg[(n, p, "ws")], i, upper=True)
    return x


def solve_relaxation(
    scenario: Scenario, node_restrictions: Optional[Mapping[Pair, PairRestriction]] = None
) -> tuple[Optional[RelaxedProblem], Optional[LPSolution]]:
    problem = build_relaxation(scenario, node_restrictions)
    if problem is None:
        return None, None
    return problem, solve_lp(problem)


def lower_bound(scenario: Scenario, node_restrictions: Optional[Mapping[Pair, PairRestriction]] = None) -> float:
    """LP bound on the best plan inside the restrictions.

    ``math.inf`` marks a node with no admissible choice or an infeasible LP.
    """
    problem, sol = solve_relaxation(scenario, node_restrictions)
    if problem is None or sol.status is LPStatus.INFEASIBLE:
        return math.inf
    return sol.objective
