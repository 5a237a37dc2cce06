"""Branch-and-bound over the discrete (I, T, V) grids.

Each slice is searched independently, best-first on the LP bound.  Leaves
are priced with the exact evaluator, and the incumbent follows the same
tie-break as the exhaustive solver, so both return the same plan.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from typing import Mapping, Optional

from .evaluator import evaluate_slice
from .exhaustive import Restrictions, SolveResult, SolveStats, Status, combine_slice_results
from .lp import LPSolution, LPStatus, solve_lp
from .model import (
    NO_RESTRICTION,
    TOL,
    Assignment,
    AssignmentError,
    Pair,
    PairRestriction,
    Scenario,
    check_assignment,
    choice_key,
)
from .relaxation import KINDS, RelaxedProblem, build_relaxation, restricted_domain

GRID_TOL = 1e-7


@dataclass
class BnbNode:
    restrictions: dict[Pair, PairRestriction]
    bound: float
    depth: int
    parent_bound: float = -math.inf
    problem: Optional[RelaxedProblem] = None
    lp: Optional[LPSolution] = None


@dataclass(frozen=True)
class Branch:
    var: tuple[int, int, str]
    value: float
    distance: float
    down: dict[Pair, PairRestriction]
    up: dict[Pair, PairRestriction]


@dataclass(frozen=True)
class NodeRecord:
    """One step of the search, kept when a trace list is passed in."""

    restrictions: Mapping[Pair, PairRestriction]
    bound: float
    parent_bound: float
    depth: int
    outcome: str
    # best plan held when the record was written
    incumbent: Optional[Assignment] = None
    incumbent_cost: float = math.inf


@dataclass
class BnbOptions:
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None


def _allowed_points(problem: RelaxedProblem, pair: Pair, kind: str) -> tuple:
    d = problem.domains[pair]
    return {"i": d.levels, "t": d.controls, "v": d.vs}[kind]


def _split(restrictions, pair: Pair, kind: str, below, above):
    base = restrictions.get(pair, NO_RESTRICTION)
    if kind == "i":
        lo, hi = PairRestriction(i_hi=below), PairRestriction(i_lo=above)
    elif kind == "t":
        lo, hi = PairRestriction(t_hi=below), PairRestriction(t_lo=above)
    else:
        lo, hi = PairRestriction(v_hi=int(below)), PairRestriction(v_lo=int(above))
    return {**restrictions, pair: base.intersect(lo)}, {**restrictions, pair: base.intersect(hi)}


def _ordered_vars(problem: RelaxedProblem):
    # (n, p, kind) in slice order, stack order, kind order i < t < v
    for pair in problem.domains:
        for kind in KINDS:
            yield pair, kind


def branch_variable(node: BnbNode, lp: LPSolution, problem: RelaxedProblem) -> Optional[Branch]:
    """Pick the relaxed value farthest from its nearest allowed grid point.

    Splits that variable's allowed set into ``<= nearest below`` and
    ``>= nearest above``.  Returns None when every value sits on its grid.
    """
    best = None
    for pair, kind in _ordered_vars(problem):
        x = problem.value(lp.x, pair[0], pair[1], kind)
        pts = _allowed_points(problem, pair, kind)
        dist = min(abs(x - g) for g in pts)
        if dist <= GRID_TOL:
            continue
        if best is None or dist > best[0] + 1e-12:
            best = (dist, pair, kind, x, pts)
    if best is None:
        return None
    dist, pair, kind, x, pts = best
    below = max(g for g in pts if g < x)
    above = min(g for g in pts if g > x)
    down, up = _split(node.restrictions, pair, kind, below, above)
    return Branch((pair[0], pair[1], kind), x, dist, down, up)


def _fallback_branch(node: BnbNode, snapped: Mapping[tuple, float], problem: RelaxedProblem) -> Optional[Branch]:
    """Split the first still-open variable at its on-grid LP value."""
    for pair, kind in _ordered_vars(problem):
        pts = _allowed_points(problem, pair, kind)
        if len(pts) < 2:
            continue
        x = snapped[(pair, kind)]
        k = pts.index(x)
        below, above = (pts[k], pts[k + 1]) if k + 1 < len(pts) else (pts[k - 1], pts[k])
        down, up = _split(node.restrictions, pair, kind, below, above)
        return Branch((pair[0], pair[1], kind), x, 0.0, down, up)
    return None


def _snap(problem: RelaxedProblem, lp: LPSolution) -> dict:
    out = {}
    for pair, kind in _ordered_vars(problem):
        x = problem.value(lp.x, pair[0], pair[1], kind)
        pts = _allowed_points(problem, pair, kind)
        out[(pair, kind)] = min(pts, key=lambda g: abs(x - g))
    return out


def _node_min_key(problem: RelaxedProblem) -> tuple:
    return tuple(choice_key((d.levels[0], d.controls[0], max(d.vs))) for d in problem.domains.values())


class _SliceSearch:
    def __init__(self, scenario: Scenario, n: int, restrictions, options: BnbOptions, deadline, trace):
        self.sc = scenario.subscenario([n])
        self.n = n
        self.order = scenario.layer_order
        self.base = {k: v for k, v in (restrictions or {}).items() if k[0] == n}
        self.options = options
        self.deadline = deadline
        self.trace = trace
        self.best: Optional[tuple[float, tuple, Assignment]] = None
        self.nodes = 0
        self.lp_solves = 0
        self.counter = itertools.count()

    def record(self, restrictions, bound, parent_bound, depth, outcome):
        if self.trace is not None:
            inc, cost = (self.best[2], self.best[0]) if self.best is not None else (None, math.inf)
            self.trace.append(NodeRecord(dict(restrictions), bound, parent_bound, depth, outcome, inc, cost))

    def offer(self, choices: Mapping[Pair, tuple]) -> None:
        a = Assignment.from_choices(choices)
        try:
            check_assignment(self.sc, a)
        except AssignmentError:
            return
        ev = evaluate_slice(self.sc, self.n, a)
        if not ev.feasible:
            return
        key = tuple(choice_key(a.choice((self.n, p))) for p in self.order)
        if self.best is None:
            self.best = (ev.cost, key, a)
            return
        cost, best_key, _ = self.best
        if ev.cost < cost - TOL or (ev.cost <= cost + TOL and key < best_key):
            self.best = (ev.cost, key, a)

    def prunable(self, bound: float, problem: Optional[RelaxedProblem]) -> bool:
        if self.best is None:
            return False
        cost, key, _ = self.best
        if bound > cost + TOL:
            return True
        return problem is not None and bound >= cost - TOL and _node_min_key(problem) >= key

    def make_node(self, restrictions, depth, parent_bound) -> Optional[BnbNode]:
        self.nodes += 1
        problem = build_relaxation(self.sc, restrictions)
        if problem is None:
            self.record(restrictions, math.inf, parent_bound, depth, "empty")
            return None
        lp = solve_lp(problem)
        self.lp_solves += 1
        if lp.status is not LPStatus.OPTIMAL:
            self.record(restrictions, math.inf, parent_bound, depth, "lp-infeasible")
            return None
        return BnbNode(dict(restrictions), lp.objective, depth, parent_bound, problem, lp)

    def greedy_probe(self) -> None:
        choices = {}
        for p in self.order:
            d = restricted_domain(self.sc, self.n, p, self.base.get((self.n, p), NO_RESTRICTION))
            if d is None:
                return
            top = d.levels[-1]
            choices[(self.n, p)] = (top, d.t_top[top], max(d.vs))
        self.offer(choices)

    def out_of_budget(self) -> bool:
        lim = self.options.node_limit
        if lim is not None and self.nodes >= lim:
            return True
        return self.deadline is not None and time.perf_counter() > self.deadline

    def run(self) -> SolveResult:
        start = time.perf_counter()
        self.greedy_probe()
        heap = []
        root = self.make_node(self.base, 0, -math.inf)
        if root is not None:
            self.record(root.restrictions, root.bound, root.parent_bound, 0, "open")
            heapq.heappush(heap, (root.bound, 0, next(self.counter), root))
        limited = False
        while heap:
            bound, _, _, node = heapq.heappop(heap)
            if self.prunable(bound, node.problem):
                self.record(node.restrictions, bound, node.parent_bound, node.depth, "pruned")
                continue
            if self.out_of_budget():
                heapq.heappush(heap, (bound, -node.depth, next(self.counter), node))
                limited = True
                break
            problem, lp = node.problem, node.lp
            if all(d.size == 1 for d in problem.domains.values()):
                self.offer({pair: (d.levels[0], d.controls[0], d.vs[0]) for pair, d in problem.domains.items()})
                self.record(node.restrictions, bound, node.parent_bound, node.depth, "leaf")
                continue
            branch = branch_variable(node, lp, problem)
            if branch is None:
                snapped = _snap(problem, lp)
                self.offer(
                    {pair: (snapped[(pair, "i")], snapped[(pair, "t")], snapped[(pair, "v")]) for pair in problem.domains}
                )
                branch = _fallback_branch(node, snapped, problem)
            self.record(node.restrictions, bound, node.parent_bound, node.depth, "branched")
            for child_r in (branch.down, branch.up):
                child = self.make_node(child_r, node.depth + 1, bound)
                if child is None:
                    continue
                if self.prunable(child.bound, child.problem):
                    self.record(child.restrictions, child.bound, bound, child.depth, "pruned")
                    continue
                heapq.heappush(heap, (child.bound, -child.depth, next(self.counter), child))

        stats = SolveStats(self.nodes, time.perf_counter() - start, self.lp_solves)
        if limited:
            open_bound = min(b for b, *_ in heap)
            if self.best is None:
                return SolveResult(Status.LIMIT, None, math.inf, stats, bound=open_bound)
            cost, _, a = self.best
            return SolveResult(Status.LIMIT, a, cost, stats, bound=min(open_bound, cost))
        if self.best is None:
            return SolveResult(Status.INFEASIBLE, None, math.inf, stats, infeasible_slices=(self.n,))
        return SolveResult(Status.OPTIMAL, self.best[2], self.best[0], stats)


def solve_slice_bnb(
    scenario: Scenario,
    n: int,
    restrictions: Optional[Restrictions] = None,
    options: Optional[BnbOptions] = None,
    trace: Optional[list] = None,
    deadline: Optional[float] = None,
) -> SolveResult:
    options = options or BnbOptions()
    if deadline is None and options.time_limit is not None:
        deadline = time.perf_counter() + options.time_limit
    return _SliceSearch(scenario, n, restrictions, options, deadline, trace).run()


def solve_bnb(
    scenario: Scenario,
    options: Optional[BnbOptions] = None,
    restrictions: Optional[Restrictions] = None,
    trace: Optional[dict] = None,
) -> SolveResult:
    """Exact minimum-cost plan by per-slice branch-and-bound.

    ``trace``, when given, is filled with one NodeRecord list per slice.
    """
    options = options or BnbOptions()
    start = time.perf_counter()
    deadline = start + options.time_limit if options.time_limit is not None else None
    results = {}
    for n in scenario.slice_ids:
        slice_trace = None
        if trace is not None:
            slice_trace = trace.setdefault(n, [])
        results[n] = solve_slice_bnb(scenario, n, restrictions, options, slice_trace, deadline)
    return combine_slice_results(scenario, results, time.perf_counter() - start)
