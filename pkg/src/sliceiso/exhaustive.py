"""Exact solver by enumeration.

Slices do not interact, so each slice is solved on its own over the product
of its layers' choice sets, and the per-slice optima are concatenated.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

import numpy as np

from . import kernels
from .evaluator import layer_cost, layer_quality, layer_security, slice_cost
from .model import (
    NO_RESTRICTION,
    TOL,
    Assignment,
    LayerChoice,
    Pair,
    PairRestriction,
    Scenario,
    allowed_choices,
)

Restrictions = Mapping[Pair, PairRestriction]


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    LIMIT = "LIMIT"


@dataclass(frozen=True)
class SolveStats:
    nodes_or_candidates: int
    wall_time: float
    lp_solves: int = 0


@dataclass(frozen=True)
class SolveResult:
    status: Status
    assignment: Optional[Assignment]
    objective: float
    stats: SolveStats
    infeasible_slices: tuple[int, ...] = ()
    # LIMIT only: best open bound, so objective - bound is the remaining gap
    bound: Optional[float] = None
    per_slice: Mapping[int, "SolveResult"] = field(default_factory=dict)

    @property
    def gap(self) -> Optional[float]:
        if self.bound is None:
            return None
        return self.objective - self.bound


@dataclass
class LayerTable:
    layer_id: int
    choices: list[LayerChoice]
    cost: np.ndarray
    quality: np.ndarray
    security: np.ndarray


def enumerate_layer_choices(scenario: Scenario, n: int, p: int) -> Iterator[LayerChoice]:
    """Every (i, t, v) of a pair: ascending i, then t, then virtual before physical."""
    yield from allowed_choices(scenario, n, p)


def layer_tables(scenario: Scenario, n: int, restrictions: Optional[Restrictions] = None) -> list[LayerTable]:
    restrictions = restrictions or {}
    tables = []
    for p in scenario.layer_order:
        choices = allowed_choices(scenario, n, p, restrictions.get((n, p), NO_RESTRICTION))
        tables.append(
            LayerTable(
                p,
                choices,
                np.array([layer_cost(scenario, n, p, i, t, v) for i, t, v in choices], dtype=np.float64),
                np.array([layer_quality(scenario, n, p, i, v) for i, t, v in choices], dtype=np.float64),
                np.array([layer_security(scenario, n, p, i, t, v) for i, t, v in choices], dtype=np.float64),
            )
        )
    return tables


def flatten_tables(tables: list[LayerTable]):
    counts = np.array([len(t.choices) for t in tables], dtype=np.int64)
    offsets = np.zeros(len(tables), dtype=np.int64)
    if len(tables) > 1:
        offsets[1:] = np.cumsum(counts)[:-1]
    cat = lambda attr: np.concatenate([getattr(t, attr) for t in tables]) if tables else np.zeros(0)
    return cat("cost"), cat("quality"), cat("security"), offsets, counts


def decode_assignment(n: int, tables: list[LayerTable], idx: int) -> Assignment:
    digits = kernels.decode_index(idx, [len(t.choices) for t in tables])
    return Assignment.from_choices({(n, t.layer_id): t.choices[d] for t, d in zip(tables, digits)})


def attainable_maxima(scenario: Scenario, n: int, restrictions: Optional[Restrictions] = None) -> tuple[float, float]:
    """Largest quality and largest security reachable by slice ``n`` (each on its own)."""
    tables = layer_tables(scenario, n, restrictions)
    if any(len(t.choices) == 0 for t in tables):
        return -math.inf, -math.inf
    q = sum((float(t.quality.max()) for t in tables), 0.0)
    s = sum((float(t.security.max()) for t in tables), 0.0)
    return q, s


def solve_slice_exhaustive(
    scenario: Scenario,
    n: int,
    restrictions: Optional[Restrictions] = None,
    best_product=None,
) -> SolveResult:
    """Minimum-cost feasible plan for slice ``n`` alone.

    Ties within TOL go to the lexicographically smallest plan over layers in
    stack order, each layer compared by (isolation, tenant control, virtual
    first).
    """
    best_product = best_product or kernels.best_product
    start = time.perf_counter()
    tables = layer_tables(scenario, n, restrictions)
    spec = scenario.slice(n)
    if any(len(t.choices) == 0 for t in tables):
        idx, total = -1, 0
    else:
        cost, q, s, offsets, counts = flatten_tables(tables)
        idx, total = best_product(cost, q, s, offsets, counts, float(spec.q_min), float(spec.s_min), TOL)
    elapsed = time.perf_counter() - start
    stats = SolveStats(int(total), elapsed)
    if idx < 0:
        return SolveResult(Status.INFEASIBLE, None, math.inf, stats, infeasible_slices=(n,))
    assignment = decode_assignment(n, tables, int(idx))
    return SolveResult(Status.OPTIMAL, assignment, slice_cost(scenario, n, assignment), stats)


def combine_slice_results(scenario: Scenario, results: Mapping[int, SolveResult], elapsed: float) -> SolveResult:
    """Merge per-slice results in slice order into one scenario-wide result."""
    stats = SolveStats(
        sum(r.stats.nodes_or_candidates for r in results.values()),
        elapsed,
        sum(r.stats.lp_solves for r in results.values()),
    )
    infeasible = tuple(n for n in scenario.slice_ids if results[n].status is Status.INFEASIBLE)
    if infeasible:
        return SolveResult(Status.INFEASIBLE, None, math.inf, stats, infeasible, per_slice=dict(results))
    merged = Assignment({}, {}, {})
    for n in scenario.slice_ids:
        merged = merged.merged(results[n].assignment)
    objective = sum((results[n].objective for n in scenario.slice_ids), 0.0)
    limited = [n for n in scenario.slice_ids if results[n].status is Status.LIMIT]
    if limited:
        bound = sum(
            (results[n].bound if results[n].bound is not None else results[n].objective for n in scenario.slice_ids),
            0.0,
        )
        return SolveResult(Status.LIMIT, merged, objective, stats, bound=bound, per_slice=dict(results))
    return SolveResult(Status.OPTIMAL, merged, objective, stats, per_slice=dict(results))


def solve_exhaustive(scenario: Scenario, restrictions: Optional[Restrictions] = None, best_product=None) -> SolveResult:
    start = time.perf_counter()
    results = {n: solve_slice_exhaustive(scenario, n, restrictions, best_product) for n in scenario.slice_ids}
    return combine_slice_results(scenario, results, time.perf_counter() - start)
