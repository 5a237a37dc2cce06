import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import best_slice_plan, pair_choices
from seeds import random_batch
from sliceiso.evaluator import evaluate_slice
from sliceiso.exhaustive import Status, solve_exhaustive
from sliceiso.fixtures import random_scenario, tiny, tiny_q5
from sliceiso.lp import LPStatus, solve_lp
from sliceiso.model import Assignment, PairRestriction
from sliceiso.relaxation import (
    build_relaxation,
    embed_assignment,
    envelope_value,
    lower_bound,
    lower_convex_envelope,
    restricted_domain,
    upper_concave_envelope,
)

points = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6)


@settings(max_examples=150, deadline=None)
@given(points)
def test_lower_envelope_is_convex_and_below(ys):
    xs = list(range(len(ys)))
    segs = lower_convex_envelope(xs, ys)
    for x, y in zip(xs, ys):
        assert envelope_value(segs, x) <= y + 1e-9
    # tight at both ends and convex in between
    assert envelope_value(segs, xs[0]) == pytest.approx(ys[0])
    assert envelope_value(segs, xs[-1]) == pytest.approx(ys[-1])
    slopes = [s.slope for s in segs]
    assert slopes == sorted(slopes)
    # largest convex minorant: the minimum is attained
    assert min(envelope_value(segs, x) for x in xs) == pytest.approx(min(ys))


@settings(max_examples=150, deadline=None)
@given(points)
def test_upper_envelope_is_concave_and_above(ys):
    xs = [0.5 * k for k in range(len(ys))]
    segs = upper_concave_envelope(xs, ys)
    for x, y in zip(xs, ys):
        assert envelope_value(segs, x, upper=True) >= y - 1e-9
    slopes = [s.slope for s in segs]
    assert slopes == sorted(slopes, reverse=True)
    assert max(envelope_value(segs, x, upper=True) for x in xs) == pytest.approx(max(ys))


def test_tiny_root_bound():
    lb = lower_bound(tiny())
    assert lb <= 7.0 + 1e-9
    assert lb > 5.0


def test_tiny_q5_root_is_infeasible():
    assert math.isinf(lower_bound(tiny_q5()))


def test_empty_node_is_infinite():
    assert build_relaxation(tiny(), {(1, 1): PairRestriction(i_lo=3)}) is None
    assert math.isinf(lower_bound(tiny(), {(1, 1): PairRestriction(i_lo=3)}))


def test_restricted_domain():
    d = restricted_domain(tiny(), 1, 1, PairRestriction(t_lo=0.4, v_hi=0))
    assert d.levels == (1, 2) and d.controls == (0.4, 0.8) and d.vs == (0,)
    assert d.t_top == {1: 0.4, 2: 0.8}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_feasible_plan_embeds_below_its_cost(seed):
    # the relaxation is valid iff each integer plan maps to an LP point costing no more
    rng = np.random.default_rng(seed)
    sc = random_scenario(rng, max_slices=1)
    problem = build_relaxation(sc)
    n = sc.slice_ids[0]
    for _ in range(20):
        choices = {}
        for pair in sc.pairs():
            opts = pair_choices(sc, *pair)
            choices[pair] = opts[int(rng.integers(len(opts)))]
        a = Assignment.from_choices(choices)
        ev = evaluate_slice(sc, n, a)
        if not ev.feasible:
            continue
        x = embed_assignment(problem, a)
        assert problem.lp.max_violation(x) <= 1e-9
        assert problem.lp.objective_at(x) <= ev.cost + 1e-9


def test_bound_never_exceeds_optimum():
    for sc in random_batch(8, 60):
        res = solve_exhaustive(sc)
        lb = lower_bound(sc)
        if res.status is Status.OPTIMAL:
            assert lb <= res.objective + 1e-9
        for n in sc.slice_ids:
            best = best_slice_plan(sc, n)
            if best is not None:
                assert lower_bound(sc.subscenario([n])) <= best[0] + 1e-9


def test_fixed_nodes_bound_equals_plan_cost():
    # with every pair pinned to one choice the envelopes are exact
    sc = tiny()
    r = {(1, 1): PairRestriction(1, 1, 0.4, 0.4, 1, 1), (1, 2): PairRestriction(2, 2, 0.8, 0.8, 1, 1)}
    sol = solve_lp(build_relaxation(sc, r))
    assert sol.status is LPStatus.OPTIMAL
    assert sol.objective == pytest.approx(7.0, abs=1e-9)
