import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seeds import random_batch
from sliceiso.bnb import BnbNode, BnbOptions, branch_variable, solve_bnb, solve_slice_bnb
from sliceiso.exhaustive import Status, solve_exhaustive, solve_slice_exhaustive
from sliceiso.fixtures import random_scenario, tiny, tiny_q5, urllc_fix
from sliceiso.lp import solve_lp
from sliceiso.relaxation import build_relaxation


def test_tiny():
    res = solve_bnb(tiny())
    assert res.status is Status.OPTIMAL
    assert res.objective == pytest.approx(7.0)
    assert res.assignment == solve_exhaustive(tiny()).assignment
    assert res.stats.lp_solves >= 1


def test_fixtures_agree_with_exhaustive():
    for sc in (tiny_q5(), urllc_fix(), tiny(n_slices=2)):
        a, b = solve_bnb(sc), solve_exhaustive(sc)
        assert a.status == b.status
        assert a.assignment == b.assignment
        assert a.infeasible_slices == b.infeasible_slices


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_exhaustive(seed):
    sc = random_scenario(np.random.default_rng(seed))
    a, b = solve_bnb(sc), solve_exhaustive(sc)
    assert a.status == b.status
    if b.status is Status.OPTIMAL:
        assert abs(a.objective - b.objective) <= 1e-9
        assert a.assignment == b.assignment


def test_trace_is_sound():
    # every pruned or bounded node is checked against an exhaustive solve of its own subtree
    for sc in random_batch(17, 25, max_slices=2):
        trace = {}
        res = solve_bnb(sc, trace=trace)
        for n, records in trace.items():
            final = res.per_slice[n]
            assert records, "search left no trace"
            for rec in records:
                sub = solve_slice_exhaustive(sc, n, rec.restrictions)
                if sub.status is Status.OPTIMAL:
                    assert rec.bound <= sub.objective + 1e-9
                else:
                    assert rec.outcome in ("empty", "lp-infeasible") or not math.isinf(rec.bound)
                if rec.outcome == "pruned" and sub.status is Status.OPTIMAL:
                    assert sub.objective >= final.objective - 1e-9
                if rec.outcome in ("empty", "lp-infeasible"):
                    assert sub.status is Status.INFEASIBLE
                assert rec.bound >= rec.parent_bound - 1e-7


def test_node_limit_reports_gap():
    sc = random_batch(2, 1, n_slices=1, n_layers=3)[0]
    full = solve_exhaustive(sc)
    res = solve_bnb(sc, BnbOptions(node_limit=1))
    if full.status is Status.INFEASIBLE:
        pytest.skip("drawn instance is infeasible")
    assert res.status in (Status.LIMIT, Status.OPTIMAL)
    if res.status is Status.LIMIT:
        assert res.bound <= full.objective + 1e-9
        if res.assignment is not None:
            assert res.gap >= -1e-9
            assert res.objective >= full.objective - 1e-9


def test_tiny_node_limit():
    res = solve_bnb(tiny(), BnbOptions(node_limit=1))
    assert res.status is Status.LIMIT
    assert res.objective == pytest.approx(8.0)
    assert res.bound <= 7.0 + 1e-9
    assert res.gap == pytest.approx(1.0, abs=1e-6)


def test_time_limit_zero():
    res = solve_slice_bnb(tiny(), 1, options=BnbOptions(time_limit=0.0))
    assert res.status is Status.LIMIT


def test_branch_variable_picks_farthest_from_grid():
    sc = tiny()
    problem = build_relaxation(sc)
    lp = solve_lp(problem)
    node = BnbNode({}, lp.objective, 0, problem=problem, lp=lp)
    # the TINY root optimum already sits on the grid
    assert branch_variable(node, lp, problem) is None

    x = lp.x.copy()
    x[problem.index[(1, 1, "i")]] = 1.3
    x[problem.index[(1, 2, "t")]] = 0.5
    moved = dataclasses.replace(lp, x=x)
    br = branch_variable(node, moved, problem)
    assert br.var == (1, 1, "i")
    assert br.distance == pytest.approx(0.3)
    assert br.down[(1, 1)].i_hi == 1 and br.up[(1, 1)].i_lo == 2
