import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import best_slice_plan, max_quality
from seeds import random_batch
from sliceiso import kernels
from sliceiso.exhaustive import (
    Status,
    attainable_maxima,
    enumerate_layer_choices,
    solve_exhaustive,
    solve_slice_exhaustive,
)
from sliceiso.fixtures import random_scenario, tiny, tiny_q5, urllc_fix
from sliceiso.model import PairRestriction


def test_tiny_optimum():
    res = solve_exhaustive(tiny())
    assert res.status is Status.OPTIMAL
    assert res.objective == pytest.approx(7.0)
    a = res.assignment
    assert [a.choice((1, p)) for p in (1, 2)] == [(1, 0.4, 1), (2, 0.8, 1)]
    assert res.stats.nodes_or_candidates == 100


def test_tiny_q5_infeasible():
    res = solve_exhaustive(tiny_q5())
    assert res.status is Status.INFEASIBLE
    assert res.infeasible_slices == (1,)
    assert math.isinf(res.objective)
    assert attainable_maxima(tiny_q5(), 1)[0] == pytest.approx(4.0)


def test_urllc_needs_air_gap_everywhere():
    res = solve_exhaustive(urllc_fix())
    assert res.status is Status.OPTIMAL
    assert all(res.assignment.I[(1, p)] == 2 for p in (1, 2))


def test_enumeration_order():
    ch = list(enumerate_layer_choices(tiny(), 1, 2))
    assert ch[0] == (1, 0.0, 1) and ch[-1] == (2, 0.8, 0)


def test_restrictions_narrow_the_search():
    forced = {(1, p): PairRestriction(i_lo=2) for p in (1, 2)}
    res = solve_slice_exhaustive(tiny(), 1, forced)
    assert res.objective == pytest.approx(8.0)
    empty = {(1, 1): PairRestriction(i_lo=3)}
    assert solve_slice_exhaustive(tiny(), 1, empty).status is Status.INFEASIBLE


def test_multi_slice_sums_slices():
    res = solve_exhaustive(tiny(n_slices=3))
    assert res.objective == pytest.approx(21.0)
    assert set(res.per_slice) == {1, 2, 3}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_table_oracle(seed):
    sc = random_scenario(np.random.default_rng(seed))
    res = solve_exhaustive(sc)
    per = {n: best_slice_plan(sc, n) for n in sc.slice_ids}
    if any(v is None for v in per.values()):
        assert res.status is Status.INFEASIBLE
        assert set(res.infeasible_slices) == {n for n, v in per.items() if v is None}
        return
    assert res.status is Status.OPTIMAL
    assert res.objective == pytest.approx(sum(c for c, _ in per.values()), abs=1e-9)
    for n, (_, choices) in per.items():
        for pair, ch in choices.items():
            assert res.assignment.choice(pair) == ch


def test_backend_choice_does_not_matter():
    for sc in random_batch(21, 20):
        a = solve_exhaustive(sc, best_product=kernels.best_product_np)
        b = solve_exhaustive(sc, best_product=kernels.best_product_nb)
        assert a.status == b.status
        assert a.assignment == b.assignment


def test_attainable_max_quality_matches_oracle():
    for sc in random_batch(4, 20):
        for n in sc.slice_ids:
            assert attainable_maxima(sc, n)[0] == pytest.approx(max_quality(sc, n), abs=1e-9)
