import dataclasses

import pytest

from seeds import PAIR, random_batch, replace_pair, seeded_violations
from sliceiso.fixtures import tiny
from sliceiso.model import (
    NO_RESTRICTION,
    Assignment,
    AssignmentError,
    PairRestriction,
    ScenarioError,
    allowed_choices,
    check_assignment,
    choice_key,
    clean,
    feasible_controls,
    lookup_control,
    validate_scenario,
)


def test_tiny_is_valid():
    report = validate_scenario(tiny())
    assert report.ok
    assert report.codes() == []
    assert "no violations" in report.to_text()


@pytest.mark.parametrize("label", list(seeded_violations()))
def test_single_breakage_gives_its_code(label):
    report = validate_scenario(seeded_violations()[label])
    assert report.codes() == [label.split("-")[0]]
    (v,) = report.violations
    assert (v.slice_id, v.layer_id) == PAIR
    assert v.to_dict()["code"] == v.code


def test_random_scenarios_are_valid():
    for sc in random_batch(3, 50):
        assert validate_scenario(sc).ok


def test_missing_costs_is_struct():
    sc = tiny()
    costs = dict(sc.costs)
    del costs[PAIR]
    report = validate_scenario(dataclasses.replace(sc, costs=costs))
    assert report.codes() == ["STRUCT"]
    assert "costs" in report.to_text()


def test_struct_problems():
    sc = tiny()
    dom = sc.domain[PAIR]
    bad_grid = replace_pair(sc, PAIR, domain=dataclasses.replace(dom, control_grid=(0.4, 0.8)))
    assert "STRUCT" in validate_scenario(bad_grid).codes()
    bad_tmax = replace_pair(sc, PAIR, domain=dataclasses.replace(dom, t_max={1: 0.4, 2: 1.0}))
    assert "STRUCT" in validate_scenario(bad_tmax).codes()
    keys = replace_pair(sc, PAIR, quality=dataclasses.replace(sc.quality[PAIR], phi={1: 1.0}))
    assert "STRUCT" in validate_scenario(keys).codes()
    stack = dataclasses.replace(sc, layers=(sc.layers[0], dataclasses.replace(sc.layers[1], stack_position=5)))
    assert "STRUCT" in validate_scenario(stack).codes()


def test_each_pair_reports_separately():
    sc = seeded_violations()["Eq3"]
    sc = replace_pair(sc, (1, 2), costs=sc.costs[PAIR])
    v = validate_scenario(sc).violations
    assert [(x.code, x.layer_id) for x in v] == [("Eq3", 1), ("Eq3", 2)]


def test_feasible_controls_respect_cap():
    sc = tiny()
    assert feasible_controls(sc, 1, 1, 1) == (0.0, 0.4)
    assert feasible_controls(sc, 1, 1, 2) == (0.0, 0.4, 0.8)
    with pytest.raises(ScenarioError):
        feasible_controls(sc, 1, 1, 3)


def test_canonical_choice_order():
    ch = allowed_choices(tiny(), 1, 1)
    assert ch[:3] == [(1, 0.0, 1), (1, 0.0, 0), (1, 0.4, 1)]
    assert len(ch) == 10
    assert [choice_key(c) for c in ch] == sorted(choice_key(c) for c in ch)


def test_restrictions_filter_and_intersect():
    r = PairRestriction(i_lo=2).intersect(PairRestriction(t_hi=0.4, v_lo=1))
    assert allowed_choices(tiny(), 1, 1, r) == [(2, 0.0, 1), (2, 0.4, 1)]
    assert NO_RESTRICTION.allowed_v() == (1, 0)
    assert PairRestriction(v_lo=1, v_hi=0).allowed_v() == ()


def test_check_assignment():
    sc = tiny()
    good = Assignment.from_choices({(1, 1): (1, 0.4, 1), (1, 2): (2, 0.8, 1)})
    check_assignment(sc, good)
    assert good.mno((1, 2)) == pytest.approx(0.2)
    over_cap = Assignment.from_choices({(1, 1): (1, 0.8, 1), (1, 2): (2, 0.8, 1)})
    with pytest.raises(AssignmentError) as err:
        check_assignment(sc, over_cap)
    assert list(err.value.pairs) == [(1, 1)]
    off_grid = Assignment.from_choices({(1, 1): (1, 0.3, 1), (1, 2): (2, 0.8, 1)})
    with pytest.raises(AssignmentError):
        check_assignment(sc, off_grid)
    with pytest.raises(AssignmentError):
        check_assignment(sc, Assignment.from_choices({(1, 1): (1, 0.0, 1)}))


def test_subscenario_and_order():
    sc = tiny(n_slices=3)
    sub = sc.subscenario([2])
    assert sub.slice_ids == (2,)
    assert set(sub.domain) == {(2, 1), (2, 2)}
    flipped = dataclasses.replace(
        sc, layers=tuple(dataclasses.replace(l, stack_position=3 - l.stack_position) for l in sc.layers)
    )
    assert flipped.layer_order == (2, 1)
    with pytest.raises(ScenarioError):
        sc.slice(9)


def test_lookup_and_clean():
    assert lookup_control({0.0: 3.0, 0.4: 2.0}, 0.4 + 1e-12) == 2.0
    with pytest.raises(ScenarioError):
        lookup_control({0.0: 3.0}, 0.5)
    assert clean(0.1 + 0.2) == 0.3
    assert clean(-0.0) == 0.0
