"""Cost, quality and security of an assignment, and constraint feasibility."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import TOL, Assignment, Scenario, ScenarioError, check_assignment, lookup_control


def infrastructural_cost(scenario: Scenario, n: int, p: int, i: int, v: int) -> float:
    """Virtual cost when ``v == 1``, physical cost when ``v == 0``."""
    tables = scenario.costs[(n, p)]
    table = tables.virtual if v else tables.physical
    try:
        return table[i]
    except KeyError:
        raise ScenarioError(f"level {i} not defined for pair {(n, p)}") from None


def operations_cost(scenario: Scenario, n: int, p: int, t: float) -> float:
    return lookup_control(scenario.costs[(n, p)].operations, t)


def layer_cost(scenario: Scenario, n: int, p: int, i: int, t: float, v: int) -> float:
    return infrastructural_cost(scenario, n, p, i, v) + operations_cost(scenario, n, p, t)


def layer_quality(scenario: Scenario, n: int, p: int, i: int, v: int) -> float:
    qm = scenario.quality[(n, p)]
    return qm.phi[i] + qm.phys_bonus * (1 - v)


def layer_security(scenario: Scenario, n: int, p: int, i: int, t: float, v: int) -> float:
    sm = scenario.security[(n, p)]
    return sm.alpha * t + sm.sigma[i] + sm.phys_bonus * (1 - v)


# The per-slice sums below run over layers in stack order; the enumeration
# kernels add per-layer terms in the same order so both paths agree bit for bit.


def slice_cost(scenario: Scenario, n: int, assignment: Assignment) -> float:
    total = 0.0
    for p in scenario.layer_order:
        i, t, v = assignment.choice((n, p))
        total += layer_cost(scenario, n, p, i, t, v)
    return total


def total_cost(scenario: Scenario, assignment: Assignment) -> float:
    return sum((slice_cost(scenario, n, assignment) for n in scenario.slice_ids), 0.0)


def quality(scenario: Scenario, n: int, assignment: Assignment) -> float:
    total = 0.0
    for p in scenario.layer_order:
        total += layer_quality(scenario, n, p, assignment.I[(n, p)], assignment.V[(n, p)])
    return total


def security(scenario: Scenario, n: int, assignment: Assignment) -> float:
    total = 0.0
    for p in scenario.layer_order:
        i, t, v = assignment.choice((n, p))
        total += layer_security(scenario, n, p, i, t, v)
    return total


@dataclass(frozen=True)
class SliceEvaluation:
    cost: float
    quality: float
    security: float
    qos_ok: bool
    security_ok: bool

    @property
    def feasible(self) -> bool:
        return self.qos_ok and self.security_ok


@dataclass(frozen=True)
class EvaluationReport:
    per_slice: Mapping[int, SliceEvaluation]
    total_cost: float

    @property
    def feasible(self) -> bool:
        return all(e.feasible for e in self.per_slice.values())


def evaluate_slice(scenario: Scenario, n: int, assignment: Assignment) -> SliceEvaluation:
    spec = scenario.slice(n)
    q = quality(scenario, n, assignment)
    s = security(scenario, n, assignment)
    return SliceEvaluation(
        cost=slice_cost(scenario, n, assignment),
        quality=q,
        security=s,
        qos_ok=q >= spec.q_min - TOL,
        security_ok=s >= spec.s_min - TOL,
    )


def check_feasibility(scenario: Scenario, assignment: Assignment) -> EvaluationReport:
    """Evaluate every slice and flag the QoS and security minima.

    Raises AssignmentError if any pair's decision lies outside its domain.
    Shared control holds by construction since operator control is derived
    as ``1 - t``.
    """
    check_assignment(scenario, assignment)
    per_slice = {n: evaluate_slice(scenario, n, assignment) for n in scenario.slice_ids}
    for pair in scenario.pairs():
        assert abs(assignment.T[pair] + assignment.mno(pair) - 1.0) <= TOL
    return EvaluationReport(per_slice, sum((e.cost for e in per_slice.values()), 0.0))
