"""Brute-force reference answers, written straight from the tables.

Nothing here calls the solvers, the kernels or the evaluator, so a shared
bug cannot hide behind agreement.
"""

from __future__ import annotations

import itertools
import math

TOL = 1e-9


def pair_choices(scenario, n, p):
    dom = scenario.domain[(n, p)]
    out = []
    for i in sorted(dom.levels):
        for t in sorted(dom.control_grid):
            if t <= dom.t_max[i] + TOL:
                for v in (1, 0):
                    out.append((i, t, v))
    return out


def _op(costs, t):
    for k, val in costs.operations.items():
        if abs(k - t) <= TOL:
            return val
    raise KeyError(t)


def pair_terms(scenario, n, p, choice):
    """(cost, quality, security) of one layer decision."""
    i, t, v = choice
    c = scenario.costs[(n, p)]
    qm = scenario.quality[(n, p)]
    sm = scenario.security[(n, p)]
    cost = (c.virtual[i] if v else c.physical[i]) + _op(c, t)
    q = qm.phi[i] + qm.phys_bonus * (1 - v)
    s = sm.alpha * t + sm.sigma[i] + sm.phys_bonus * (1 - v)
    return cost, q, s


def _key(choice):
    i, t, v = choice
    return (i, t, 0 if v == 1 else 1)


def slice_plans(scenario, n):
    """Every plan of slice ``n`` as (choices, cost, q, s), stack order."""
    layers = scenario.layer_order
    spaces = [pair_choices(scenario, n, p) for p in layers]
    for combo in itertools.product(*spaces):
        cost = q = s = 0.0
        for p, ch in zip(layers, combo):
            a, b, c = pair_terms(scenario, n, p, ch)
            cost += a
            q += b
            s += c
        yield combo, cost, q, s


def feasible_plans(scenario, n):
    spec = scenario.slice(n)
    for combo, cost, q, s in slice_plans(scenario, n):
        if q >= spec.q_min - TOL and s >= spec.s_min - TOL:
            yield combo, cost, q, s


def best_slice_plan(scenario, n):
    """(cost, {pair: choice}) of the cheapest feasible plan, ties broken lexicographically; None if infeasible."""
    plans = list(feasible_plans(scenario, n))
    if not plans:
        return None
    best = min(c for _, c, _, _ in plans)
    tied = [combo for combo, c, _, _ in plans if c <= best + TOL]
    combo = min(tied, key=lambda cb: tuple(_key(ch) for ch in cb))
    cost = next(c for cb, c, _, _ in plans if cb == combo)
    return cost, dict(zip([(n, p) for p in scenario.layer_order], combo))


def joint_optimum(scenario):
    """Minimum total cost over whole-scenario plans (one product over all pairs); inf if infeasible."""
    pairs = list(scenario.pairs())
    spaces = [pair_choices(scenario, n, p) for n, p in pairs]
    mins = {n: scenario.slice(n) for n in scenario.slice_ids}
    best = math.inf
    for combo in itertools.product(*spaces):
        totals = {n: [0.0, 0.0, 0.0] for n in mins}
        for (n, p), ch in zip(pairs, combo):
            for k, x in enumerate(pair_terms(scenario, n, p, ch)):
                totals[n][k] += x
        if all(totals[n][1] >= mins[n].q_min - TOL and totals[n][2] >= mins[n].s_min - TOL for n in mins):
            best = min(best, sum(v[0] for v in totals.values()))
    return best


def joint_size(scenario):
    return math.prod(len(pair_choices(scenario, n, p)) for n, p in scenario.pairs())


def max_quality(scenario, n):
    return max(q for _, _, q, _ in slice_plans(scenario, n))


def pareto_points(scenario, n):
    """Set of (cost, s) points on the min-cost / max-security frontier of feasible plans."""
    pts = {(round(c, 9), round(s, 9)) for _, c, _, s in feasible_plans(scenario, n)}
    return {
        (c, s)
        for c, s in pts
        if not any((c2 <= c + TOL and s2 >= s - TOL) and (c2 < c - TOL or s2 > s + TOL) for c2, s2 in pts)
    }


def dominates(a, b):
    """(cost, s) point ``a`` is at least as good as ``b`` on both and better on one."""
    return a[0] <= b[0] + TOL and a[1] >= b[1] - TOL and (a[0] < b[0] - TOL or a[1] > b[1] + TOL)
