"""Reference scenarios and a generator of random valid scenarios."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .model import (
    CostTables,
    IsolationDomain,
    LayerSpec,
    QualityModel,
    Scenario,
    SecurityModel,
    SliceSpec,
)

LEVEL_LABELS = {1: "logical", 2: "air-gap"}


def _tiny_pair(phi=None, q_bonus=0.0, s_bonus=0.0):
    domain = IsolationDomain(
        levels=(1, 2), t_max={1: 0.4, 2: 0.8}, control_grid=(0.0, 0.4, 0.8), labels=dict(LEVEL_LABELS)
    )
    costs = CostTables(physical={1: 2.0, 2: 5.0}, virtual={1: 1.0, 2: 3.0}, operations={0.0: 3.0, 0.4: 2.0, 0.8: 1.0})
    quality = QualityModel(phi=dict(phi or {1: 1.0, 2: 2.0}), phys_bonus=q_bonus)
    security = SecurityModel(alpha=1.0, sigma={1: 0.5, 2: 1.0}, phys_bonus=s_bonus)
    return domain, costs, quality, security


def tiny(
    q_min: float = 3.0,
    s_min: float = 2.0,
    n_slices: int = 1,
    phi=None,
    q_bonus: float = 0.0,
    s_bonus: float = 0.0,
    slice_type: str = "custom",
) -> Scenario:
    """One slice (or ``n_slices`` identical copies) over two layers sharing the same tables."""
    layers = (LayerSpec(1, "lower", 1), LayerSpec(2, "upper", 2))
    slices = tuple(SliceSpec(n, f"tiny-{n}", slice_type, q_min, s_min) for n in range(1, n_slices + 1))
    domain, costs, quality, security = {}, {}, {}, {}
    for s in slices:
        for l in layers:
            # fresh tables per pair so a test can perturb one pair only
            d, c, q, sec = _tiny_pair(phi, q_bonus, s_bonus)
            key = (s.slice_id, l.layer_id)
            domain[key], costs[key], quality[key], security[key] = d, c, q, sec
    return Scenario(slices, layers, domain, costs, quality, security)


def tiny_q5() -> Scenario:
    """TINY with an unreachable QoS minimum (best attainable quality is 4)."""
    return tiny(q_min=5.0)


def urllc_fix() -> Scenario:
    """QoS minimum only reachable with both layers at air-gap."""
    return tiny(q_min=5.0, phi={1: 1.0, 2: 3.0}, slice_type="URLLC")


def _increasing(rng, k, start_lo, start_hi, step_lo, step_hi):
    vals = [round(float(rng.uniform(start_lo, start_hi)), 2)]
    for _ in range(k - 1):
        vals.append(round(vals[-1] + float(rng.uniform(step_lo, step_hi)), 2))
    return vals


def random_scenario(
    rng: np.random.Generator,
    max_slices: int = 3,
    max_layers: int = 3,
    max_levels: int = 3,
    max_grid: int = 4,
    bonus_prob: float = 0.3,
    n_slices: Optional[int] = None,
    n_layers: Optional[int] = None,
) -> Scenario:
    """Random scenario satisfying every validation axiom.

    Tables carry two decimals.  Minima are drawn between the attainable
    extremes so a mix of feasible and infeasible slices comes out.
    """
    N = n_slices or int(rng.integers(1, max_slices + 1))
    P = n_layers or int(rng.integers(1, max_layers + 1))
    order = rng.permutation(P) + 1
    layers = tuple(LayerSpec(p, f"L{p}", int(order[p - 1])) for p in range(1, P + 1))
    domain, costs, quality, security = {}, {}, {}, {}
    slices = []
    for n in range(1, N + 1):
        q_hi = s_hi = 0.0
        q_lo = s_lo = 0.0
        for p in range(1, P + 1):
            L = int(rng.integers(1, max_levels + 1))
            levels = tuple(range(1, L + 1))
            G = int(rng.integers(1, max_grid + 1))
            grid = [0.0] + sorted({round(float(x), 2) for x in rng.uniform(0.05, 0.95, G - 1)})
            tmax = sorted(float(x) / 100 for x in rng.choice(np.arange(5, 96), size=L, replace=False))
            cv = _increasing(rng, L, 0.5, 3.0, 0.1, 3.0)
            cp = []
            for k in range(L):
                lo = cv[k] + 0.01
                if cp:
                    lo = max(lo, cp[-1] + 0.01)
                cp.append(round(lo + float(rng.uniform(0.0, 3.0)), 2))
            op_inc = _increasing(rng, len(grid), 0.2, 2.0, 0.05, 2.0)
            op = dict(zip(grid, op_inc[::-1]))
            phi = _increasing(rng, L, 0.0, 2.0, 0.1, 2.0)
            sigma = _increasing(rng, L, 0.0, 1.5, 0.1, 1.5)
            qb = round(float(rng.uniform(0.0, 1.0)), 2) if rng.random() < bonus_prob else 0.0
            sb = round(float(rng.uniform(0.0, 1.0)), 2) if rng.random() < bonus_prob else 0.0
            alpha = round(float(rng.uniform(0.1, 2.0)), 2)
            key = (n, p)
            domain[key] = IsolationDomain(levels, dict(zip(levels, tmax)), tuple(grid))
            costs[key] = CostTables(dict(zip(levels, cp)), dict(zip(levels, cv)), op)
            quality[key] = QualityModel(dict(zip(levels, phi)), qb)
            security[key] = SecurityModel(alpha, dict(zip(levels, sigma)), sb)
            q_hi += phi[-1] + qb
            q_lo += phi[0]
            t_top = max(t for t in grid if t <= tmax[-1])
            s_hi += alpha * t_top + sigma[-1] + sb
            s_lo += sigma[0]
        # mostly reachable minima, with the occasional unreachable one
        q_min = round(float(rng.uniform(q_lo, q_hi if rng.random() < 0.9 else q_hi + 0.5)), 2)
        s_min = round(float(rng.uniform(s_lo, s_hi if rng.random() < 0.9 else s_hi + 0.5)), 2)
        slices.append(SliceSpec(n, f"S{n}", "custom", q_min, s_min))
    return Scenario(tuple(slices), layers, domain, costs, quality, security)
