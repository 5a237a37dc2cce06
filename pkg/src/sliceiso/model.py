"""Domain types for slice isolation planning and scenario validation.

A scenario describes ``N`` slices, each implementing the same stack of ``P``
protocol layers.  For every (slice, layer) pair the planner picks an
isolation level ``i``, a tenant control share ``t`` (the operator keeps
``m = 1 - t``) and a virtualization flag ``v``.  The tables attached to each
pair price those choices and score them for quality and security.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

TOL = 1e-9

Pair = tuple[int, int]
LayerChoice = tuple[int, float, int]


class ScenarioError(ValueError):
    """Raised for lookups outside a pair's declared domain."""


class AssignmentError(ValueError):
    """Raised when an assignment does not fit the scenario it is evaluated on."""

    def __init__(self, message: str, pairs: Iterable[Pair] = ()):
        super().__init__(message)
        self.pairs = tuple(pairs)


class SliceType(str, enum.Enum):
    EMBB = "eMBB"
    MMTC = "mMTC"
    URLLC = "URLLC"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SliceSpec:
    slice_id: int
    name: str = ""
    slice_type: str = SliceType.CUSTOM.value
    q_min: float = 0.0
    s_min: float = 0.0


@dataclass(frozen=True)
class LayerSpec:
    layer_id: int
    name: str = ""
    stack_position: int = 1


@dataclass(frozen=True)
class IsolationDomain:
    levels: tuple[int, ...]
    t_max: Mapping[int, float]
    control_grid: tuple[float, ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    def label(self, level: int) -> str:
        return self.labels.get(level, str(level))

    def feasible_controls(self, level: int) -> tuple[float, ...]:
        if level not in self.t_max:
            raise ScenarioError(f"level {level} not in domain {self.levels}")
        bound = self.t_max[level]
        return tuple(sorted(t for t in self.control_grid if t <= bound + TOL))


@dataclass(frozen=True)
class CostTables:
    physical: Mapping[int, float]
    virtual: Mapping[int, float]
    operations: Mapping[float, float]


@dataclass(frozen=True)
class QualityModel:
    phi: Mapping[int, float]
    phys_bonus: float = 0.0


@dataclass(frozen=True)
class SecurityModel:
    alpha: float
    sigma: Mapping[int, float]
    phys_bonus: float = 0.0


@dataclass(frozen=True)
class Scenario:
    slices: tuple[SliceSpec, ...]
    layers: tuple[LayerSpec, ...]
    domain: Mapping[Pair, IsolationDomain]
    costs: Mapping[Pair, CostTables]
    quality: Mapping[Pair, QualityModel]
    security: Mapping[Pair, SecurityModel]

    @property
    def slice_ids(self) -> tuple[int, ...]:
        return tuple(sorted(s.slice_id for s in self.slices))

    @property
    def layer_order(self) -> tuple[int, ...]:
        """Layer ids bottom-up by stack position."""
        return tuple(l.layer_id for l in sorted(self.layers, key=lambda l: (l.stack_position, l.layer_id)))

    def slice(self, n: int) -> SliceSpec:
        for s in self.slices:
            if s.slice_id == n:
                return s
        raise ScenarioError(f"unknown slice {n}")

    def layer(self, p: int) -> LayerSpec:
        for l in self.layers:
            if l.layer_id == p:
                return l
        raise ScenarioError(f"unknown layer {p}")

    def pairs(self) -> Iterator[Pair]:
        for n in self.slice_ids:
            for p in self.layer_order:
                yield (n, p)

    def subscenario(self, slice_ids: Iterable[int]) -> "Scenario":
        keep = set(slice_ids)

        def sub(m):
            return {k: v for k, v in m.items() if k[0] in keep}

        return Scenario(
            slices=tuple(s for s in self.slices if s.slice_id in keep),
            layers=self.layers,
            domain=sub(self.domain),
            costs=sub(self.costs),
            quality=sub(self.quality),
            security=sub(self.security),
        )


def clean(x: float, digits: int = 10) -> float:
    """Round for output so that e.g. ``1 - 0.8`` prints as ``0.2``."""
    return round(float(x), digits) + 0.0


def lookup_control(table: Mapping[float, float], t: float) -> float:
    """Read a control-indexed table, matching grid values within TOL."""
    try:
        return table[t]
    except KeyError:
        for key, value in table.items():
            if abs(key - t) <= TOL:
                return value
    raise ScenarioError(f"control value {t} is not on the grid {sorted(table)}")


@dataclass(frozen=True)
class Assignment:
    """Per-pair decisions.  Operator control is always derived, never stored."""

    I: Mapping[Pair, int]
    T: Mapping[Pair, float]
    V: Mapping[Pair, int]

    def mno(self, pair: Pair) -> float:
        return 1.0 - self.T[pair]

    def choice(self, pair: Pair) -> LayerChoice:
        return (self.I[pair], self.T[pair], self.V[pair])

    @classmethod
    def from_choices(cls, choices: Mapping[Pair, LayerChoice]) -> "Assignment":
        return cls(
            I={k: int(c[0]) for k, c in choices.items()},
            T={k: float(c[1]) for k, c in choices.items()},
            V={k: int(c[2]) for k, c in choices.items()},
        )

    def merged(self, other: "Assignment") -> "Assignment":
        return Assignment(I={**self.I, **other.I}, T={**self.T, **other.T}, V={**self.V, **other.V})


def check_assignment(scenario: Scenario, assignment: Assignment, slices: Optional[Iterable[int]] = None) -> None:
    """Raise AssignmentError naming every pair whose decision is out of domain."""
    wanted = set(scenario.slice_ids if slices is None else slices)
    bad = []
    for pair in scenario.pairs():
        if pair[0] not in wanted:
            continue
        dom = scenario.domain.get(pair)
        if dom is None or pair not in assignment.I or pair not in assignment.T or pair not in assignment.V:
            bad.append(pair)
            continue
        i, t, v = assignment.choice(pair)
        if i not in dom.t_max or v not in (0, 1):
            bad.append(pair)
        elif not any(abs(t - g) <= TOL for g in dom.feasible_controls(i)):
            bad.append(pair)
    if bad:
        raise AssignmentError(f"assignment invalid at pairs {bad}", bad)


def choice_key(choice: LayerChoice) -> tuple[int, float, int]:
    """Tie-break key of one layer: lower isolation, lower tenant control, virtual first."""
    i, t, v = choice
    return (i, t, 0 if v == 1 else 1)


@dataclass(frozen=True)
class PairRestriction:
    """Closed value ranges restricting one pair's (i, t, v); None is unbounded."""

    i_lo: Optional[float] = None
    i_hi: Optional[float] = None
    t_lo: Optional[float] = None
    t_hi: Optional[float] = None
    v_lo: int = 0
    v_hi: int = 1

    def allows_level(self, i: float) -> bool:
        return (self.i_lo is None or i >= self.i_lo - TOL) and (self.i_hi is None or i <= self.i_hi + TOL)

    def allows_control(self, t: float) -> bool:
        return (self.t_lo is None or t >= self.t_lo - TOL) and (self.t_hi is None or t <= self.t_hi + TOL)

    def allowed_v(self) -> tuple[int, ...]:
        # virtual first, matching the canonical enumeration order
        return tuple(v for v in (1, 0) if self.v_lo <= v <= self.v_hi)

    def intersect(self, other: "PairRestriction") -> "PairRestriction":
        def hi(a, b):
            return b if a is None else a if b is None else min(a, b)

        def lo(a, b):
            return b if a is None else a if b is None else max(a, b)

        return PairRestriction(
            i_lo=lo(self.i_lo, other.i_lo),
            i_hi=hi(self.i_hi, other.i_hi),
            t_lo=lo(self.t_lo, other.t_lo),
            t_hi=hi(self.t_hi, other.t_hi),
            v_lo=max(self.v_lo, other.v_lo),
            v_hi=min(self.v_hi, other.v_hi),
        )


NO_RESTRICTION = PairRestriction()


def feasible_controls(scenario: Scenario, n: int, p: int, i: int) -> tuple[float, ...]:
    """Grid controls admissible at level ``i``: ``{t in grid : t <= t_max(i)}``, ascending."""
    dom = scenario.domain.get((n, p))
    if dom is None:
        raise ScenarioError(f"no isolation domain for pair {(n, p)}")
    return dom.feasible_controls(i)


def allowed_choices(
    scenario: Scenario, n: int, p: int, restriction: PairRestriction = NO_RESTRICTION
) -> list[LayerChoice]:
    """All (i, t, v) for a pair inside ``restriction``, in canonical tie-break order."""
    dom = scenario.domain[(n, p)]
    vs = restriction.allowed_v()
    out = []
    for i in dom.levels:
        if not restriction.allows_level(i):
            continue
        for t in dom.feasible_controls(i):
            if restriction.allows_control(t):
                out.extend((i, t, v) for v in vs)
    return out


# --- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    slice_id: Optional[int] = None
    layer_id: Optional[int] = None
    values: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "slice": self.slice_id,
            "layer": self.layer_id,
            "message": self.message,
            "values": dict(self.values),
        }

    def __str__(self) -> str:
        where = "" if self.slice_id is None else f" (n={self.slice_id},p={self.layer_id})"
        return f"{self.code}{where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def to_text(self) -> str:
        if self.ok:
            return "valid: no violations"
        return "\n".join(str(v) for v in self.violations)


def _strictly_increasing(xs: list[float]) -> list[int]:
    """Indices k where xs[k+1] fails to exceed xs[k] by more than TOL."""
    return [k for k in range(len(xs) - 1) if not xs[k + 1] - xs[k] > TOL]


class _Collector:
    def __init__(self):
        self.items: list[Violation] = []

    def add(self, code, msg, pair=None, **values):
        n, p = pair if pair is not None else (None, None)
        self.items.append(Violation(code, msg, n, p, values))


def _check_domain(out: _Collector, pair: Pair, dom: IsolationDomain) -> bool:
    levels = list(dom.levels)
    if not levels:
        out.add("STRUCT", "empty isolation level list", pair)
        return False
    if _strictly_increasing(levels):
        out.add("STRUCT", "isolation levels must be strictly ordered", pair, levels=levels)
        return False
    if set(dom.t_max) != set(levels):
        out.add("STRUCT", "t_max keys do not match the level list", pair, levels=levels, keys=sorted(dom.t_max))
        return False
    grid = list(dom.control_grid)
    ok = True
    if not grid or any(t < -TOL or t > 1 + TOL for t in grid) or _strictly_increasing(grid):
        out.add("STRUCT", "control grid must be a strictly ascending subset of [0, 1]", pair, grid=grid)
        ok = False
    elif abs(grid[0]) > TOL:
        out.add("STRUCT", "control grid must contain 0", pair, grid=grid)
        ok = False
    bad = [i for i in levels if not 0.0 < dom.t_max[i] < 1.0]
    if bad:
        out.add("STRUCT", "t_max must lie in the open interval (0, 1)", pair, levels=bad)
        ok = False
    tm = [dom.t_max[i] for i in levels]
    for k in _strictly_increasing(tm):
        out.add(
            "Eq6",
            f"t_max must strictly increase with isolation: t_max({levels[k + 1]})={tm[k + 1]} "
            f"<= t_max({levels[k]})={tm[k]}",
            pair,
            levels=[levels[k], levels[k + 1]],
            t_max=[tm[k], tm[k + 1]],
        )
        break
    return ok


def _check_level_table(out, pair, levels, table, what) -> Optional[list[float]]:
    if set(table) != set(levels):
        out.add("STRUCT", f"{what} keys do not match the level list", pair, levels=list(levels), keys=sorted(table))
        return None
    vals = [table[i] for i in levels]
    neg = [i for i, x in zip(levels, vals) if x < 0]
    if neg:
        out.add("STRUCT", f"{what} must be nonnegative", pair, levels=neg)
    return vals


def _monotone(out, code, pair, levels, vals, what):
    bad = _strictly_increasing(vals)
    if bad:
        k = bad[0]
        out.add(
            code,
            f"{what} must strictly increase with isolation: {what}({levels[k + 1]})={vals[k + 1]} "
            f"<= {what}({levels[k]})={vals[k]}",
            pair,
            levels=[levels[k], levels[k + 1]],
            values=[vals[k], vals[k + 1]],
        )


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """Check structure and the monotonicity/cost axioms of every pair.

    Each failed axiom yields one violation per pair, coded by the relation
    it breaks (``Eq3``, ``Eq6`` .. ``Eq12``) or ``STRUCT`` for malformed data.
    """
    out = _Collector()

    ids = [s.slice_id for s in scenario.slices]
    if len(set(ids)) != len(ids):
        out.add("STRUCT", "duplicate slice ids", slices=ids)
    for s in scenario.slices:
        if s.q_min < 0 or s.s_min < 0:
            out.add("STRUCT", "q_min and s_min must be nonnegative", (s.slice_id, None), q_min=s.q_min, s_min=s.s_min)
    lids = [l.layer_id for l in scenario.layers]
    if len(set(lids)) != len(lids):
        out.add("STRUCT", "duplicate layer ids", layers=lids)
    positions = sorted(l.stack_position for l in scenario.layers)
    if positions != list(range(1, len(positions) + 1)):
        out.add("STRUCT", "stack positions must be a permutation of 1..P", positions=positions)
    if not scenario.layers:
        out.add("STRUCT", "scenario has no protocol layers")

    for pair in scenario.pairs():
        missing = [
            name
            for name, table in (
                ("domain", scenario.domain),
                ("costs", scenario.costs),
                ("quality", scenario.quality),
                ("security", scenario.security),
            )
            if pair not in table
        ]
        if missing:
            out.add("STRUCT", f"missing {', '.join(missing)} for pair", pair, missing=missing)
            continue
        dom = scenario.domain[pair]
        if not _check_domain(out, pair, dom):
            continue
        levels = list(dom.levels)

        costs = scenario.costs[pair]
        cp = _check_level_table(out, pair, levels, costs.physical, "c_phys")
        cv = _check_level_table(out, pair, levels, costs.virtual, "c_virt")
        if cp is not None and cv is not None:
            bad = [i for i, a, b in zip(levels, cp, cv) if not a - b > TOL]
            if bad:
                out.add(
                    "Eq3",
                    "physical cost must exceed virtual cost at every level",
                    pair,
                    levels=bad,
                    c_phys=[costs.physical[i] for i in bad],
                    c_virt=[costs.virtual[i] for i in bad],
                )
        if cp is not None:
            _monotone(out, "Eq7", pair, levels, cp, "c_phys")
        if cv is not None:
            _monotone(out, "Eq8", pair, levels, cv, "c_virt")

        grid = list(dom.control_grid)
        op_keys = sorted(costs.operations)
        if len(op_keys) != len(grid) or any(abs(a - b) > TOL for a, b in zip(op_keys, grid)):
            out.add("STRUCT", "c_op keys do not match the control grid", pair, grid=grid, keys=op_keys)
        else:
            op = [lookup_control(costs.operations, t) for t in grid]
            if any(x < 0 for x in op):
                out.add("STRUCT", "c_op must be nonnegative", pair)
            # strictly decreasing in t  <=>  strictly increasing in m = 1 - t
            bad = _strictly_increasing([-x for x in op])
            if bad:
                k = bad[0]
                out.add(
                    "Eq9",
                    f"c_op must strictly decrease in tenant control: c_op({grid[k + 1]})={op[k + 1]} "
                    f">= c_op({grid[k]})={op[k]}",
                    pair,
                    controls=[grid[k], grid[k + 1]],
                    values=[op[k], op[k + 1]],
                )

        qm = scenario.quality[pair]
        phi = _check_level_table(out, pair, levels, qm.phi, "phi")
        if phi is not None:
            _monotone(out, "Eq10", pair, levels, phi, "phi")
        if qm.phys_bonus < 0:
            out.add("STRUCT", "quality bonus must be nonnegative", pair, phys_bonus=qm.phys_bonus)

        sm = scenario.security[pair]
        if not sm.alpha > 0:
            out.add("Eq11", "security weight on tenant control must be positive", pair, alpha=sm.alpha)
        sigma = _check_level_table(out, pair, levels, sm.sigma, "sigma")
        if sigma is not None:
            _monotone(out, "Eq12", pair, levels, sigma, "sigma")
        if sm.phys_bonus < 0:
            out.add("STRUCT", "security bonus must be nonnegative", pair, phys_bonus=sm.phys_bonus)

    return ValidationReport(tuple(out.items))
