"""JSON scenario files and plan documents.

Scenario layout::

    {
      "slices":  [{"id": 1, "name": "...", "type": "URLLC", "q_min": "3", "s_min": "2"}],
      "layers":  [{"id": 1, "name": "PHY", "stack_position": 1}],
      "defaults": { <pair body> },              # optional, merged under each pair
      "pairs": [
        {"slice": 1, "layer": 1,
         "domain":   {"levels": {"1": "logical", "2": "air-gap"},
                      "t_max": {"1": "0.4", "2": "0.8"},
                      "control_grid": ["0", "0.4", "0.8"]},
         "costs":    {"physical": {"1": "2", "2": "5"}, "virtual": {"1": "1", "2": "3"},
                      "operations": {"0": "3", "0.4": "2", "0.8": "1"}},
         "quality":  {"phi": {"1": "1", "2": "2"}, "phys_bonus": "0"},
         "security": {"alpha": "1", "sigma": {"1": "0.5", "2": "1"}, "phys_bonus": "0"}}
      ]
    }

Numbers may be JSON numbers or decimal strings; both go through ``Decimal``.
A pair missing a section (after defaults) is loaded without it and reported
by validation as STRUCT; values that cannot be read at all raise
ScenarioFormatError naming the field.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Optional, Union

from .catalog import preset
from .evaluator import evaluate_slice
from .exhaustive import SolveResult, Status, attainable_maxima
from .model import (
    TOL,
    Assignment,
    CostTables,
    IsolationDomain,
    LayerSpec,
    QualityModel,
    Scenario,
    SecurityModel,
    SliceSpec,
    clean,
)


class ScenarioFormatError(ValueError):
    def __init__(self, message: str, field: str = "", line: Optional[int] = None, column: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if field:
            where.append(f"field {field}")
        super().__init__(f"{message}" + (f" ({'; '.join(where)})" if where else ""))
        self.field = field
        self.line = line
        self.column = column


def _num(value: Any, path: str) -> float:
    if isinstance(value, bool) or value is None:
        raise ScenarioFormatError(f"expected a number, got {value!r}", path)
    try:
        d = Decimal(str(value).strip())
    except InvalidOperation:
        raise ScenarioFormatError(f"expected a number, got {value!r}", path) from None
    if not d.is_finite():
        raise ScenarioFormatError(f"expected a finite number, got {value!r}", path)
    return float(d)


def _int(value: Any, path: str) -> int:
    x = _num(value, path)
    if x != int(x):
        raise ScenarioFormatError(f"expected an integer, got {value!r}", path)
    return int(x)


def _obj(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioFormatError("expected an object", path)
    return value


def _level_map(raw: Any, path: str) -> dict[int, float]:
    return {_int(k, f"{path}.{k}"): _num(v, f"{path}.{k}") for k, v in _obj(raw, path).items()}


def _control_map(raw: Any, path: str) -> dict[float, float]:
    return {_num(k, f"{path}.{k}"): _num(v, f"{path}.{k}") for k, v in _obj(raw, path).items()}


def _merge(defaults: dict, body: dict) -> dict:
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in defaults.items()}
    for k, v in body.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **v}
        else:
            out[k] = v
    return out


def scenario_from_dict(doc: Any) -> Scenario:
    doc = _obj(doc, "<root>")
    for key in ("slices", "layers"):
        if not isinstance(doc.get(key), list):
            raise ScenarioFormatError(f"missing list {key!r}", key)

    slices = []
    for k, raw in enumerate(doc["slices"]):
        path = f"slices[{k}]"
        raw = _obj(raw, path)
        if "id" not in raw:
            raise ScenarioFormatError("missing slice id", f"{path}.id")
        stype = str(raw.get("type", "custom"))
        try:
            defaults = preset(stype)
            q_def, s_def = defaults.q_min, defaults.s_min
        except KeyError:
            q_def = s_def = 0.0
        slices.append(
            SliceSpec(
                _int(raw["id"], f"{path}.id"),
                str(raw.get("name", "")),
                stype,
                _num(raw["q_min"], f"{path}.q_min") if "q_min" in raw else q_def,
                _num(raw["s_min"], f"{path}.s_min") if "s_min" in raw else s_def,
            )
        )

    layers = []
    for k, raw in enumerate(doc["layers"]):
        path = f"layers[{k}]"
        raw = _obj(raw, path)
        if "id" not in raw:
            raise ScenarioFormatError("missing layer id", f"{path}.id")
        lid = _int(raw["id"], f"{path}.id")
        layers.append(LayerSpec(lid, str(raw.get("name", "")), _int(raw.get("stack_position", lid), f"{path}.stack_position")))

    defaults = _obj(doc.get("defaults", {}), "defaults")
    raw_pairs = doc.get("pairs", [])
    if not isinstance(raw_pairs, list):
        raise ScenarioFormatError("expected a list", "pairs")
    bodies: dict[tuple[int, int], tuple[str, dict]] = {}
    for k, raw in enumerate(raw_pairs):
        path = f"pairs[{k}]"
        raw = _obj(raw, path)
        if "slice" not in raw or "layer" not in raw:
            raise ScenarioFormatError("pair needs 'slice' and 'layer'", path)
        key = (_int(raw["slice"], f"{path}.slice"), _int(raw["layer"], f"{path}.layer"))
        if key in bodies:
            raise ScenarioFormatError(f"duplicate pair {key}", path)
        bodies[key] = (path, raw)

    domain, costs, quality, security = {}, {}, {}, {}
    for s in slices:
        for l in layers:
            key = (s.slice_id, l.layer_id)
            path, body = bodies.get(key, (f"defaults[{key[0]},{key[1]}]", {}))
            body = _merge(defaults, body)
            if "domain" in body:
                d = _obj(body["domain"], f"{path}.domain")
                raw_levels = d.get("levels", {})
                if isinstance(raw_levels, list):
                    raw_levels = {lv: lv for lv in raw_levels}
                labels = {
                    _int(lv, f"{path}.domain.levels"): str(name)
                    for lv, name in _obj(raw_levels, f"{path}.domain.levels").items()
                }
                grid = d.get("control_grid", [])
                if not isinstance(grid, list):
                    raise ScenarioFormatError("expected a list", f"{path}.domain.control_grid")
                domain[key] = IsolationDomain(
                    levels=tuple(labels),
                    t_max=_level_map(d.get("t_max", {}), f"{path}.domain.t_max"),
                    control_grid=tuple(_num(t, f"{path}.domain.control_grid[{j}]") for j, t in enumerate(grid)),
                    labels=labels,
                )
            if "costs" in body:
                c = _obj(body["costs"], f"{path}.costs")
                costs[key] = CostTables(
                    _level_map(c.get("physical", {}), f"{path}.costs.physical"),
                    _level_map(c.get("virtual", {}), f"{path}.costs.virtual"),
                    _control_map(c.get("operations", {}), f"{path}.costs.operations"),
                )
            if "quality" in body:
                q = _obj(body["quality"], f"{path}.quality")
                quality[key] = QualityModel(
                    _level_map(q.get("phi", {}), f"{path}.quality.phi"),
                    _num(q.get("phys_bonus", 0), f"{path}.quality.phys_bonus"),
                )
            if "security" in body:
                sm = _obj(body["security"], f"{path}.security")
                if "alpha" not in sm:
                    raise ScenarioFormatError("missing alpha", f"{path}.security.alpha")
                security[key] = SecurityModel(
                    _num(sm["alpha"], f"{path}.security.alpha"),
                    _level_map(sm.get("sigma", {}), f"{path}.security.sigma"),
                    _num(sm.get("phys_bonus", 0), f"{path}.security.phys_bonus"),
                )
    return Scenario(tuple(slices), tuple(layers), domain, costs, quality, security)


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return scenario_from_dict(doc)


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioFormatError(f"cannot read {path}: {exc}") from None
    return loads_scenario(text)


def _dec(x: float) -> str:
    return repr(clean(x)).removesuffix(".0")


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of ``scenario_from_dict``; numbers are written as decimal strings."""
    pairs = []
    for n, p in scenario.pairs():
        key = (n, p)
        body: dict[str, Any] = {"slice": n, "layer": p}
        if key in scenario.domain:
            d = scenario.domain[key]
            body["domain"] = {
                "levels": {str(i): d.label(i) for i in d.levels},
                "t_max": {str(i): _dec(d.t_max[i]) for i in d.levels},
                "control_grid": [_dec(t) for t in d.control_grid],
            }
        if key in scenario.costs:
            c = scenario.costs[key]
            body["costs"] = {
                "physical": {str(i): _dec(x) for i, x in c.physical.items()},
                "virtual": {str(i): _dec(x) for i, x in c.virtual.items()},
                "operations": {_dec(t): _dec(x) for t, x in c.operations.items()},
            }
        if key in scenario.quality:
            q = scenario.quality[key]
            body["quality"] = {"phi": {str(i): _dec(x) for i, x in q.phi.items()}, "phys_bonus": _dec(q.phys_bonus)}
        if key in scenario.security:
            s = scenario.security[key]
            body["security"] = {
                "alpha": _dec(s.alpha),
                "sigma": {str(i): _dec(x) for i, x in s.sigma.items()},
                "phys_bonus": _dec(s.phys_bonus),
            }
        pairs.append(body)
    return {
        "slices": [
            {"id": s.slice_id, "name": s.name, "type": s.slice_type, "q_min": _dec(s.q_min), "s_min": _dec(s.s_min)}
            for s in sorted(scenario.slices, key=lambda s: s.slice_id)
        ],
        "layers": [{"id": l.layer_id, "name": l.name, "stack_position": l.stack_position} for l in scenario.layers],
        "pairs": pairs,
    }


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


# --- plans -----------------------------------------------------------------


def _slice_plan(scenario: Scenario, n: int, assignment: Assignment) -> dict:
    ev = evaluate_slice(scenario, n, assignment)
    spec = scenario.slice(n)
    layers = []
    for p in scenario.layer_order:
        i, t, v = assignment.choice((n, p))
        layers.append(
            {
                "layer": p,
                "isolation_level": i,
                "isolation_label": scenario.domain[(n, p)].label(i),
                "tenant_control": clean(t),
                "mno_control": clean(assignment.mno((n, p))),
                "virtualized": v,
            }
        )
    return {
        "slice": n,
        "name": spec.name,
        "cost": clean(ev.cost),
        "quality": clean(ev.quality),
        "security": clean(ev.security),
        "q_min": clean(spec.q_min),
        "s_min": clean(spec.s_min),
        "qos_ok": ev.qos_ok,
        "security_ok": ev.security_ok,
        "layers": layers,
    }


def infeasibility_diagnostics(scenario: Scenario, n: int, restrictions=None) -> dict:
    spec = scenario.slice(n)
    q_max, s_max = attainable_maxima(scenario, n, restrictions)
    reasons = []
    if q_max < spec.q_min - TOL:
        reasons.append("qos")
    if s_max < spec.s_min - TOL:
        reasons.append("security")
    if not reasons:
        reasons.append("joint")
    fix = lambda x: None if math.isinf(x) else clean(x)
    return {
        "slice": n,
        "name": spec.name,
        "unsatisfiable": reasons,
        "q_min": clean(spec.q_min),
        "max_quality": fix(q_max),
        "s_min": clean(spec.s_min),
        "max_security": fix(s_max),
    }


def plan_to_dict(scenario: Scenario, result: SolveResult, restrictions=None) -> dict:
    """Plan document.  Solver statistics are left out so every method emits the same bytes."""
    doc: dict[str, Any] = {"status": result.status.value}
    if result.status is Status.INFEASIBLE:
        doc["infeasible"] = [infeasibility_diagnostics(scenario, n, restrictions) for n in result.infeasible_slices]
        return doc
    if result.assignment is not None:
        doc["objective"] = clean(result.objective)
    if result.status is Status.LIMIT:
        doc["bound"] = None if result.bound is None or math.isinf(result.bound) else clean(result.bound)
        doc["gap"] = None if result.gap is None or math.isinf(result.gap) else clean(result.gap)
    if result.assignment is not None:
        doc["slices"] = [_slice_plan(scenario, n, result.assignment) for n in scenario.slice_ids]
    return doc


def dumps_plan(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def plan_assignment(doc: dict) -> Assignment:
    """Rebuild the Assignment stored in a plan document."""
    if "slices" not in doc:
        raise ScenarioFormatError("plan carries no assignment", "slices")
    choices = {}
    for k, s in enumerate(doc["slices"]):
        for j, l in enumerate(s.get("layers", [])):
            path = f"slices[{k}].layers[{j}]"
            choices[(_int(s["slice"], f"slices[{k}].slice"), _int(l["layer"], f"{path}.layer"))] = (
                _int(l["isolation_level"], f"{path}.isolation_level"),
                _num(l["tenant_control"], f"{path}.tenant_control"),
                _int(l["virtualized"], f"{path}.virtualized"),
            )
    return Assignment.from_choices(choices)
