"""Slice-type presets, isolation level names and the eight-layer security taxonomy."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping, Optional

from .model import Assignment, Scenario, check_assignment, clean


@dataclass(frozen=True)
class SliceTypePreset:
    slice_type: str
    q_min: float
    s_min: float
    description: str


_PRESETS = (
    SliceTypePreset("eMBB", 1.0, 0.5, "enhanced mobile broadband; tolerates latency and some packet loss"),
    SliceTypePreset("mMTC", 2.0, 1.0, "massive machine-type communications; short messages, no retransmission"),
    SliceTypePreset("URLLC", 3.0, 2.0, "ultra-reliable low latency; critical infrastructure with hardened defense"),
)


def builtin_slice_types(overrides: Optional[Mapping[str, Mapping[str, float]]] = None) -> list[SliceTypePreset]:
    """The three standard presets, optionally with overridden minima.

    Default numbers are normalized placeholders; what is enforced is the
    ordering URLLC > mMTC > eMBB on ``q_min`` (strict) and ``s_min``
    (non-strict).  Overrides breaking it raise ValueError.
    """
    overrides = overrides or {}
    unknown = set(overrides) - {p.slice_type for p in _PRESETS}
    if unknown:
        raise ValueError(f"unknown slice types {sorted(unknown)}")
    presets = []
    for p in _PRESETS:
        o = overrides.get(p.slice_type, {})
        presets.append(SliceTypePreset(p.slice_type, float(o.get("q_min", p.q_min)), float(o.get("s_min", p.s_min)), p.description))
    e, m, u = presets
    if not u.q_min > m.q_min > e.q_min:
        raise ValueError("preset q_min must satisfy URLLC > mMTC > eMBB")
    if not u.s_min >= m.s_min >= e.s_min:
        raise ValueError("preset s_min must satisfy URLLC >= mMTC >= eMBB")
    return presets


def preset(slice_type: str) -> SliceTypePreset:
    for p in _PRESETS:
        if p.slice_type == slice_type:
            return p
    raise KeyError(f"no preset for slice type {slice_type!r}")


class UnknownIsolationLevel(KeyError):
    pass


_ISOLATION_LEVELS = {1: "logical", 2: "air-gap"}


def isolation_taxonomy(extra: Optional[Mapping[int, str]] = None) -> list[tuple[int, str]]:
    """Named isolation levels by increasing isolation; ``extra`` adds more."""
    levels = dict(_ISOLATION_LEVELS)
    for k, v in (extra or {}).items():
        if k in levels:
            raise ValueError(f"isolation level {k} already named {levels[k]!r}")
        levels[k] = v
    return sorted(levels.items())


def isolation_level(label: str, extra: Optional[Mapping[int, str]] = None) -> int:
    for level, name in isolation_taxonomy(extra):
        if name == label:
            return level
    raise UnknownIsolationLevel(label)


@dataclass(frozen=True)
class LayerTaxonomyEntry:
    number: str
    name: str
    description: str
    concept: str


LAYER_TAXONOMY = (
    LayerTaxonomyEntry("I", "Supply Chain", "hardware and software provenance of network equipment", "out-of-scope"),
    LayerTaxonomyEntry("II", "Physical Resources", "dedicated hardware, spectrum and racks assigned to a slice", "v flag"),
    LayerTaxonomyEntry("III", "Physical Infrastructure", "data centre facilities hosting physical resources", "v flag"),
    LayerTaxonomyEntry("IV", "Virtual Resources", "vCPU, vRAM and storage carved out for a slice", "v flag"),
    LayerTaxonomyEntry("V", "Virtual Infrastructure", "VM and container isolation, micro-segmentation", "v flag"),
    LayerTaxonomyEntry("VI", "Protocol and Service Chain", "ordered network functions delivering the service", "out-of-scope"),
    LayerTaxonomyEntry(
        "VII", "RAN, Transport and Core Network", "isolation points placed across the protocol stack", "isolation level"
    ),
    LayerTaxonomyEntry("VIII", "Administrative Domain", "tenant identities and the tenant/operator control split", "control split"),
)

_OUT_OF_SCOPE_NOTES = {
    "I": "supply-chain assurance has no decision variable in the planning model",
    "VI": "service-chain protection has no decision variable in the planning model",
}


def _tags(v: int) -> list[str]:
    return (["IV", "V"] if v == 1 else ["II", "III"]) + ["VII"]


def layer_security_report(scenario: Scenario, assignment: Assignment) -> dict:
    """Map every pair decision onto the security layers it touches.

    Virtual implementation touches layers IV-V, physical implementation
    II-III, the isolation level VII and the control split VIII.
    """
    check_assignment(scenario, assignment)
    decisions = []
    for n, p in scenario.pairs():
        i, t, v = assignment.choice((n, p))
        label = scenario.domain[(n, p)].label(i)
        decisions.append(
            {
                "slice": n,
                "layer": p,
                "isolation_level": i,
                "isolation_label": label,
                "virtualized": v,
                "tags": _tags(v),
            }
        )
    controls = [
        {
            "slice": n,
            "layer": p,
            "tenant_control": clean(assignment.T[(n, p)]),
            "mno_control": clean(assignment.mno((n, p))),
            "tags": ["VIII"],
        }
        for n, p in scenario.pairs()
    ]
    return {
        "taxonomy": [asdict(e) for e in LAYER_TAXONOMY],
        "decisions": decisions,
        "controls": controls,
        "notes": [{"layer": k, "note": v} for k, v in _OUT_OF_SCOPE_NOTES.items()],
    }


def report_to_text(report: dict) -> str:
    lines = ["Security layers:"]
    for e in report["taxonomy"]:
        lines.append(f"  Layer {e['number']:<4} {e['name']} [{e['concept']}]")
    lines.append("Decisions:")
    for d in report["decisions"]:
        lines.append(
            f"  slice {d['slice']} layer {d['layer']}: {d['isolation_label']} "
            f"({'virtual' if d['virtualized'] else 'physical'}) -> {', '.join(d['tags'])}"
        )
    lines.append("Control split:")
    for c in report["controls"]:
        lines.append(
            f"  slice {c['slice']} layer {c['layer']}: tenant {c['tenant_control']:g} / "
            f"operator {c['mno_control']:g} -> {', '.join(c['tags'])}"
        )
    for note in report["notes"]:
        lines.append(f"Note (Layer {note['layer']}): {note['note']}")
    return "\n".join(lines)


def presets_json() -> str:
    return json.dumps(
        {
            "slice_types": [asdict(p) for p in builtin_slice_types()],
            "isolation_levels": [{"level": k, "label": v} for k, v in isolation_taxonomy()],
            "security_layers": [asdict(e) for e in LAYER_TAXONOMY],
        },
        indent=2,
    )
