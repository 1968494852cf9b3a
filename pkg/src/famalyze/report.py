"""Text and JSON rendering of analysis results."""

from __future__ import annotations

from typing import Any

from .engine import InvariantMap, Report
from .frontend.labels import locations
from .numdom import NumElement

STATE_LEAF = {
    "oneOf": [
        {"type": "string", "enum": ["bottom", "top"]},
        {"type": "array", "items": {"type": "string"}},
    ]
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["program", "options", "locations", "asserts"],
    "properties": {
        "program": {"type": "string"},
        "options": {"type": "object"},
        "locations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "state"],
                "properties": {
                    "label": {"type": "integer"},
                    "kind": {"type": "string"},
                    "state": {"oneOf": [{"$ref": "#/$defs/tree"}, {"$ref": "#/$defs/tuple"}]},
                },
            },
        },
        "asserts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "partitions"],
                "properties": {
                    "label": {"type": "integer"},
                    "partitions": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["cond", "verdict"],
                            "properties": {
                                "cond": {"type": "string"},
                                "verdict": {"enum": ["valid", "violated", "unknown"]},
                            },
                        },
                    },
                },
            },
        },
    },
    "$defs": {
        "tree": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["leaf"],
                    "properties": {"leaf": STATE_LEAF},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["node", "true", "false"],
                    "properties": {
                        "node": {"type": "string"},
                        "true": {"$ref": "#/$defs/tree"},
                        "false": {"$ref": "#/$defs/tree"},
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "tuple": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["config", "state"],
                "properties": {"config": {"type": "string"}, "state": STATE_LEAF},
                "additionalProperties": False,
            },
        },
    },
}


def _state_text(e: NumElement) -> str:
    r = e.render()
    return r if isinstance(r, str) else " && ".join(r)


def to_json(result: InvariantMap) -> dict[str, Any]:
    locs = []
    for loc in locations(result.program):
        locs.append({"label": loc.label, "kind": loc.kind, "state": result.states[loc.label].to_json()})
    asserts = [{"label": label, "partitions": [{"cond": c, "verdict": v} for c, v in parts]}
               for label, parts in sorted(result.asserts.items())]
    return {"program": result.program.name, "options": result.options.as_dict(),
            "locations": locs, "asserts": asserts}


def to_text(result: InvariantMap) -> str:
    lines = [f"program {result.program.name or '<input>'}  "
             f"[{result.options.backend}, leaves={result.options.leaf_domain}, "
             f"nodes={result.options.node_domain}]"]
    for loc in locations(result.program):
        lines.append(f"({loc.label}) {loc.text}")
        for cond, e in result.states[loc.label].partitions():
            lines.append(f"    {cond}: {_state_text(e)}")
    for label, parts in sorted(result.asserts.items()):
        lines.append(f"assert at ({label}):")
        for cond, v in parts:
            lines.append(f"    {cond}: {v}")
    lines.append(f"analysis time {result.seconds:.3f} s")
    return "\n".join(lines)


def compare_text(report: Report, names=None) -> str:
    counts = report.counts()
    lines = [f"equal={counts['equal']} sound-over-approx={counts['sound-over-approx']} UNSOUND={counts['UNSOUND']}"]
    for label, k, cls in report.failures():
        lines.append(f"  ({label}) {k.as_dict()}: {cls}")
    return "\n".join(lines)
