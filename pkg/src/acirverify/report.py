"""Machine-readable verification reports (JSON) and their schema parser."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import jsonschema

from .ir import Circuit, serialize_circuit
from .vc import VcResult

SCHEMA_ID = "acir-verify/report-v1"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "circuit_sha256", "modulus", "mode", "results"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "source": {"type": ["string", "null"]},
        "circuit_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "modulus": {"type": "string", "pattern": "^[0-9]+$"},
        "mode": {"enum": ["single", "portfolio"]},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "opcode_index", "verdict", "backend", "elapsed_ms"],
                "additionalProperties": False,
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "opcode_index": {"type": "integer", "minimum": 0},
                    "label": {"type": ["string", "null"]},
                    "verdict": {"enum": ["verified", "falsified", "unknown"]},
                    "backend": {"type": "string"},
                    "elapsed_ms": {"type": "number", "minimum": 0},
                    "reason": {"type": ["string", "null"]},
                    "counterexample": {
                        "type": ["array", "null"],
                        "items": {
                            "type": "object",
                            "required": ["witness", "value"],
                            "additionalProperties": False,
                            "properties": {
                                "witness": {"type": "string", "pattern": "^w[0-9]+$"},
                                "name": {"type": ["string", "null"]},
                                "value": {"type": "string", "pattern": "^[0-9]+$"},
                                "public": {"type": "boolean"},
                            },
                        },
                    },
                },
            },
        },
    },
}


def circuit_hash(c: Circuit) -> str:
    return hashlib.sha256(serialize_circuit(c).encode()).hexdigest()


@dataclass
class CounterexampleValue:
    witness: str
    value: str
    name: str | None = None
    public: bool = False


@dataclass
class ResultEntry:
    index: int
    opcode_index: int
    verdict: str
    backend: str
    elapsed_ms: float
    label: str | None = None
    reason: str | None = None
    counterexample: list[CounterexampleValue] | None = None


@dataclass
class Report:
    circuit_sha256: str
    modulus: str
    mode: str
    results: list[ResultEntry] = field(default_factory=list)
    source: str | None = None
    schema: str = SCHEMA_ID

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def build_report(c: Circuit, results: list[VcResult], mode: str, source: str | None = None) -> Report:
    names = dict(c.witness_names)
    entries = []
    for i, r in enumerate(results):
        cex = None
        if r.counterexample is not None:
            cex = [
                CounterexampleValue(f"w{w}", str(v), names.get(w), w in c.public_inputs)
                for w, v in sorted(r.counterexample.items())
            ]
        entries.append(
            ResultEntry(i, r.vc.opcode_index, r.verdict, r.backend, round(r.elapsed_ms, 3), r.vc.label, r.reason, cex)
        )
    return Report(circuit_hash(c), str(c.modulus), mode, entries, source)


def parse_report(text: str) -> Report:
    """Validate ``text`` against the report schema and load it."""
    data = json.loads(text)
    jsonschema.validate(data, REPORT_SCHEMA)
    results = []
    for entry in data["results"]:
        entry = dict(entry)
        if entry.get("counterexample") is not None:
            entry["counterexample"] = [CounterexampleValue(**v) for v in entry["counterexample"]]
        results.append(ResultEntry(**entry))
    return Report(
        data["circuit_sha256"], data["modulus"], data["mode"], results, data.get("source"), data["schema"]
    )
