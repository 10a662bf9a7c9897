"""Fixture benchmarks: one row per circuit, one timing column per backend.

Cells are seconds, ``t`` for a timeout and ``err`` for a failed run, the same
layout as the usual sp / gb / int comparison tables.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ir import parse_circuit
from .solver import BackendConfig, SolverError, run_backend
from .vc import UNKNOWN, encode_circuit, extract_vcs, verify

COLUMN = {"ff-split": "sp", "ff-gb": "gb", "int": "int"}
TIMEOUT, ERROR = "t", "err"


@dataclass
class BenchRow:
    id: str
    witnesses: int = 0
    opcodes: int = 0
    range_checks: int = 0
    max_range_bits: int = 0
    times: dict[str, float | str] = field(default_factory=dict)
    verdicts: dict[str, list[str]] = field(default_factory=dict)
    error: str | None = None


def _time_backend(c, cfg: BackendConfig) -> tuple[float | str, list[str]]:
    if not extract_vcs(c):
        # no obligations: time plain satisfiability of the constraints
        try:
            v = run_backend(encode_circuit(c, cfg.encoding), cfg)
        except SolverError:
            return ERROR, []
        if v.kind == "unknown":
            return (TIMEOUT if v.reason == "timeout" else ERROR), [v.kind]
        return round(v.elapsed_ms / 1000, 3), [v.kind]
    results = verify(c, [cfg])
    verdicts = [r.verdict for r in results]
    if any(r.error for r in results):
        return ERROR, verdicts
    if any(r.verdict == UNKNOWN and r.reason == "timeout" for r in results):
        return TIMEOUT, verdicts
    if any(r.verdict == UNKNOWN for r in results):
        return ERROR, verdicts
    return round(sum(r.elapsed_ms for r in results) / 1000, 3), verdicts


def bench_circuit(name: str, text: str, backends: list[BackendConfig]) -> BenchRow:
    try:
        c = parse_circuit(text)
    except ValueError as exc:
        return BenchRow(name, times={b.name: ERROR for b in backends}, error=str(exc))
    row = BenchRow(name, **c.stats())
    for cfg in backends:
        row.times[cfg.name], row.verdicts[cfg.name] = _time_backend(c, cfg)
    return row


def run_bench(directory: Path, backends: list[BackendConfig]) -> list[BenchRow]:
    rows = []
    for path in sorted(Path(directory).glob("*.acir")):
        try:
            text = path.read_text()
        except OSError as exc:
            rows.append(BenchRow(path.stem, times={b.name: ERROR for b in backends}, error=str(exc)))
            continue
        rows.append(bench_circuit(path.stem, text, backends))
    return rows


def _header(backends):
    return ["id", "#w", "#o", "#r", "r_max", *(COLUMN[b] for b in backends)]


def _cells(row: BenchRow, backends):
    return [
        row.id, str(row.witnesses), str(row.opcodes), str(row.range_checks), str(row.max_range_bits),
        *(str(row.times.get(b, "")) for b in backends),
    ]


def format_table(rows: list[BenchRow], backends: list[str]) -> str:
    table = [_header(backends)] + [_cells(r, backends) for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(table[0]))]
    out = []
    for k, line in enumerate(table):
        out.append("  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(line, widths))))
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    for r in rows:
        if r.error:
            out.append(f"# {r.id}: {r.error}")
    return "\n".join(out) + "\n"


def to_tsv(rows: list[BenchRow], backends: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(_header(backends))
    for r in rows:
        w.writerow(_cells(r, backends))
    return buf.getvalue()


def to_json(rows: list[BenchRow], backends: list[str], timeout_ms: int) -> str:
    doc = {"backends": backends, "timeout_ms": timeout_ms, "rows": [asdict(r) for r in rows]}
    return json.dumps(doc, indent=2) + "\n"


def write_outputs(rows: list[BenchRow], backends: list[str], timeout_ms: int, out_dir: Path) -> dict[str, Path]:
    from .plotting import bench_figure

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"tsv": out_dir / "bench.tsv", "json": out_dir / "bench.json", "png": out_dir / "bench.png"}
    paths["tsv"].write_text(to_tsv(rows, backends))
    paths["json"].write_text(to_json(rows, backends, timeout_ms))
    bench_figure(rows, backends, timeout_ms / 1000, paths["png"])
    return paths
