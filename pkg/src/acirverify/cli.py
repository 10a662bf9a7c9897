"""``acir-verify``: validate, interpret, encode, verify and benchmark circuits.

Exit status of ``verify``: 0 all conditions verified, 1 some condition
falsified, 2 some unknown and none falsified, 3 usage, I/O or solver error.
"""

from __future__ import annotations

import argparse
import logging
import random
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bench, interp
from .ir import CircuitError, ParseError, parse_circuit, validate
from .report import build_report
from .solver import BACKENDS, DEFAULT_TIMEOUT_MS, default_backend
from .vc import FALSIFIED, UNKNOWN, MalformedVc, build_goal_formula, encode_circuit, extract_vcs, verify

EXIT_OK, EXIT_FALSIFIED, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3

ENCODINGS = (*BACKENDS, "portfolio")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


@dataclass
class RunConfig:
    subcommand: str
    input: Path
    encoding: str = "ff-split"
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    solvers: dict[str, str] = field(default_factory=dict)
    solver_args: dict[str, list[str]] = field(default_factory=dict)
    output: str = "text"
    seed: int = 0

    def backend_names(self) -> list[str]:
        return list(BACKENDS) if self.encoding == "portfolio" else [self.encoding]

    def backends(self):
        names = self.backend_names()
        if self.encoding == "portfolio" and len(names) < 2:
            raise UsageError("portfolio needs at least two backends")
        out = []
        for name in names:
            solver = self.solvers.get(name, self.solvers.get("*"))
            args = self.solver_args.get(name, self.solver_args.get("*"))
            out.append(default_backend(name, solver, args, self.timeout_ms))
        return out


def _per_backend(values: list[str] | None, split=False) -> dict:
    """Parse repeated ``[backend=]value`` options."""
    out = {}
    for v in values or []:
        key, sep, rest = v.partition("=")
        if sep and key in BACKENDS:
            target, value = key, rest
        else:
            target, value = "*", v
        out[target] = shlex.split(value) if split else value
    return out


def _load(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return parse_circuit(text)


def _config(args) -> RunConfig:
    return RunConfig(
        subcommand=args.command,
        input=Path(args.input),
        encoding=getattr(args, "encoding", "ff-split"),
        timeout_ms=getattr(args, "timeout_ms", DEFAULT_TIMEOUT_MS),
        solvers=_per_backend(getattr(args, "solver", None)),
        solver_args=_per_backend(getattr(args, "solver_args", None), split=True),
        output=getattr(args, "output", "text"),
        seed=getattr(args, "seed", 0),
    )


# ------------------------------------------------------------------ commands


def cmd_validate(cfg: RunConfig, out) -> int:
    try:
        c = parse_circuit(Path(cfg.input).read_text(), check=False)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    diags = validate(c)
    for d in diags:
        print(d, file=out)
    if not diags:
        print(f"ok: {len(c.opcodes)} opcodes, {c.num_witnesses} witnesses", file=out)
    return EXIT_ERROR if diags else EXIT_OK


def parse_assignment(text: str, c) -> dict[int, int]:
    a = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key.startswith("w") or not key[1:].isdigit():
            raise UsageError(f"assignment line {lineno}: expected w<i>=<decimal>")
        try:
            a[int(key[1:])] = int(value.strip()) % c.modulus
        except ValueError:
            raise UsageError(f"assignment line {lineno}: bad value {value.strip()!r}") from None
    missing = [w for w in range(c.num_witnesses) if w not in a]
    if missing:
        raise UsageError(f"partial assignment: no value for w{missing[0]}")
    extra = [w for w in a if w >= c.num_witnesses]
    if extra:
        raise UsageError(f"assignment names unknown witness w{extra[0]}")
    return a


def cmd_interpret(cfg: RunConfig, assignment: Path, out) -> int:
    c = _load(cfg.input)
    try:
        text = Path(assignment).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {assignment}: {exc}") from exc
    a = parse_assignment(text, c)
    try:
        res = interp.check_assignment(c, a)
    except interp.EvaluatedIndexOutOfRange as exc:
        print(f"OutOfRange({exc.opcode_index}): {exc}", file=out)
        return 1
    print(res, file=out)
    return 0 if isinstance(res, interp.Satisfied) else 1


def cmd_emit(cfg: RunConfig, vc_index: int | None, out) -> int:
    c = _load(cfg.input)
    encoding = "ff" if cfg.encoding.startswith("ff") else cfg.encoding
    if encoding not in ("ff", "int"):
        raise UsageError(f"emit needs a single encoding (ff or int), not {cfg.encoding!r}")
    if vc_index is None:
        script = encode_circuit(c, encoding)
    else:
        vcs = extract_vcs(c)
        if not 0 <= vc_index < len(vcs):
            raise UsageError(f"--vc {vc_index}: circuit has {len(vcs)} verification condition(s)")
        script = build_goal_formula(c, vcs[vc_index], encoding)
    out.write(script.to_smtlib())
    return EXIT_OK


def memory_lint(c, samples: int = 256, seed: int = 0, budget: int = 20_000) -> set[int]:
    """Memory ops some admitted execution drives out of range.

    Exhaustive for tiny fields, otherwise random sampling (mostly useful for
    circuits whose early constraints are loose).
    """
    if c.modulus**c.num_witnesses <= budget:
        en = interp.enumerate_satisfying(c, budget=budget)
        pool = [dict(enumerate(t)) for t in sorted(en.out_of_range)]
    else:
        rng = random.Random(seed)
        small = [0, 1, 2, c.modulus - 1]
        pool = [
            {w: rng.choice(small) if rng.random() < 0.5 else rng.randrange(c.modulus) for w in range(c.num_witnesses)}
            for _ in range(samples)
        ]
    return interp.reachable_out_of_range(c, pool)


def _render_text(c, source, results, lint, out):
    print(f"{source}: {len(results)} verification condition(s), modulus {c.modulus_name or c.modulus}", file=out)
    for op in sorted(lint):
        print(f"  warning: opcode {op}: memory index can fall outside its block", file=out)
    for i, r in enumerate(results):
        label = f' "{r.vc.label}"' if r.vc.label else ""
        extra = f": {r.reason}" if r.reason else ""
        verdict = r.verdict.upper() if r.verdict == FALSIFIED else r.verdict
        print(f"  [{i}] opcode {r.vc.opcode_index}{label}: {verdict} ({r.backend}, {r.elapsed_ms:.0f} ms){extra}", file=out)
        if r.counterexample is not None:
            print("      counterexample:", file=out)
            for w, v in sorted(r.counterexample.items()):
                tags = []
                if c.name_of(w) != f"w{w}":
                    tags.append(f"w{w}")
                if w in c.public_inputs:
                    tags.append("public")
                suffix = f"  ({', '.join(tags)})" if tags else ""
                print(f"        {c.name_of(w)} = {v}{suffix}", file=out)


def cmd_verify(cfg: RunConfig, out, strict_memory_lint=False, jobs=1) -> int:
    c = _load(cfg.input)
    backends = cfg.backends()
    mode = "portfolio" if cfg.encoding == "portfolio" else "single"
    lint = memory_lint(c, seed=cfg.seed)
    results = verify(c, backends, mode=mode, jobs=jobs)
    if cfg.output == "json":
        out.write(build_report(c, results, mode, str(cfg.input)).to_json())
        for op in sorted(lint):
            print(f"warning: opcode {op}: memory index can fall outside its block", file=sys.stderr)
    else:
        _render_text(c, cfg.input, results, lint, out)
    if any(r.error for r in results) or (strict_memory_lint and lint):
        for r in results:
            if r.error:
                print(f"error: {r.reason}", file=sys.stderr)
        return EXIT_ERROR
    if any(r.verdict == FALSIFIED for r in results):
        return EXIT_FALSIFIED
    if any(r.verdict == UNKNOWN for r in results):
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_bench(cfg: RunConfig, out, out_dir: Path | None = None) -> int:
    directory = Path(cfg.input)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    names = cfg.backend_names()
    backends = [
        default_backend(n, cfg.solvers.get(n, cfg.solvers.get("*")), cfg.solver_args.get(n, cfg.solver_args.get("*")), cfg.timeout_ms)
        for n in names
    ]
    rows = bench.run_bench(directory, backends)
    if cfg.output == "json":
        out.write(bench.to_json(rows, names, cfg.timeout_ms))
    else:
        out.write(bench.format_table(rows, names))
    if out_dir is not None:
        paths = bench.write_outputs(rows, names, cfg.timeout_ms, out_dir)
        print("wrote " + ", ".join(str(p) for p in paths.values()), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------- main


def _solver_opts(p):
    p.add_argument("--timeout-ms", type=int, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--solver", action="append", metavar="[BACKEND=]PATH", help="solver executable (repeatable)")
    p.add_argument("--solver-args", action="append", metavar="[BACKEND=]ARGS", help="solver arguments (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="acir-verify", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check structural invariants")
    p.add_argument("input")

    p = sub.add_parser("interpret", help="check a concrete assignment against the circuit")
    p.add_argument("input")
    p.add_argument("assignment", help="file of w<i>=<decimal> lines")

    p = sub.add_parser("emit", help="print the SMT-LIB2 encoding")
    p.add_argument("input")
    p.add_argument("--encoding", default="ff", choices=("ff", "int", *BACKENDS))
    p.add_argument("--vc", type=int, default=None, metavar="INDEX", help="append the negated condition of this VC")

    p = sub.add_parser("verify", help="check every verify_assert condition")
    p.add_argument("input")
    p.add_argument("--encoding", default="ff-split", choices=ENCODINGS)
    _solver_opts(p)
    p.add_argument("--output", default="text", choices=("text", "json"))
    p.add_argument("--strict-memory-lint", action="store_true", help="fail if a memory index can go out of range")
    p.add_argument("--jobs", type=int, default=1, help="check this many conditions concurrently")
    p.add_argument("--seed", type=int, default=0, help="seed for lint sampling")

    p = sub.add_parser("bench", help="time every fixture under each backend")
    p.add_argument("input", help="directory of .acir fixtures")
    p.add_argument("--encoding", default="portfolio", choices=ENCODINGS, help="backends to time (portfolio = all)")
    _solver_opts(p)
    p.add_argument("--output", default="text", choices=("text", "json"))
    p.add_argument("--out", type=Path, default=None, help="also write bench.tsv, bench.json and bench.png here")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    out = sys.stdout
    try:
        cfg = _config(args)
        if cfg.timeout_ms <= 0:
            raise UsageError("--timeout-ms must be positive")
        if args.command == "validate":
            return cmd_validate(cfg, out)
        if args.command == "interpret":
            return cmd_interpret(cfg, Path(args.assignment), out)
        if args.command == "emit":
            return cmd_emit(cfg, args.vc, out)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.strict_memory_lint, args.jobs)
        if args.command == "bench":
            return cmd_bench(cfg, out, args.out)
    except (UsageError, ParseError, CircuitError, MalformedVc, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
