"""Verification conditions: extraction, goal formulas, solving and validation.

A ``verify_assert(cond)`` brillig call is a proof obligation.  Its goal
formula is the whole circuit conjoined with ``cond != 1``: unsat means the
condition holds on every execution, a model is a counterexample.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import interp
from .encode_ff import encode_circuit_ff, negated_condition_ff, witness_symbol
from .encode_int import encode_circuit_int, negated_condition_int
from .ir import VERIFY_ASSERT, BrilligCall, Circuit, Expression
from .smt import SmtScript
from .solver import BackendConfig, SolverError, SolverVerdict, run_backend, run_portfolio

log = logging.getLogger(__name__)

VERIFIED, FALSIFIED, UNKNOWN = "verified", "falsified", "unknown"


class MalformedVc(ValueError):
    pass


@dataclass(frozen=True)
class VerificationCondition:
    opcode_index: int
    cond: Expression
    label: str | None = None


@dataclass
class VcResult:
    vc: VerificationCondition
    verdict: str
    backend: str
    elapsed_ms: float
    counterexample: dict[int, int] | None = None
    reason: str | None = None
    # set when the solver could not be run or spoke garbage
    error: bool = False
    raw_model: dict[str, int] | None = field(default=None, repr=False)


def extract_vcs(c: Circuit) -> list[VerificationCondition]:
    vcs = []
    for i, op in enumerate(c.opcodes):
        if isinstance(op, BrilligCall) and op.function == VERIFY_ASSERT:
            if len(op.inputs) != 1:
                raise MalformedVc(f"opcode {i}: verify_assert takes exactly one input, got {len(op.inputs)}")
            vcs.append(VerificationCondition(i, op.inputs[0], op.label))
    return vcs


def encode_circuit(c: Circuit, encoding: str) -> SmtScript:
    if encoding == "ff":
        return encode_circuit_ff(c)
    if encoding == "int":
        return encode_circuit_int(c)
    raise ValueError(f"unknown encoding {encoding!r}")


def build_goal_formula(c: Circuit, vc: VerificationCondition, encoding: str) -> SmtScript:
    script = encode_circuit(c, encoding)
    negate = negated_condition_ff if encoding == "ff" else negated_condition_int
    script.assertions.append(negate(vc.cond, c.modulus))
    return script


def validate_counterexample(c: Circuit, vc: VerificationCondition, a: dict[int, int]) -> str | None:
    """Return why ``a`` is not a genuine counterexample, or None if it is."""
    try:
        res = interp.check_assignment(c, a)
    except interp.EvaluatedIndexOutOfRange as exc:
        return f"out-of-range memory access: {exc}"
    except interp.PartialAssignment as exc:
        return str(exc)
    if not isinstance(res, interp.Satisfied):
        return f"model violates opcode {res.opcode_index}"
    if interp.eval_expression(vc.cond, a, c.modulus) == 1:
        return "model satisfies the condition"
    return None


def _decide(c: Circuit, vc: VerificationCondition, v: SolverVerdict) -> VcResult:
    if v.kind == "unsat":
        return VcResult(vc, VERIFIED, v.backend, v.elapsed_ms)
    if v.kind == "unknown":
        return VcResult(vc, UNKNOWN, v.backend, v.elapsed_ms, reason=v.reason)
    a = {i: v.model[witness_symbol(i)] for i in range(c.num_witnesses)}
    problem = validate_counterexample(c, vc, a)
    if problem:
        log.warning("opcode %d: discarding solver model %s: %s", vc.opcode_index, v.model, problem)
        return VcResult(
            vc, UNKNOWN, v.backend, v.elapsed_ms, reason=f"model-validation-failure: {problem}", raw_model=v.model
        )
    return VcResult(vc, FALSIFIED, v.backend, v.elapsed_ms, counterexample=a, raw_model=v.model)


def check_vc(c: Circuit, vc: VerificationCondition, backends: list[BackendConfig], mode: str = "single") -> VcResult:
    if not backends:
        raise ValueError("at least one backend is required")
    scripts = {}
    for enc in {b.encoding for b in backends}:
        scripts[enc] = build_goal_formula(c, vc, enc)
    try:
        if mode == "portfolio":
            v = run_portfolio({b.name: scripts[b.encoding] for b in backends}, backends)
        elif mode == "single":
            b = backends[0]
            v = run_backend(scripts[b.encoding], b)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except SolverError as exc:
        backend = backends[0].name if mode == "single" else "portfolio"
        return VcResult(vc, UNKNOWN, backend, 0.0, reason=f"solver-error: {exc}", error=True)
    return _decide(c, vc, v)


def verify(c: Circuit, backends: list[BackendConfig], mode: str = "single", jobs: int = 1) -> list[VcResult]:
    """Check every VC of ``c``; results come back in program order."""
    vcs = extract_vcs(c)
    if jobs <= 1 or len(vcs) <= 1:
        return [check_vc(c, vc, backends, mode) for vc in vcs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda vc: check_vc(c, vc, backends, mode), vcs))
