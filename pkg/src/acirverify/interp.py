"""Concrete evaluation of circuits over the prime field.

This is the independent oracle for the encoders: it never looks at SMT terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ir import AssertZero, BrilligCall, Circuit, Expression, MemoryInit, MemoryOp, RangeCheck

Assignment = dict[int, int]

DEFAULT_BUDGET = 10**6


class EvaluatedIndexOutOfRange(Exception):
    def __init__(self, opcode_index: int, index: int, block_size: int):
        self.opcode_index = opcode_index
        self.index = index
        self.block_size = block_size
        super().__init__(f"opcode {opcode_index}: memory index {index} outside block of size {block_size}")


class BudgetExceeded(Exception):
    pass


class PartialAssignment(ValueError):
    pass


@dataclass(frozen=True)
class Satisfied:
    def __str__(self):
        return "Satisfied"


@dataclass(frozen=True)
class Violated:
    opcode_index: int

    def __str__(self):
        return f"Violated({self.opcode_index})"


CheckResult = Satisfied | Violated


def eval_expression(e: Expression, a: Assignment, p: int) -> int:
    total = e.const
    for r, x, y in e.quad:
        total += r * a[x] * a[y]
    for s, x in e.lin:
        total += s * a[x]
    return total % p


def _require_total(c: Circuit, a: Assignment):
    missing = [w for w in range(c.num_witnesses) if w not in a]
    if missing:
        raise PartialAssignment(f"assignment missing witness w{missing[0]}")


def check_assignment(c: Circuit, a: Assignment, out_of_range: str = "strict") -> CheckResult:
    """Execute ``c`` against the full assignment ``a``.

    ``out_of_range="strict"`` raises `EvaluatedIndexOutOfRange` when a memory
    index evaluates outside its block.  ``"vacuous"`` instead mirrors the SMT
    encodings: an out-of-range read constrains nothing and an out-of-range
    write leaves the block unchanged.
    """
    _require_total(c, a)
    p = c.modulus
    vals = {w: v % p for w, v in a.items()}
    memory: dict[int, list[int]] = {}
    for i, op in enumerate(c.opcodes):
        if isinstance(op, AssertZero):
            if eval_expression(op.expr, vals, p) != 0:
                return Violated(i)
        elif isinstance(op, RangeCheck):
            if vals[op.witness] >= 1 << op.bits:
                return Violated(i)
        elif isinstance(op, MemoryInit):
            memory[op.block_id] = [vals[w] for w in op.witnesses]
        elif isinstance(op, MemoryOp):
            block = memory[op.block_id]
            k = eval_expression(op.index, vals, p)
            if k >= len(block):
                if out_of_range == "strict":
                    raise EvaluatedIndexOutOfRange(i, k, len(block))
                continue
            if op.is_write:
                block[k] = eval_expression(op.value, vals, p)
            elif block[k] != eval_expression(op.value, vals, p):
                return Violated(i)
        elif isinstance(op, BrilligCall):
            pass
    return Satisfied()


@dataclass(frozen=True)
class Enumeration:
    satisfying: frozenset[tuple[int, ...]]
    out_of_range: frozenset[tuple[int, ...]]

    def assignments(self) -> list[Assignment]:
        return [dict(enumerate(t)) for t in sorted(self.satisfying)]


def enumerate_satisfying(
    c: Circuit, budget: int = DEFAULT_BUDGET, out_of_range: str = "strict"
) -> Enumeration:
    """Brute-force every assignment over ``[0, p)^num_witnesses``.

    Satisfying assignments are returned as value tuples indexed by witness.
    In strict mode, assignments that hit an out-of-range memory index are
    excluded from ``satisfying`` and collected in ``out_of_range``.
    """
    p, n = c.modulus, c.num_witnesses
    if p**n > budget:
        raise BudgetExceeded(f"{p}^{n} assignments exceed budget {budget}")
    sat, oor = set(), set()
    for values in itertools.product(range(p), repeat=n):
        try:
            if isinstance(check_assignment(c, dict(enumerate(values)), out_of_range), Satisfied):
                sat.add(values)
        except EvaluatedIndexOutOfRange:
            oor.add(values)
    return Enumeration(frozenset(sat), frozenset(oor))


def reachable_out_of_range(c: Circuit, assignments) -> set[int]:
    """Opcode indices of memory ops that some assignment reaches out of range.

    "Reaches" means every earlier opcode is satisfied, so the access lies on
    an execution the circuit otherwise admits.
    """
    found = set()
    for a in assignments:
        try:
            check_assignment(c, a)
        except EvaluatedIndexOutOfRange as exc:
            found.add(exc.opcode_index)
    return found
