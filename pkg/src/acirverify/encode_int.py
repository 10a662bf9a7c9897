"""Circuit translation into nonlinear integer arithmetic modulo p.

Every integer symbol (witnesses and memory cells) carries the domain
constraint ``0 <= s < p``; expression terms are wrapped in a single outer
``mod p`` so equalities compare canonical residues.  Symbol names match the
finite-field encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encode_ff import MutationIndexMap, memory_init, memory_read, memory_write, witness_symbol
from .ir import VERIFY_ASSERT, AssertZero, BrilligCall, Circuit, Expression, MemoryInit, MemoryOp, RangeCheck
from .smt import SmtScript, Term

INT_LOGIC = "QF_NIA"


@dataclass
class IntContext:
    modulus: int
    block_sizes: dict[int, int] = field(default_factory=dict)
    sort: str = "Int"

    def lit(self, v: int) -> Term:
        return str(v % self.modulus)

    def domain(self, symbol: str) -> Term:
        return ("and", ("<=", "0", symbol), ("<", symbol, str(self.modulus)))


def encode_expression_int(e: Expression, ctx: IntContext) -> Term:
    terms: list[Term] = [("*", ctx.lit(r), witness_symbol(a), witness_symbol(b)) for r, a, b in e.quad]
    terms += [("*", ctx.lit(s), witness_symbol(c)) for s, c in e.lin]
    if e.const % ctx.modulus or not terms:
        terms.append(ctx.lit(e.const))
    inner = terms[0] if len(terms) == 1 else ("+", *terms)
    return ("mod", inner, str(ctx.modulus))


def encode_assert_zero_int(e: Expression, ctx: IntContext) -> Term:
    return ("=", encode_expression_int(e, ctx), "0")


def encode_range_int(w: int, bits: int, ctx: IntContext) -> Term:
    return ("<", witness_symbol(w), str(1 << bits))


def _with_domains(decls, asserts, ctx):
    return decls, [ctx.domain(name) for name, _ in decls] + asserts


def encode_memory_init_int(block_id: int, witnesses, ctx: IntContext, mi: MutationIndexMap):
    decls, asserts, mi = memory_init(block_id, witnesses, ctx, mi)
    return (*_with_domains(decls, asserts, ctx), mi)


def encode_memory_read_int(block_id: int, index: Expression, value: Expression, ctx: IntContext, mi: MutationIndexMap):
    return memory_read(block_id, index, value, ctx, mi, encode_expression_int)


def encode_memory_write_int(block_id: int, index: Expression, value: Expression, ctx: IntContext, mi: MutationIndexMap):
    decls, asserts, mi = memory_write(block_id, index, value, ctx, mi, encode_expression_int)
    return (*_with_domains(decls, asserts, ctx), mi)


def encode_circuit_int(c: Circuit, logic: str = INT_LOGIC) -> SmtScript:
    ctx = IntContext(c.modulus)
    script = SmtScript(logic=logic, modulus=c.modulus)
    for i in range(c.num_witnesses):
        script.declare(witness_symbol(i), "Int")
        script.assertions.append(ctx.domain(witness_symbol(i)))
    script.goal_symbols = [witness_symbol(i) for i in range(c.num_witnesses)]
    mi: MutationIndexMap = {}
    for k, op in enumerate(c.opcodes):
        decls: list = []
        asserts: list = []
        if isinstance(op, AssertZero):
            asserts = [encode_assert_zero_int(op.expr, ctx)]
        elif isinstance(op, RangeCheck):
            asserts = [encode_range_int(op.witness, op.bits, ctx)]
        elif isinstance(op, MemoryInit):
            decls, asserts, mi = encode_memory_init_int(op.block_id, op.witnesses, ctx, mi)
        elif isinstance(op, MemoryOp):
            if op.is_write:
                decls, asserts, mi = encode_memory_write_int(op.block_id, op.index, op.value, ctx, mi)
            else:
                asserts = encode_memory_read_int(op.block_id, op.index, op.value, ctx, mi)
        elif isinstance(op, BrilligCall):
            if op.function == VERIFY_ASSERT:
                script.vc_markers.append(k)
        script.declarations.extend(decls)
        script.assertions.extend(asserts)
    return script


def negated_condition_int(cond: Expression, modulus: int) -> Term:
    return ("not", ("=", encode_expression_int(cond, IntContext(modulus)), "1"))
