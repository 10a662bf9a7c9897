"""Circuit translation into the SMT theory of finite fields.

Symbol naming is fixed so scripts are reproducible and models decodable:
witness ``i`` is ``w<i>``, bit ``j`` of the range check at opcode ``k`` is
``rb_<k>_<j>``, and cell ``i`` of block ``id`` after ``gen`` writes is
``m_<id>_<i>_<gen>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .ir import VERIFY_ASSERT, AssertZero, BrilligCall, Circuit, Expression, MemoryInit, MemoryOp, RangeCheck
from .smt import SmtScript, Term

FF_LOGIC = "QF_FF"
SORT = "F"

# block id -> number of writes encoded so far
MutationIndexMap = dict[int, int]


def witness_symbol(i: int) -> str:
    return f"w{i}"


def range_bit_symbol(opcode_index: int, bit: int) -> str:
    return f"rb_{opcode_index}_{bit}"


def cell_symbol(block_id: int, index: int, generation: int) -> str:
    return f"m_{block_id}_{index}_{generation}"


@dataclass
class FFContext:
    modulus: int
    block_sizes: dict[int, int] = field(default_factory=dict)
    sort: str = SORT

    def lit(self, v: int) -> Term:
        return ("as", f"ff{v % self.modulus}", self.sort)


def encode_expression_ff(e: Expression, ctx: FFContext) -> Term:
    terms: list[Term] = [("ff.mul", ctx.lit(r), witness_symbol(a), witness_symbol(b)) for r, a, b in e.quad]
    terms += [("ff.mul", ctx.lit(s), witness_symbol(c)) for s, c in e.lin]
    if e.const % ctx.modulus or not terms:
        terms.append(ctx.lit(e.const))
    # ff.add needs two or more arguments
    return terms[0] if len(terms) == 1 else ("ff.add", *terms)


def encode_assert_zero_ff(e: Expression, ctx: FFContext) -> Term:
    return ("=", encode_expression_ff(e, ctx), ctx.lit(0))


def encode_range_ff(w: int, bits: int, ctx: FFContext, opcode_index: int):
    """Bit-decompose ``w``: ``n`` fresh bits, a bitsum equation, ``n`` booleanity constraints."""
    ys = [range_bit_symbol(opcode_index, j) for j in range(bits)]
    decls = [(y, ctx.sort) for y in ys]
    # ff.bitsum needs two or more arguments; a single bit is its own sum
    total: Term = ys[0] if bits == 1 else ("ff.bitsum", *ys)
    asserts: list[Term] = [("=", total, witness_symbol(w))]
    asserts += [("=", ("ff.mul", y, ("ff.add", y, ctx.lit(-1))), ctx.lit(0)) for y in ys]
    return decls, asserts


# Memory rules are theory-agnostic given an expression encoder and a literal
# constructor; the integer encoding reuses them.


def memory_init(block_id, witnesses, ctx, mi: MutationIndexMap):
    decls = [(cell_symbol(block_id, i, 0), ctx.sort) for i in range(len(witnesses))]
    asserts: list[Term] = [("=", cell_symbol(block_id, i, 0), witness_symbol(x)) for i, x in enumerate(witnesses)]
    ctx.block_sizes[block_id] = len(witnesses)
    return decls, asserts, {**mi, block_id: 0}


def memory_read(block_id, index, value, ctx, mi: MutationIndexMap, encode: Callable):
    ind, val, gen = encode(index, ctx), encode(value, ctx), mi[block_id]
    return [
        ("=>", ("=", ind, ctx.lit(k)), ("=", cell_symbol(block_id, k, gen), val))
        for k in range(ctx.block_sizes[block_id])
    ]


def memory_write(block_id, index, value, ctx, mi: MutationIndexMap, encode: Callable):
    ind, val = encode(index, ctx), encode(value, ctx)
    cur = mi[block_id]
    nxt = cur + 1
    n = ctx.block_sizes[block_id]
    decls = [(cell_symbol(block_id, k, nxt), ctx.sort) for k in range(n)]
    asserts: list[Term] = [
        ("=>", ("=", ind, ctx.lit(k)), ("=", cell_symbol(block_id, k, nxt), val)) for k in range(n)
    ]
    asserts += [
        ("=>", ("not", ("=", ind, ctx.lit(k))), ("=", cell_symbol(block_id, k, nxt), cell_symbol(block_id, k, cur)))
        for k in range(n)
    ]
    return decls, asserts, {**mi, block_id: nxt}


def encode_memory_init_ff(block_id: int, witnesses, ctx: FFContext, mi: MutationIndexMap):
    return memory_init(block_id, witnesses, ctx, mi)


def encode_memory_read_ff(block_id: int, index: Expression, value: Expression, ctx: FFContext, mi: MutationIndexMap):
    return memory_read(block_id, index, value, ctx, mi, encode_expression_ff)


def encode_memory_write_ff(block_id: int, index: Expression, value: Expression, ctx: FFContext, mi: MutationIndexMap):
    return memory_write(block_id, index, value, ctx, mi, encode_expression_ff)


def encode_circuit_ff(c: Circuit, logic: str = FF_LOGIC) -> SmtScript:
    ctx = FFContext(c.modulus)
    script = SmtScript(
        logic=logic,
        sort_definitions=[(SORT, ("_", "FiniteField", str(c.modulus)))],
        modulus=c.modulus,
    )
    for i in range(c.num_witnesses):
        script.declare(witness_symbol(i), SORT)
    script.goal_symbols = [witness_symbol(i) for i in range(c.num_witnesses)]
    mi: MutationIndexMap = {}
    for k, op in enumerate(c.opcodes):
        decls: list = []
        asserts: list = []
        if isinstance(op, AssertZero):
            asserts = [encode_assert_zero_ff(op.expr, ctx)]
        elif isinstance(op, RangeCheck):
            decls, asserts = encode_range_ff(op.witness, op.bits, ctx, k)
        elif isinstance(op, MemoryInit):
            decls, asserts, mi = encode_memory_init_ff(op.block_id, op.witnesses, ctx, mi)
        elif isinstance(op, MemoryOp):
            if op.is_write:
                decls, asserts, mi = encode_memory_write_ff(op.block_id, op.index, op.value, ctx, mi)
            else:
                asserts = encode_memory_read_ff(op.block_id, op.index, op.value, ctx, mi)
        elif isinstance(op, BrilligCall):
            if op.function == VERIFY_ASSERT:
                script.vc_markers.append(k)
        script.declarations.extend(decls)
        script.assertions.extend(asserts)
    return script


def negated_condition_ff(cond: Expression, modulus: int) -> Term:
    ctx = FFContext(modulus)
    return ("not", ("=", encode_expression_ff(cond, ctx), ctx.lit(1)))
