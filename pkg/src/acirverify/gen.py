"""Seeded random circuits for differential testing and round-trip checks."""

from __future__ import annotations

import random

from .ir import VERIFY_ASSERT, AssertZero, BrilligCall, Circuit, Expression, MemoryInit, MemoryOp, RangeCheck

KINDS = ("assert_zero", "range", "mem_init", "mem_op", "brillig")


def random_expression(rng: random.Random, p: int, num_witnesses: int, max_quad: int = 2, max_lin: int = 2) -> Expression:
    def coeff():
        # small signed values keep the polynomials interesting at tiny primes
        return rng.choice((rng.randint(-3, 3), rng.randrange(p)))

    w = lambda: rng.randrange(num_witnesses)  # noqa: E731
    quad = [(coeff(), w(), w()) for _ in range(rng.randint(0, max_quad))]
    lin = [(coeff(), w()) for _ in range(rng.randint(0, max_lin))]
    return Expression(tuple(quad), tuple(lin), coeff() if rng.random() < 0.7 else 0)


def _index_expression(rng, p, n, size):
    roll = rng.random()
    if roll < 0.4:
        return Expression.constant(rng.randrange(size + 1))
    if roll < 0.8:
        return Expression.witness(rng.randrange(n))
    return random_expression(rng, p, n, max_quad=1, max_lin=1)


def random_circuit(
    rng: random.Random,
    p: int,
    max_witnesses: int = 3,
    max_opcodes: int = 4,
    num_opcodes: int | None = None,
    num_witnesses: int | None = None,
    max_block: int = 3,
) -> Circuit:
    n = num_witnesses if num_witnesses is not None else rng.randint(1, max_witnesses)
    count = num_opcodes if num_opcodes is not None else rng.randint(0, max_opcodes)
    max_bits = p.bit_length() - 1
    blocks: dict[int, int] = {}
    ops = []
    while len(ops) < count:
        kind = rng.choice(KINDS)
        if kind == "assert_zero":
            ops.append(AssertZero(random_expression(rng, p, n)))
        elif kind == "range":
            ops.append(RangeCheck(rng.randrange(n), rng.randint(1, min(max_bits, 40))))
        elif kind == "mem_init" or (kind == "mem_op" and not blocks):
            bid = len(blocks)
            ws = tuple(rng.randrange(n) for _ in range(rng.randint(0, max_block)))
            blocks[bid] = len(ws)
            ops.append(MemoryInit(bid, ws))
        elif kind == "mem_op":
            bid = rng.choice(sorted(blocks))
            index = _index_expression(rng, p, n, blocks[bid])
            if rng.random() < 0.5:
                ops.append(MemoryOp(bid, "read", index, Expression.witness(rng.randrange(n))))
            else:
                ops.append(MemoryOp(bid, "write", index, random_expression(rng, p, n, 1, 1)))
        else:
            if rng.random() < 0.5:
                ops.append(BrilligCall(VERIFY_ASSERT, (random_expression(rng, p, n),), ()))
            else:
                outs = tuple(rng.randrange(n) for _ in range(rng.randint(0, 2)))
                ops.append(BrilligCall("hint", (random_expression(rng, p, n),), outs))
    return Circuit(p, n, tuple(ops), frozenset(w for w in range(n) if rng.random() < 0.3))


def corpus(seed: int, size: int, primes=(7, 13), **kwargs) -> list[Circuit]:
    rng = random.Random(seed)
    return [random_circuit(rng, primes[i % len(primes)], **kwargs) for i in range(size)]
