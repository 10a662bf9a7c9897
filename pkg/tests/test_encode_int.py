import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acirverify.encode_int import (
    IntContext,
    encode_assert_zero_int,
    encode_circuit_int,
    encode_expression_int,
    encode_memory_init_int,
    encode_memory_read_int,
    encode_memory_write_int,
    encode_range_int,
)
from acirverify.gen import random_circuit, random_expression
from acirverify.interp import Satisfied, check_assignment, eval_expression
from acirverify.ir import BrilligCall, Circuit, Expression, RangeCheck
from acirverify.smt import render
from acirverify.solver import run_backend

from conftest import GOLDEN, extend_assignment, load_fixture
from smt_eval import evaluate, holds

W = Expression.witness


def test_product_minus_one():
    e = Expression(quad=((1, 1, 2),), const=-1)
    assert render(encode_expression_int(e, IntContext(17))) == "(mod (+ (* 1 w1 w2) 16) 17)"


def test_constant_only():
    assert render(encode_expression_int(Expression.constant(5), IntContext(17))) == "(mod 5 17)"


def test_single_outer_mod():
    e = Expression(quad=((2, 0, 1), (3, 1, 1)), lin=((4, 0),), const=6)
    assert render(encode_expression_int(e, IntContext(7))).count("mod") == 1


def test_linear_only_at_7():
    e = Expression(lin=((2, 0), (3, 1)))
    term = encode_expression_int(e, IntContext(7))
    assert render(term) == "(mod (+ (* 2 w0) (* 3 w1)) 7)"
    for x, y in itertools.product(range(7), repeat=2):
        assert evaluate(term, {"w0": x, "w1": y}, 7) == eval_expression(e, {0: x, 1: y}, 7)


@given(st.integers(0, 2**32))
def test_expression_semantics(seed):
    rng = random.Random(seed)
    e = random_expression(rng, 13, 3, max_quad=3, max_lin=3)
    a = {w: rng.randrange(13) for w in range(3)}
    term = encode_expression_int(e, IntContext(13))
    assert evaluate(term, {f"w{w}": v for w, v in a.items()}, 13) == eval_expression(e, a, 13)


def test_assert_zero_shape():
    e = Expression(quad=((1, 1, 2),), const=-1)
    assert render(encode_assert_zero_int(e, IntContext(17))) == "(= (mod (+ (* 1 w1 w2) 16) 17) 0)"


@pytest.mark.parametrize("bits, text", [(1, "(< w0 2)"), (8, "(< w0 256)")])
def test_range(bits, text):
    assert render(encode_range_int(0, bits, IntContext(97))) == text


def test_memory_cells_get_domains():
    ctx = IntContext(7)
    decls, asserts, mi = encode_memory_init_int(0, (0, 1), ctx, {})
    assert [d for d, _ in decls] == ["m_0_0_0", "m_0_1_0"]
    assert [render(a) for a in asserts] == [
        "(and (<= 0 m_0_0_0) (< m_0_0_0 7))",
        "(and (<= 0 m_0_1_0) (< m_0_1_0 7))",
        "(= m_0_0_0 w0)",
        "(= m_0_1_0 w1)",
    ]
    reads = encode_memory_read_int(0, W(2), W(3), ctx, mi)
    assert render(reads[1]) == "(=> (= (mod (* 1 w2) 7) 1) (= m_0_1_0 (mod (* 1 w3) 7)))"
    decls, asserts, mi = encode_memory_write_int(0, W(2), W(3), ctx, mi)
    assert len(decls) == 2
    assert len(asserts) == 2 + 4
    assert mi == {0: 1}


def test_bool_check_circuit():
    script = encode_circuit_int(load_fixture("bool_check"))
    assert script.declarations == [("w0", "Int")]
    assert len(script.assertions) == 2
    assert script.vc_markers == [1]


def test_brillig_only_circuit_has_domains_only():
    c = Circuit(7, 2, (BrilligCall("hint", (W(0),), (1,)),))
    assert [render(a) for a in encode_circuit_int(c).assertions] == [
        "(and (<= 0 w0) (< w0 7))",
        "(and (<= 0 w1) (< w1 7))",
    ]


@pytest.mark.parametrize("x, sat", [(15, True), (16, False)])
def test_range_4_boundary_at_97(backends, x, sat):
    c = Circuit(97, 1, (RangeCheck(0, 4),))
    script = encode_circuit_int(c)
    script.assertions.append(("=", "w0", str(x)))
    assert run_backend(script, backends["int"]).kind == ("sat" if sat else "unsat")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([7, 13]))
def test_satisfying_assignments_extend_to_models(seed, p):
    c = random_circuit(random.Random(seed), p)
    script = encode_circuit_int(c)
    rng = random.Random(seed)
    for _ in range(20):
        a = {w: rng.randrange(p) for w in range(c.num_witnesses)}
        ok = check_assignment(c, a, out_of_range="vacuous") == Satisfied()
        assert holds(script, extend_assignment(c, a)) == ok


def test_bool_check_golden():
    assert encode_circuit_int(load_fixture("bool_check")).to_smtlib() == (GOLDEN / "bool_check.int.smt2").read_text()
