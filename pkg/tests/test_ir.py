import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acirverify.gen import random_circuit
from acirverify.ir import (
    BN254,
    AssertZero,
    BrilligCall,
    Circuit,
    CircuitError,
    Expression,
    FieldElement,
    MemoryInit,
    MemoryOp,
    ParseError,
    RangeCheck,
    is_probable_prime,
    parse_circuit,
    serialize_circuit,
    validate,
)

from conftest import FIXTURES, load_fixture


def test_parse_minimal_document():
    c = parse_circuit("circuit modulus=17 witnesses=2\nassert_zero q=-1 quad=[(1,0,1)]\n")
    assert c.modulus == 17
    assert c.num_witnesses == 2
    assert len(c.opcodes) == 1
    assert c.opcodes[0] == AssertZero(Expression(quad=((1, 0, 1),), const=16))


def test_memory_op_before_init_is_rejected():
    text = "circuit modulus=7 witnesses=2\nmem_op block=0 kind=read index={q=0} value={lin=[(1,1)]}\n"
    with pytest.raises(CircuitError, match="uninitialized block") as info:
        parse_circuit(text)
    assert info.value.diagnostics[0].opcode_index == 0


def test_bool_check_parses_to_two_opcodes():
    c = load_fixture("bool_check")
    assert c.modulus == BN254
    assert [type(op) for op in c.opcodes] == [AssertZero, BrilligCall]
    assert validate(c) == []


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_circuit("circuit modulus=7 witnesses=1\nrange w=0 bits=\n")
    assert info.value.line == 2
    assert info.value.column > 1


@pytest.mark.parametrize(
    "text, needle",
    [
        ("circuit modulus=7 witnesses=1\nassert_zero lin=[(1,3)]\n", "witness"),
        ("circuit modulus=8 witnesses=1\n", "prime"),
        ("circuit modulus=7 witnesses=1\nmem_init block=0 [0]\nmem_init block=0 [0]\n", "block"),
        ("circuit modulus=7 witnesses=1\nbogus\n", "bogus"),
    ],
)
def test_bad_documents(text, needle):
    with pytest.raises(ValueError, match=needle):
        parse_circuit(text)


def test_empty_circuit_serializes_to_header():
    assert serialize_circuit(Circuit(7, 0, ())) == "circuit modulus=7 witnesses=0\n"
    assert serialize_circuit(Circuit(BN254, 3, ())) == "circuit modulus=bn254 witnesses=3\n"


def test_bool_check_round_trip_is_identical():
    doc = serialize_circuit(load_fixture("bool_check"))
    assert serialize_circuit(parse_circuit(doc)) == doc
    assert parse_circuit(doc) == load_fixture("bool_check")


def test_canonical_form_is_pinned():
    c = parse_circuit((FIXTURES / "mem_two_gen.acir").read_text())
    assert serialize_circuit(c).splitlines()[:7] == [
        "circuit modulus=7 witnesses=4",
        "name 0 a",
        "name 1 u",
        "name 2 v",
        "name 3 r",
        "mem_init block=0 [0]",
        "mem_op block=0 kind=write index={q=0 lin=[] quad=[]} value={q=0 lin=[(1,1)] quad=[]}",
    ]


def test_286_opcode_round_trip():
    c = random_circuit(random.Random(286), BN254, num_opcodes=286, num_witnesses=40, max_block=6)
    assert len(c.opcodes) == 286
    assert validate(c) == []
    doc = serialize_circuit(c)
    back = parse_circuit(doc)
    assert back == c
    assert serialize_circuit(back) == doc


@given(st.integers(0, 2**32), st.sampled_from([7, 13, 97]))
def test_generated_circuits_round_trip(seed, p):
    c = random_circuit(random.Random(seed), p, max_witnesses=4, max_opcodes=8)
    assert validate(c) == []
    assert parse_circuit(serialize_circuit(c)) == c


def test_labels_survive_quoting():
    c = Circuit(7, 1, (BrilligCall("verify_assert", (Expression.constant(1),), (), 'a "b" \\ c'),))
    assert parse_circuit(serialize_circuit(c)).opcodes[0].label == 'a "b" \\ c'


def test_validate_range_bits():
    diags = validate(Circuit(7, 1, (RangeCheck(0, 0),)))
    assert len(diags) == 1
    assert diags[0].opcode_index == 0
    assert "bits must be ≥ 1" in diags[0].message
    assert validate(Circuit(7, 1, (RangeCheck(0, 3),)))
    assert validate(Circuit(7, 1, (RangeCheck(0, 2),))) == []


def test_validate_uninitialized_block():
    op = MemoryOp(5, "read", Expression.constant(0), Expression.witness(0))
    diags = validate(Circuit(7, 1, (op,)))
    assert [d.opcode_index for d in diags] == [0]


def test_validate_reports_each_violation():
    c = Circuit(7, 2, (RangeCheck(0, 0), AssertZero(Expression.witness(5)), MemoryInit(0, (2,))))
    assert [d.opcode_index for d in validate(c)] == [0, 1, 2]


def test_read_value_must_be_a_witness():
    c = Circuit(7, 1, (MemoryInit(0, (0,)), MemoryOp(0, "read", Expression.constant(0), Expression.constant(3))))
    assert [d.opcode_index for d in validate(c)] == [1]


def test_block_longer_than_modulus_rejected():
    assert validate(Circuit(3, 1, (MemoryInit(0, (0, 0, 0, 0)),)))


@given(st.integers(-(10**40), 10**40), st.sampled_from([2, 7, 13, 97, BN254]))
def test_field_reduction(k, p):
    assert FieldElement(k, p) == FieldElement(k + p, p)
    assert 0 <= FieldElement(k, p).value < p


def test_field_arithmetic():
    a, b = FieldElement(3, 17), FieldElement(6, 17)
    assert (a * b - FieldElement(1, 17)).value == 0
    assert (-a).value == 14


def test_primality():
    assert is_probable_prime(BN254)
    assert [n for n in range(30) if is_probable_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_probable_prime(561)
    assert not is_probable_prime(BN254 * 3)


def test_stats():
    assert load_fixture("range32").stats() == {"witnesses": 7, "opcodes": 7, "range_checks": 1, "max_range_bits": 32}
