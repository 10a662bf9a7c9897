"""ACIR-style circuit data model, textual format and structural validation.

A circuit is a list of opcodes over witnesses ``w0 .. w{N-1}`` living in the
prime field of order ``modulus``.  The textual format is line oriented::

    # comments run to end of line
    circuit modulus=17 witnesses=2
    public 0
    name 0 x
    assert_zero q=-1 lin=[] quad=[(1,0,1)]
    range w=0 bits=4
    mem_init block=0 [0,1]
    mem_op block=0 kind=read index={q=0 lin=[(1,1)] quad=[]} value={q=0 lin=[(1,1)] quad=[]}
    brillig fn=verify_assert inputs=[{q=1 lin=[] quad=[]}] outputs=[] label="always"

Integers may be negative; they are reduced modulo the prime on load.  Memory
indices are 0-based.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

BN254 = 21888242871839275222246405745257275088548364400416034343698204186575808495617

NAMED_PRIMES = {"bn254": BN254}

MAX_WITNESS_INDEX = 2**32 - 1

VERIFY_ASSERT = "verify_assert"


class CircuitError(ValueError):
    """A document parsed but its circuit violates a structural invariant."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


def is_probable_prime(n: int, rounds: int = 64, seed: int = 0) -> bool:
    """Miller-Rabin with a fixed seed, so verdicts are reproducible."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(seed)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, order=True)
class FieldElement:
    """A residue in ``[0, modulus)``; construction reduces any integer."""

    value: int
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self):
        return self.value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("field elements from different fields")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)


@dataclass(frozen=True)
class Expression:
    """``sum(r*a*b for r,a,b in quad) + sum(s*c for s,c in lin) + const``.

    Coefficients are plain integers; `Circuit` reduces them to canonical
    residues, so expressions held by a circuit are always in ``[0, p)``.
    """

    quad: tuple[tuple[int, int, int], ...] = ()
    lin: tuple[tuple[int, int], ...] = ()
    const: int = 0

    def __post_init__(self):
        object.__setattr__(self, "quad", tuple(tuple(t) for t in self.quad))
        object.__setattr__(self, "lin", tuple(tuple(t) for t in self.lin))

    @classmethod
    def witness(cls, index: int) -> Expression:
        return cls(lin=((1, index),))

    @classmethod
    def constant(cls, value: int) -> Expression:
        return cls(const=value)

    def reduced(self, p: int) -> Expression:
        return Expression(
            tuple((r % p, a, b) for r, a, b in self.quad),
            tuple((s % p, c) for s, c in self.lin),
            self.const % p,
        )

    def witnesses(self) -> Iterator[int]:
        for _, a, b in self.quad:
            yield a
            yield b
        for _, c in self.lin:
            yield c

    def as_witness(self) -> int | None:
        """The witness index if this is exactly ``1*w``, else None."""
        if not self.quad and self.const == 0 and len(self.lin) == 1 and self.lin[0][0] == 1:
            return self.lin[0][1]
        return None


@dataclass(frozen=True)
class AssertZero:
    expr: Expression


@dataclass(frozen=True)
class RangeCheck:
    witness: int
    bits: int


@dataclass(frozen=True)
class MemoryInit:
    block_id: int
    witnesses: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))


@dataclass(frozen=True)
class MemoryOp:
    block_id: int
    kind: str  # "read" | "write"
    index: Expression
    value: Expression

    @property
    def is_write(self) -> bool:
        return self.kind == "write"


@dataclass(frozen=True)
class BrilligCall:
    function: str
    inputs: tuple[Expression, ...] = ()
    outputs: tuple[int, ...] = ()
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


Opcode = Union[AssertZero, RangeCheck, MemoryInit, MemoryOp, BrilligCall]


def _reduce_opcode(op: Opcode, p: int) -> Opcode:
    if isinstance(op, AssertZero):
        return AssertZero(op.expr.reduced(p))
    if isinstance(op, MemoryOp):
        return MemoryOp(op.block_id, op.kind, op.index.reduced(p), op.value.reduced(p))
    if isinstance(op, BrilligCall):
        return BrilligCall(op.function, tuple(e.reduced(p) for e in op.inputs), op.outputs, op.label)
    return op


@dataclass(frozen=True)
class Circuit:
    modulus: int
    num_witnesses: int
    opcodes: tuple[Opcode, ...] = ()
    public_inputs: frozenset[int] = field(default_factory=frozenset)
    # reporting metadata: (witness index, source name), sorted by index
    witness_names: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        p = self.modulus
        object.__setattr__(self, "opcodes", tuple(_reduce_opcode(op, p) for op in self.opcodes))
        object.__setattr__(self, "public_inputs", frozenset(self.public_inputs))
        names = dict(self.witness_names) if not isinstance(self.witness_names, dict) else self.witness_names
        object.__setattr__(self, "witness_names", tuple(sorted(names.items())))

    def name_of(self, w: int) -> str:
        return dict(self.witness_names).get(w, f"w{w}")

    @property
    def modulus_name(self) -> str | None:
        for name, value in NAMED_PRIMES.items():
            if value == self.modulus:
                return name
        return None

    def stats(self) -> dict[str, int]:
        """Benchmark-table counts: opcodes exclude brillig calls."""
        ranges = [op.bits for op in self.opcodes if isinstance(op, RangeCheck)]
        return {
            "witnesses": self.num_witnesses,
            "opcodes": sum(not isinstance(op, BrilligCall) for op in self.opcodes),
            "range_checks": len(ranges),
            "max_range_bits": max(ranges, default=0),
        }


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Diagnostic:
    opcode_index: int | None
    message: str

    def __str__(self):
        where = "circuit" if self.opcode_index is None else f"opcode {self.opcode_index}"
        return f"{where}: {self.message}"


def validate(c: Circuit) -> list[Diagnostic]:
    """Return one diagnostic per violated invariant; empty means valid."""
    diags: list[Diagnostic] = []

    def bad(i, msg):
        diags.append(Diagnostic(i, msg))

    p = c.modulus
    if c.modulus_name is None and not is_probable_prime(p):
        bad(None, f"modulus {p} is not prime")
    if c.num_witnesses < 0:
        bad(None, "witness count must be nonnegative")
    if c.num_witnesses > MAX_WITNESS_INDEX + 1:
        bad(None, "witness count exceeds the 32-bit index range")
    for w in sorted(c.public_inputs):
        if not 0 <= w < c.num_witnesses:
            bad(None, f"public input w{w} out of range")
    for w, _ in c.witness_names:
        if not 0 <= w < c.num_witnesses:
            bad(None, f"named witness w{w} out of range")

    def check_witness(i, w):
        if not 0 <= w < c.num_witnesses:
            bad(i, f"witness w{w} out of range (circuit has {c.num_witnesses})")

    def check_expr(i, e):
        for w in e.witnesses():
            check_witness(i, w)

    block_sizes: dict[int, int] = {}
    for i, op in enumerate(c.opcodes):
        if isinstance(op, AssertZero):
            check_expr(i, op.expr)
        elif isinstance(op, RangeCheck):
            check_witness(i, op.witness)
            if op.bits < 1:
                bad(i, "bits must be ≥ 1")
            elif op.bits >= p.bit_length():
                bad(i, f"bits must be < {p.bit_length()} (bit length of the modulus)")
        elif isinstance(op, MemoryInit):
            if op.block_id < 0:
                bad(i, "block id must be nonnegative")
            if op.block_id in block_sizes:
                bad(i, f"block {op.block_id} initialized twice")
            if len(op.witnesses) > p:
                bad(i, f"block {op.block_id} longer than the modulus")
            for w in op.witnesses:
                check_witness(i, w)
            block_sizes.setdefault(op.block_id, len(op.witnesses))
        elif isinstance(op, MemoryOp):
            if op.kind not in ("read", "write"):
                bad(i, f"unknown memory op kind {op.kind!r}")
            if op.block_id not in block_sizes:
                bad(i, f"uninitialized block {op.block_id}")
            check_expr(i, op.index)
            check_expr(i, op.value)
            if op.kind == "read" and op.value.as_witness() is None:
                bad(i, "read value must be a single witness")
        elif isinstance(op, BrilligCall):
            for e in op.inputs:
                check_expr(i, e)
            for w in op.outputs:
                check_witness(i, w)
        else:
            bad(i, f"unknown opcode {type(op).__name__}")
    return diags


# ------------------------------------------------------------- serialization


def _fmt_expr(e: Expression) -> str:
    lin = ",".join(f"({s},{c})" for s, c in e.lin)
    quad = ",".join(f"({r},{a},{b})" for r, a, b in e.quad)
    return f"q={e.const} lin=[{lin}] quad=[{quad}]"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_circuit(c: Circuit) -> str:
    name = c.modulus_name or str(c.modulus)
    lines = [f"circuit modulus={name} witnesses={c.num_witnesses}"]
    if c.public_inputs:
        lines.append("public " + " ".join(str(w) for w in sorted(c.public_inputs)))
    for w, name in c.witness_names:
        lines.append(f"name {w} {name}")
    for op in c.opcodes:
        if isinstance(op, AssertZero):
            lines.append("assert_zero " + _fmt_expr(op.expr))
        elif isinstance(op, RangeCheck):
            lines.append(f"range w={op.witness} bits={op.bits}")
        elif isinstance(op, MemoryInit):
            lines.append(f"mem_init block={op.block_id} [{','.join(map(str, op.witnesses))}]")
        elif isinstance(op, MemoryOp):
            lines.append(
                f"mem_op block={op.block_id} kind={op.kind} "
                f"index={{{_fmt_expr(op.index)}}} value={{{_fmt_expr(op.value)}}}"
            )
        elif isinstance(op, BrilligCall):
            inputs = ",".join("{" + _fmt_expr(e) + "}" for e in op.inputs)
            line = f"brillig fn={op.function} inputs=[{inputs}] outputs=[{','.join(map(str, op.outputs))}]"
            if op.label is not None:
                line += " label=" + _quote(op.label)
            lines.append(line)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#.*)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_:.\-]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[=\[\](){},])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


class _Line:
    """Cursor over the tokens of one document line."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[_Tok] = []
        self.pos = 0
        i = 0
        while i < len(text):
            m = _TOKEN.match(text, i)
            if m is None:
                raise ParseError(f"unexpected character {text[i]!r}", lineno, i + 1)
            kind = m.lastgroup
            if kind == "comment":
                break
            if kind != "ws":
                self.toks.append(_Tok(kind, m.group(), i + 1))
            i = m.end()
        self.end_col = len(text) + 1

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        col = tok.col if tok else (self.peek().col if self.peek() else self.end_col)
        return ParseError(msg, self.lineno, col)

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self, what: str = "token") -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self.error(f"expected {what}, found end of line")
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next(repr(text))
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def done(self):
        tok = self.peek()
        if tok is not None:
            raise self.error(f"unexpected {tok.text!r}", tok)

    def integer(self) -> int:
        tok = self.next("integer")
        if tok.kind != "int":
            raise self.error(f"expected integer, found {tok.text!r}", tok)
        return int(tok.text)

    def ident(self) -> str:
        tok = self.next("name")
        if tok.kind != "ident":
            raise self.error(f"expected name, found {tok.text!r}", tok)
        return tok.text

    def seq(self, open_: str, close: str, item):
        self.expect(open_)
        out = []
        if self.at(close):
            self.next()
            return out
        while True:
            out.append(item())
            tok = self.next(f"',' or {close!r}")
            if tok.text == close:
                return out
            if tok.text != ",":
                raise self.error(f"expected ',' or {close!r}, found {tok.text!r}", tok)

    def tuple_of(self, n: int) -> tuple[int, ...]:
        vals = self.seq("(", ")", self.integer)
        if len(vals) != n:
            raise self.error(f"expected a {n}-tuple")
        return tuple(vals)

    def keywords(self, parsers: dict, required: tuple[str, ...]) -> dict:
        out = {}
        while self.peek() is not None:
            tok = self.next()
            if tok.kind != "ident" or tok.text not in parsers:
                raise self.error(f"unexpected {tok.text!r}", tok)
            if tok.text in out:
                raise self.error(f"duplicate field {tok.text!r}", tok)
            self.expect("=")
            out[tok.text] = parsers[tok.text](self)
        missing = [k for k in required if k not in out]
        if missing:
            raise self.error(f"missing field {missing[0]!r}")
        return out


def _expr_fields(ln: _Line) -> Expression:
    kw = ln.keywords(
        {
            "q": _Line.integer,
            "lin": lambda l: l.seq("[", "]", lambda: l.tuple_of(2)),
            "quad": lambda l: l.seq("[", "]", lambda: l.tuple_of(3)),
        },
        (),
    )
    return Expression(tuple(kw.get("quad", ())), tuple(kw.get("lin", ())), kw.get("q", 0))


def _braced_expr(ln: _Line) -> Expression:
    """``{q=.. lin=[..] quad=[..]}``; omitted fields are zero or empty."""
    ln.expect("{")
    start = ln.pos
    depth = 0
    while True:
        tok = ln.next("'}'")
        if tok.text in "([":
            depth += 1
        elif tok.text in ")]":
            depth -= 1
        elif tok.text == "}" and depth == 0:
            break
    inner = _Line("", ln.lineno)
    inner.toks = ln.toks[start : ln.pos - 1]
    inner.end_col = ln.toks[ln.pos - 1].col
    return _expr_fields(inner)


def _modulus(ln: _Line) -> int:
    tok = ln.next("modulus")
    if tok.kind == "int":
        return int(tok.text)
    if tok.kind == "ident" and tok.text in NAMED_PRIMES:
        return NAMED_PRIMES[tok.text]
    raise ln.error(f"unknown modulus {tok.text!r}", tok)


def _string(ln: _Line) -> str:
    tok = ln.next("string")
    if tok.kind != "string":
        raise ln.error("expected quoted string", tok)
    return re.sub(r"\\(.)", r"\1", tok.text[1:-1])


def parse_circuit(text: str, check: bool = True) -> Circuit:
    """Parse a textual circuit document.

    With ``check`` (the default) the result is validated and a
    `CircuitError` names every offending opcode.
    """
    header = None
    public: list[int] = []
    names: dict[int, str] = {}
    opcodes: list[Opcode] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        ln = _Line(raw, lineno)
        if not ln.toks:
            continue
        head = ln.next()
        kw = head.text
        if header is None:
            if kw != "circuit":
                raise ln.error("document must start with a 'circuit' header", head)
            header = ln.keywords({"modulus": _modulus, "witnesses": _Line.integer}, ("modulus", "witnesses"))
            continue
        if kw == "circuit":
            raise ln.error("duplicate 'circuit' header", head)
        if kw == "public":
            while ln.peek() is not None:
                public.append(ln.integer())
        elif kw == "name":
            tok = ln.peek()
            w = ln.integer()
            if w in names:
                raise ln.error(f"witness {w} named twice", tok)
            names[w] = ln.ident()
            ln.done()
        elif kw == "assert_zero":
            opcodes.append(AssertZero(_expr_fields(ln)))
        elif kw == "range":
            f = ln.keywords({"w": _Line.integer, "bits": _Line.integer}, ("w", "bits"))
            opcodes.append(RangeCheck(f["w"], f["bits"]))
        elif kw == "mem_init":
            ln.expect("block")
            ln.expect("=")
            block = ln.integer()
            ws = ln.seq("[", "]", ln.integer)
            ln.done()
            opcodes.append(MemoryInit(block, tuple(ws)))
        elif kw == "mem_op":
            f = ln.keywords(
                {"block": _Line.integer, "kind": _Line.ident, "index": _braced_expr, "value": _braced_expr},
                ("block", "kind", "index", "value"),
            )
            if f["kind"] not in ("read", "write"):
                raise ParseError(f"kind must be read or write, not {f['kind']!r}", lineno, head.col)
            opcodes.append(MemoryOp(f["block"], f["kind"], f["index"], f["value"]))
        elif kw == "brillig":
            f = ln.keywords(
                {
                    "fn": _Line.ident,
                    "inputs": lambda l: l.seq("[", "]", lambda: _braced_expr(l)),
                    "outputs": lambda l: l.seq("[", "]", l.integer),
                    "label": _string,
                },
                ("fn",),
            )
            opcodes.append(
                BrilligCall(f["fn"], tuple(f.get("inputs", ())), tuple(f.get("outputs", ())), f.get("label"))
            )
        else:
            raise ln.error(f"unknown opcode {kw!r}", head)
    if header is None:
        raise ParseError("empty document: missing 'circuit' header", 1, 1)
    p = header["modulus"]
    if p < 2:
        raise ParseError(f"modulus must be at least 2, got {p}", 1, 1)
    c = Circuit(p, header["witnesses"], tuple(opcodes), frozenset(public), tuple(names.items()))
    if check:
        diags = validate(c)
        if diags:
            raise CircuitError(diags)
    return c
