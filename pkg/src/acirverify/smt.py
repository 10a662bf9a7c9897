"""SMT-LIB2 term trees, scripts and an s-expression reader.

Terms are nested tuples of strings: ``("ff.add", "w0", ("as", "ff1", "F"))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Term = Union[str, tuple["Term", ...]]


def render(t: Term) -> str:
    if isinstance(t, str):
        return t
    return "(" + " ".join(render(x) for x in t) + ")"


@dataclass
class SmtScript:
    logic: str
    declarations: list[tuple[str, Term]] = field(default_factory=list)
    assertions: list[Term] = field(default_factory=list)
    goal_symbols: list[str] = field(default_factory=list)
    sort_definitions: list[tuple[str, Term]] = field(default_factory=list)
    # opcode indices of verify_assert calls seen while encoding
    vc_markers: list[int] = field(default_factory=list)
    modulus: int | None = None

    def declare(self, name: str, sort: Term):
        self.declarations.append((name, sort))

    def check(self):
        """Raise ValueError unless every symbol is declared exactly once."""
        seen = set()
        for name, _ in self.declarations:
            if name in seen:
                raise ValueError(f"symbol {name} declared twice")
            seen.add(name)
        for g in self.goal_symbols:
            if g not in seen:
                raise ValueError(f"goal symbol {g} not declared")

    def to_smtlib(self, get_model: bool = True) -> str:
        out = ["(set-option :produce-models true)", f"(set-logic {self.logic})"]
        for name, body in self.sort_definitions:
            out.append(f"(define-sort {name} () {render(body)})")
        for name, sort in self.declarations:
            out.append(f"(declare-const {name} {render(sort)})")
        for a in self.assertions:
            out.append(f"(assert {render(a)})")
        out.append("(check-sat)")
        if get_model and self.goal_symbols:
            out.append(f"(get-value ({' '.join(self.goal_symbols)}))")
        return "\n".join(out) + "\n"


class SExprError(ValueError):
    pass


def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            if j >= n:
                raise SExprError("unterminated string literal")
            yield text[i : j + 1]
            i = j + 1
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SExprError("unterminated quoted symbol")
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str) -> list[Term]:
    """Parse every top-level s-expression in ``text``."""
    stack: list[list] = [[]]
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SExprError("unbalanced ')'")
            done = tuple(stack.pop())
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SExprError("unbalanced '('")
    return stack[0]
