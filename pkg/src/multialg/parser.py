"""Parser for terms, formulas and source files.

Term syntax: ``0 1``, numerals and element names as constants, ``x0 x1 ...``
and other identifiers as variables, ``- + *`` with the usual precedence,
``^`` for repeated products, parentheses.  Formula syntax is what
:func:`multialg.core.format_formula` prints: atoms ``t1 sub t2``, sugar
``t1 =s t2`` and ``0 in t``, polynomial constraints ``mem(t)`` and
``nmem(t)``, connectives ``! & | -> <->``, ``true``, ``false`` and
quantifiers ``exists x. phi`` / ``forall x. phi`` whose body extends as far
right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from multialg.core import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    add,
    mul,
    neg,
    strong_eq,
    sub,
)
from multialg.qe import PolyConstraint, to_formal
from multialg.structures import FiniteMultiring, FormatError, parse_structure_block


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|=s|[()!&|+*^.-])|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*))"
)
_KEYWORDS = {"sub", "in", "exists", "forall", "true", "false", "mem", "nmem"}
_XVAR = re.compile(r"^x(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str  # op, num, name, end
    text: str
    pos: int


def tokenize(text: str, line: int = 1, offset: int = 0) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col + offset)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


@dataclass
class ParsedFormula:
    formula: Formula
    names: dict[int, str] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str, constants: Iterable[str] = (), line: int = 1, offset: int = 0):
        self.text = text
        self.line = line
        self.offset = offset
        self.tokens = tokenize(text, line, offset)
        self.i = 0
        self.constants = set(constants)
        used = {int(m.group(1)) for m in re.finditer(r"\bx(\d+)\b", text)}
        self.next_var = max(used, default=-1) + 1
        self.var_of: dict[str, int] = {}

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, self.line, tok.pos + 1 + self.offset)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    # -- variables ------------------------------------------------------------

    def variable(self, name: str) -> int:
        m = _XVAR.match(name)
        if m:
            return int(m.group(1))
        if name not in self.var_of:
            self.var_of[name] = self.next_var
            self.next_var += 1
        return self.var_of[name]

    def names(self) -> dict[int, str]:
        return {i: n for n, i in self.var_of.items()}

    # -- terms ----------------------------------------------------------------

    def term(self):
        t = self.product()
        while True:
            if self.accept("+"):
                t = add(t, self.product())
            elif self.accept("-"):
                t = sub(t, self.product())
            else:
                return t

    def product(self):
        t = self.power()
        while self.accept("*"):
            t = mul(t, self.power())
        return t

    def power(self):
        t = self.unary()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "num" or int(tok.text) < 1:
                self.error("expected a positive exponent")
            self.i += 1
            base = t
            for _ in range(int(tok.text) - 1):
                t = mul(t, base)
        return t

    def unary(self):
        if self.accept("-"):
            return neg(self.unary())
        tok = self.tok
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "num":
            self.i += 1
            return Const(tok.text)
        if tok.kind == "name" and tok.text not in _KEYWORDS:
            self.i += 1
            if tok.text in self.constants and not _XVAR.match(tok.text):
                return Const(tok.text)
            return Var(self.variable(tok.text))
        self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    # -- formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        left = self.implication()
        if self.accept("<->"):
            return Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.negation()]
        while self.accept("&"):
            parts.append(self.negation())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def negation(self) -> Formula:
        if self.accept("!"):
            return Not(self.negation())
        tok = self.tok
        if tok.kind == "name" and tok.text in ("exists", "forall"):
            self.i += 1
            v = self.tok
            if v.kind != "name" or v.text in _KEYWORDS:
                self.error("expected a variable after quantifier")
            self.i += 1
            index = self.variable(v.text)
            self.expect(".")
            body = self.formula()
            return (Exists if tok.text == "exists" else Forall)(index, body)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if tok.kind == "name" and tok.text in ("mem", "nmem"):
            self.i += 1
            self.expect("(")
            t = self.term()
            self.expect(")")
            return PolyConstraint(tok.text == "mem", to_formal(t))
        if tok.kind == "op" and tok.text == "(":
            # An atom may itself start with a parenthesized term.
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.i += 1
            phi = self.formula()
            self.expect(")")
            return phi
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        if self.accept("sub") or self.accept("in"):
            return Atom(lhs, self.term())
        if self.accept("=s"):
            return strong_eq(lhs, self.term())
        self.error(f"expected 'sub', 'in' or '=s', found {self.tok.text or 'end of input'!r}")

    def finish(self):
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")


def parse_term(text: str, constants: Iterable[str] = ()):
    p = _Parser(text, constants)
    t = p.term()
    p.finish()
    return t


def parse_formula(text: str, constants: Iterable[str] = (), line: int = 1, offset: int = 0) -> ParsedFormula:
    """Parse a formula; ``constants`` lists identifiers that name elements
    of the base structure rather than variables."""
    p = _Parser(text, constants, line, offset)
    phi = p.formula()
    p.finish()
    return ParsedFormula(phi, p.names())


# ---------------------------------------------------------------------------
# Source files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Binding:
    name: str
    text: str
    line: int
    column: int


@dataclass
class SourceFile:
    """Structures, polynomials and formulas defined in one file.

    Polynomials and formulas are kept as text and parsed against whichever
    structure a command names, since their constants depend on it.
    """

    structures: dict[str, FiniteMultiring] = field(default_factory=dict)
    polys: dict[str, Binding] = field(default_factory=dict)
    formulas: dict[str, Binding] = field(default_factory=dict)


_BINDING = re.compile(r"^(poly|formula)\s+([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(.*)$")


def parse(text: str) -> SourceFile:
    """Parse a source file.

    A ``structure`` line opens a table block that runs until the next
    ``structure``, ``poly`` or ``formula`` line; ``poly <name> = <text>`` and
    ``formula <name> = <text>`` bind one-line definitions.  ``#`` starts a
    comment.
    """
    src = SourceFile()
    block: list[tuple[int, str]] = []
    names: set[str] = set()

    def close():
        if block:
            try:
                R = parse_structure_block(block)
            except FormatError as exc:
                raise ParseError(str(exc).split(": ", 1)[-1], exc.line or block[0][0], exc.column or 1) from None
            claim(R.name, block[0][0])
            src.structures[R.name] = R
            block.clear()

    def claim(name: str, line: int):
        if name in names:
            raise ParseError(f"duplicate name {name!r}", line, 1)
        names.add(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        first = stripped.split()[0]
        if first == "structure":
            close()
            block.append((lineno, stripped))
        elif first in ("poly", "formula"):
            close()
            m = _BINDING.match(stripped)
            if not m:
                raise ParseError(f"expected '{first} <name> = <definition>'", lineno, 1)
            kind, name, body = m.groups()
            claim(name, lineno)
            col = len(raw) - len(raw.lstrip()) + m.start(3) + 1
            b = Binding(name, body.strip(), lineno, col)
            (src.polys if kind == "poly" else src.formulas)[name] = b
        elif block:
            block.append((lineno, stripped))
        else:
            raise ParseError(f"unexpected {first!r} outside a structure block", lineno, 1)
    close()
    return src


def formula_of(binding: Binding, constants: Iterable[str] = ()) -> ParsedFormula:
    return parse_formula(binding.text, constants, binding.line, binding.column - 1)
