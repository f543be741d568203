"""Finite multirings, hyperfields and superrings given by explicit tables.

Carrier elements are the integers ``0..n-1``; ``names`` holds the display
name of each one (``"-1"`` in the signs hyperfield, say).  Every table cell
is a bit mask (see :mod:`multialg.bitset`), so strict operations simply have
singleton cells.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from multialg import bitset


class StructureError(ValueError):
    """A table is malformed or a construction precondition fails."""


@dataclass(frozen=True, eq=False)
class Multigroup:
    """A finite multigroup ``(G, op, inv, unit)`` with set-valued ``op``."""

    name: str
    names: tuple[str, ...]
    unit: int
    inv: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.names)

    def op(self, a: int, b: int) -> int:
        return self.table[a][b]

    def op_sets(self, A: int, B: int) -> int:
        out = 0
        for a in bitset.elements(A):
            row = self.table[a]
            for b in bitset.elements(B):
                out |= row[b]
        return out

    @property
    def is_strict(self) -> bool:
        return all(bitset.is_singleton(c) for row in self.table for c in row)


@dataclass(frozen=True, eq=False)
class FiniteMultiring:
    """A finite structure ``(R, +, *, -, 0, 1)`` with set-valued tables.

    ``add`` is always stored as masks.  ``mul`` too; ``strict_mul`` records
    whether every product cell is a singleton (a 1-ring) or products may be
    genuinely multivalued (a 2-ring / superring).
    """

    name: str
    names: tuple[str, ...]
    zero: int
    one: int
    neg: tuple[int, ...]
    add: tuple[tuple[int, ...], ...]
    mul: tuple[tuple[int, ...], ...]
    strict_mul: bool = True
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.names)
        if n == 0:
            raise StructureError("carrier must be nonempty")
        if n > bitset.MAX_CARRIER:
            raise StructureError(f"carrier of size {n} exceeds cap {bitset.MAX_CARRIER}")
        if len(set(self.names)) != n:
            raise StructureError("element names must be distinct")
        for label, table in (("add", self.add), ("mul", self.mul)):
            if len(table) != n or any(len(row) != n for row in table):
                raise StructureError(f"{label} table must be {n}x{n}")
            for a, row in enumerate(table):
                for b, cell in enumerate(row):
                    if cell == 0:
                        raise StructureError(f"{label} cell ({self.names[a]}, {self.names[b]}) is empty")
                    if cell >> n:
                        raise StructureError(f"{label} cell ({self.names[a]}, {self.names[b]}) leaves the carrier")
        if len(self.neg) != n or any(not 0 <= x < n for x in self.neg):
            raise StructureError("neg must map the carrier into itself")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise StructureError("zero and one must be carrier elements")
        if self.strict_mul and not all(bitset.is_singleton(c) for row in self.mul for c in row):
            raise StructureError("strict_mul is set but some product cell is not a singleton")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.names)})

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(len(self.names))

    @property
    def full_mask(self) -> int:
        return bitset.full(self.size)

    @property
    def trivial(self) -> bool:
        return self.zero == self.one

    @property
    def strict_add(self) -> bool:
        return all(bitset.is_singleton(c) for row in self.add for c in row)

    def element(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{self.name} has no element named {name!r}") from None

    def constant(self, symbol: str) -> int:
        if symbol == "0":
            return self.zero
        if symbol == "1":
            return self.one
        return self.element(symbol)

    # -- element-level operations -------------------------------------------------

    def plus(self, a: int, b: int) -> int:
        return self.add[a][b]

    def times(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def times_elem(self, a: int, b: int) -> int:
        """Product of two elements in a 1-ring, as an element."""
        return bitset.only(self.mul[a][b])

    # -- powerset extensions ------------------------------------------------------

    def sum_sets(self, A: int, B: int) -> int:
        out = 0
        for a in bitset.elements(A):
            row = self.add[a]
            for b in bitset.elements(B):
                out |= row[b]
        return out

    def prod_sets(self, A: int, B: int) -> int:
        out = 0
        for a in bitset.elements(A):
            row = self.mul[a]
            for b in bitset.elements(B):
                out |= row[b]
        return out

    def neg_set(self, A: int) -> int:
        out = 0
        for a in bitset.elements(A):
            out |= 1 << self.neg[a]
        return out

    def apply(self, symbol: str, *args: int) -> int:
        """Apply a signature symbol to carrier elements, returning a mask."""
        if not args:
            return 1 << self.constant(symbol)
        if symbol == "-" and len(args) == 1:
            return 1 << self.neg[args[0]]
        if len(args) == 2:
            if symbol == "+":
                return self.add[args[0]][args[1]]
            if symbol == "*":
                return self.mul[args[0]][args[1]]
        raise KeyError(f"unknown symbol {symbol!r} of arity {len(args)}")

    def additive(self) -> Multigroup:
        return Multigroup(self.name + "+", self.names, self.zero, self.neg, self.add)

    # -- display ------------------------------------------------------------------

    def show(self, mask: int) -> str:
        return "{" + ",".join(self.names[e] for e in bitset.elements(mask)) + "}"

    def subset_names(self, mask: int) -> list[str]:
        return [self.names[e] for e in bitset.elements(mask)]

    def mask_of(self, names: Iterable[str]) -> int:
        return bitset.from_elements(self.element(x) for x in names)

    def __repr__(self) -> str:
        return f"FiniteMultiring({self.name!r}, carrier={list(self.names)})"


def from_tables(
    name: str,
    names: Sequence[str],
    zero: int,
    one: int,
    neg: Sequence[int],
    add: Sequence[Sequence[Iterable[int]]],
    mul: Sequence[Sequence[Iterable[int] | int]],
    strict_mul: bool | None = None,
) -> FiniteMultiring:
    """Build a structure from element-list tables (product cells may be ints)."""

    def cell(c) -> int:
        return 1 << c if isinstance(c, int) else bitset.from_elements(c)

    add_t = tuple(tuple(cell(c) for c in row) for row in add)
    mul_t = tuple(tuple(cell(c) for c in row) for row in mul)
    if strict_mul is None:
        strict_mul = all(bitset.is_singleton(c) for row in mul_t for c in row)
    return FiniteMultiring(name, tuple(names), zero, one, tuple(neg), add_t, mul_t, strict_mul)


# ---------------------------------------------------------------------------
# Built-in examples
# ---------------------------------------------------------------------------


def krasner() -> FiniteMultiring:
    """Krasner's hyperfield ``K = {0, 1}`` with ``1 + 1 = {0, 1}``."""
    return from_tables(
        "K", ["0", "1"], 0, 1, [0, 1],
        add=[[[0], [1]], [[1], [0, 1]]],
        mul=[[0, 0], [0, 1]],
    )


def signs() -> FiniteMultiring:
    """The hyperfield of signs ``Q2 = {-1, 0, 1}``; ``1 + (-1)`` is everything."""
    return kaleidoscope(1, name="Q2")


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def hp(p: int) -> FiniteMultiring:
    """The multifield ``H_p``: ``a + a = H_p`` for ``a != 0``, ``a + b = {a, b}``
    for distinct nonzero ``a, b``, products mod ``p`` and ``-a = a``."""
    if not _is_prime(p):
        raise StructureError(f"H_p needs a prime p >= 2, got {p}")
    everything = list(range(p))
    add = []
    for a in range(p):
        row = []
        for b in range(p):
            if a == 0:
                row.append([b])
            elif b == 0:
                row.append([a])
            elif a == b:
                row.append(everything)
            else:
                row.append([a, b])
        add.append(row)
    mul = [[(a * b) % p for b in range(p)] for a in range(p)]
    return from_tables(f"H{p}", [str(i) for i in range(p)], 0, 1, list(range(p)), add, mul)


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def kaleidoscope(n: int, name: str | None = None) -> FiniteMultiring:
    """The ``n``-kaleidoscope on ``{-n, ..., n}``.

    Sums of nonzero, non-opposite elements keep the one of larger absolute
    value; ``a + (-a)`` is the whole interval ``{-|a|, ..., |a|}``.  Products
    are ``sgn(ab) * max(|a|, |b|)`` and hence strict.
    """
    if n < 0:
        raise StructureError("kaleidoscope needs n >= 0")
    values = list(range(-n, n + 1))
    idx = {v: i for i, v in enumerate(values)}
    add, mul = [], []
    for a in values:
        arow, mrow = [], []
        for b in values:
            if a == 0:
                s = [b]
            elif b == 0:
                s = [a]
            elif b == -a:
                s = list(range(-abs(a), abs(a) + 1))
            else:
                s = [a if abs(a) >= abs(b) else b]
            arow.append([idx[x] for x in s])
            mrow.append(idx[0] if a == 0 or b == 0 else idx[_sgn(a * b) * max(abs(a), abs(b))])
        add.append(arow)
        mul.append(mrow)
    one = idx[1] if n >= 1 else idx[0]
    return from_tables(
        name or f"X{n}", [str(v) for v in values], idx[0], one,
        [idx[-v] for v in values], add, mul,
    )


def zmod(m: int) -> FiniteMultiring:
    """The ring ``Z/m`` viewed as a strict multiring."""
    if m < 2:
        raise StructureError("zmod needs m >= 2")
    add = [[[(a + b) % m] for b in range(m)] for a in range(m)]
    mul = [[(a * b) % m for b in range(m)] for a in range(m)]
    return from_tables(f"Z{m}", [str(i) for i in range(m)], 0, 1, [(-a) % m for a in range(m)], add, mul)


_BUILTIN_RE = re.compile(r"^(?:(K|krasner)|(Q2|signs)|(?:H|hp)(\d+)|(?:X|kaleidoscope)(\d+)|(?:Z|zmod)(\d+))$")


def make_builtin(kind: str, param: int | None = None) -> FiniteMultiring:
    """Construct a built-in by kind (``krasner``, ``signs``, ``hp``,
    ``kaleidoscope``, ``zmod``) or by short name (``K``, ``Q2``, ``H3``,
    ``X2``, ``Z5``)."""
    if param is not None:
        kind = f"{kind}{param}"
    m = _BUILTIN_RE.match(kind)
    if not m:
        raise KeyError(f"unknown built-in structure {kind!r}")
    if m.group(1):
        return krasner()
    if m.group(2):
        return signs()
    if m.group(3):
        return hp(int(m.group(3)))
    if m.group(4):
        return kaleidoscope(int(m.group(4)))
    return zmod(int(m.group(5)))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def serialize(R: FiniteMultiring) -> str:
    """Canonical text form; cells are listed in index order."""
    lines = [f"structure {R.name} carrier {R.size}", "names " + " ".join(R.names)]
    lines.append(f"zero {R.names[R.zero]}")
    lines.append(f"one {R.names[R.one]}")
    for a in R.elements:
        lines.append(f"neg {R.names[a]} = {R.names[R.neg[a]]}")
    for a in R.elements:
        for b in R.elements:
            lines.append(f"add {R.names[a]} {R.names[b]} = {R.show(R.add[a][b])}")
    for a in R.elements:
        for b in R.elements:
            lines.append(f"mul {R.names[a]} {R.names[b]} = {R.show(R.mul[a][b])}")
    lines.append("strict mul" if R.strict_mul else "multi mul")
    return "\n".join(lines) + "\n"


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column


def _parse_cell(text: str, names: dict[str, int], lineno: int) -> int:
    text = text.strip()
    if text.startswith("{"):
        if not text.endswith("}"):
            raise FormatError("unterminated set", lineno)
        parts = [p.strip() for p in text[1:-1].split(",") if p.strip()]
    else:
        parts = [text]
    if not parts:
        raise FormatError("empty cell", lineno)
    try:
        return bitset.from_elements(names[p] for p in parts)
    except KeyError as exc:
        raise FormatError(f"unknown element {exc.args[0]!r}", lineno) from None


def parse_structure_block(lines: Sequence[tuple[int, str]]) -> FiniteMultiring:
    """Parse one ``structure`` block given as ``(line number, text)`` pairs."""
    if not lines:
        raise FormatError("empty structure block")
    lineno, header = lines[0]
    m = re.match(r"^structure\s+(\S+)\s+carrier\s+(\d+)\s*$", header)
    if not m:
        raise FormatError("expected 'structure <name> carrier <n>'", lineno, 1)
    sname, n = m.group(1), int(m.group(2))
    names = [str(i) for i in range(n)]
    body = list(lines[1:])
    if body and body[0][1].split()[0] == "names":
        lineno, text = body.pop(0)
        names = text.split()[1:]
        if len(names) != n:
            raise FormatError(f"expected {n} names, got {len(names)}", lineno)
    index = {x: i for i, x in enumerate(names)}
    if len(index) != n:
        raise FormatError("duplicate element names", lineno)
    zero = one = None
    neg: dict[int, int] = {}
    add: dict[tuple[int, int], int] = {}
    mul: dict[tuple[int, int], int] = {}
    strict = {"add": None, "mul": None}
    for lineno, text in body:
        words = text.split()
        key = words[0]
        try:
            if key in ("zero", "one"):
                if len(words) != 2:
                    raise FormatError(f"expected '{key} <element>'", lineno)
                value = index[words[1]]
                if key == "zero":
                    zero = value
                else:
                    one = value
            elif key == "neg":
                lhs, _, rhs = text[3:].partition("=")
                if not _:
                    raise FormatError("expected 'neg a = b'", lineno)
                neg[index[lhs.strip()]] = index[rhs.strip()]
            elif key in ("add", "mul"):
                lhs, eq, rhs = text[3:].partition("=")
                args = lhs.split()
                if not eq or len(args) != 2:
                    raise FormatError(f"expected '{key} a b = {{...}}'", lineno)
                cell = _parse_cell(rhs, index, lineno)
                (add if key == "add" else mul)[(index[args[0]], index[args[1]])] = cell
            elif key in ("strict", "multi"):
                if len(words) != 2 or words[1] not in strict:
                    raise FormatError(f"expected '{key} add' or '{key} mul'", lineno)
                strict[words[1]] = key == "strict"
            else:
                raise FormatError(f"unknown directive {key!r}", lineno, 1)
        except KeyError as exc:
            raise FormatError(f"unknown element {exc.args[0]!r}", lineno) from None
    if zero is None or one is None:
        raise FormatError(f"structure {sname}: zero and one are required")
    missing = [("neg", a) for a in range(n) if a not in neg]
    missing += [("add", c) for c in ((a, b) for a in range(n) for b in range(n)) if c not in add]
    missing += [("mul", c) for c in ((a, b) for a in range(n) for b in range(n)) if c not in mul]
    if missing:
        raise FormatError(f"structure {sname}: missing entries, first {missing[0]}")
    add_t = tuple(tuple(add[(a, b)] for b in range(n)) for a in range(n))
    mul_t = tuple(tuple(mul[(a, b)] for b in range(n)) for a in range(n))
    strict_mul = strict["mul"]
    if strict_mul is None:
        strict_mul = all(bitset.is_singleton(c) for row in mul_t for c in row)
    R = FiniteMultiring(sname, tuple(names), zero, one, tuple(neg[a] for a in range(n)), add_t, mul_t, strict_mul)
    if strict["add"] and not R.strict_add:
        raise FormatError(f"structure {sname}: 'strict add' declared but some sum is multivalued")
    return R


def parse_structure(text: str) -> FiniteMultiring:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    return parse_structure_block([(i, ln) for i, ln in lines if ln])
