"""Terms, formulas and their set-valued semantics over finite multialgebras.

A term denotes a nonempty subset of the carrier once its variables are
valued; an atom ``t1 sub t2`` holds when the first subset is contained in
the second.  Formula nodes are generic over their atoms: anything with
``holds(structure, valuation)`` and ``free_vars()`` can sit at a leaf, which
lets the quantifier-elimination engine reuse the same connectives and the
same model checker.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence, Union

from multialg import bitset

Valuation = Mapping[int, int]


class UnboundVariable(KeyError):
    pass


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Symbols by arity. Constants and unary symbols are always strict."""

    constants: frozenset[str] = frozenset({"0", "1"})
    unary: frozenset[str] = frozenset({"-"})
    binary: Mapping[str, bool] = field(default_factory=lambda: {"+": False, "*": True})

    def __post_init__(self):
        groups = [set(self.constants), set(self.unary), set(self.binary)]
        for a, b in itertools.combinations(groups, 2):
            if a & b:
                raise ValueError(f"symbol sets overlap: {sorted(a & b)}")

    def arity(self, symbol: str) -> int:
        if symbol in self.unary:
            return 1
        if symbol in self.binary:
            return 2
        if symbol in self.constants:
            return 0
        raise KeyError(f"symbol {symbol!r} not in signature")

    def is_strict(self, symbol: str) -> bool:
        return self.binary.get(symbol, True)

    def check(self, t: "Term") -> None:
        """Raise if ``t`` uses an unknown symbol or the wrong arity.

        Constants outside ``constants`` are allowed: they name carrier
        elements (the diagram constants of a concrete structure).
        """
        if isinstance(t, Apply):
            if self.arity(t.symbol) != len(t.args):
                raise ValueError(f"{t.symbol} expects {self.arity(t.symbol)} arguments, got {len(t.args)}")
            for a in t.args:
                self.check(a)


RING_SIGNATURE = Signature()
SUPERRING_SIGNATURE = Signature(binary={"+": False, "*": False})


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int

    @cached_property
    def vars(self) -> frozenset[int]:
        return frozenset({self.index})

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Const:
    symbol: str
    vars = frozenset()

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple["Term", ...]

    @cached_property
    def vars(self) -> frozenset[int]:
        return frozenset().union(*(a.vars for a in self.args))

    def __str__(self):
        return format_term(self)


Term = Union[Var, Const, Apply]

ZERO = Const("0")
ONE = Const("1")


def add(a: Term, b: Term) -> Term:
    return Apply("+", (a, b))


def mul(a: Term, b: Term) -> Term:
    return Apply("*", (a, b))


def neg(a: Term) -> Term:
    return Apply("-", (a,))


def sub(a: Term, b: Term) -> Term:
    return add(a, neg(b))


def is_strict_term(t: Term, signature: Signature = RING_SIGNATURE) -> bool:
    if isinstance(t, Apply):
        return signature.is_strict(t.symbol) and all(is_strict_term(a, signature) for a in t.args)
    return True


_PREC = {"+": 1, "*": 2}


def format_term(t: Term, names: Mapping[int, str] | None = None) -> str:
    """Print with minimal parentheses; the output re-parses to the same tree."""
    if isinstance(t, Var):
        return names[t.index] if names and t.index in names else f"x{t.index}"
    if isinstance(t, Const):
        return t.symbol
    if t.symbol == "-":
        (a,) = t.args
        inner = format_term(a, names)
        if isinstance(a, Apply) and a.symbol in _PREC:
            inner = f"({inner})"
        return "-" + inner
    prec = _PREC[t.symbol]
    left, right = t.args
    ls, rs = format_term(left, names), format_term(right, names)
    if isinstance(left, Apply) and left.symbol in _PREC and _PREC[left.symbol] < prec:
        ls = f"({ls})"
    if isinstance(right, Apply) and right.symbol in _PREC and _PREC[right.symbol] <= prec:
        rs = f"({rs})"
    op = " + " if t.symbol == "+" else "*"
    return ls + op + rs


# ---------------------------------------------------------------------------
# Term semantics
# ---------------------------------------------------------------------------


def extend_op(structure, symbol: str, args: Sequence[int]) -> int:
    """Apply ``symbol`` to subsets: the union of its values on all element tuples."""
    for A in args:
        if A == 0:
            raise ValueError("operation arguments must be nonempty subsets")
    if not args:
        return structure.apply(symbol)
    if len(args) == 1:
        out = 0
        for a in bitset.elements(args[0]):
            out |= structure.apply(symbol, a)
        return out
    if len(args) == 2:
        out = 0
        for a in bitset.elements(args[0]):
            for b in bitset.elements(args[1]):
                out |= structure.apply(symbol, a, b)
        return out
    raise ValueError("only arities 0, 1 and 2 are supported")


def eval_term(structure, t: Term, v: Valuation) -> int:
    if isinstance(t, Var):
        try:
            return 1 << v[t.index]
        except (KeyError, IndexError):
            raise UnboundVariable(f"x{t.index} is not valued") from None
    if isinstance(t, Const):
        return 1 << structure.constant(t.symbol)
    return extend_op(structure, t.symbol, [eval_term(structure, a, v) for a in t.args])


def valuations(size: int, variables: Sequence[int], base: Valuation | None = None) -> Iterator[dict[int, int]]:
    """All valuations of ``variables`` over a carrier of ``size`` elements,
    in lexicographic order."""
    base = dict(base or {})
    for values in itertools.product(range(size), repeat=len(variables)):
        v = dict(base)
        v.update(zip(variables, values))
        yield v


def holds_weak_identity(structure, t1: Term, t2: Term) -> bool:
    """True iff some valuation makes the two term values intersect."""
    variables = sorted(t1.vars | t2.vars)
    return any(
        eval_term(structure, t1, v) & eval_term(structure, t2, v)
        for v in valuations(structure.size, variables)
    )


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


class _Printable:
    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Atom(_Printable):
    """``lhs sub rhs``: the value of ``lhs`` is contained in that of ``rhs``."""

    lhs: Term
    rhs: Term

    def free_vars(self) -> frozenset[int]:
        return self.lhs.vars | self.rhs.vars

    def holds(self, structure, v: Valuation) -> bool:
        return bitset.issubset(eval_term(structure, self.lhs, v), eval_term(structure, self.rhs, v))


@dataclass(frozen=True)
class Top(_Printable):
    def free_vars(self):
        return frozenset()

    def holds(self, structure, v):
        return True


@dataclass(frozen=True)
class Bottom(_Printable):
    def free_vars(self):
        return frozenset()

    def holds(self, structure, v):
        return False


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Not(_Printable):
    body: "Formula"

    def free_vars(self):
        return self.body.free_vars()


@dataclass(frozen=True)
class And(_Printable):
    args: tuple["Formula", ...]

    def free_vars(self):
        return frozenset().union(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Or(_Printable):
    args: tuple["Formula", ...]

    def free_vars(self):
        return frozenset().union(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Implies(_Printable):
    lhs: "Formula"
    rhs: "Formula"

    def free_vars(self):
        return self.lhs.free_vars() | self.rhs.free_vars()


@dataclass(frozen=True)
class Iff(_Printable):
    lhs: "Formula"
    rhs: "Formula"

    def free_vars(self):
        return self.lhs.free_vars() | self.rhs.free_vars()


@dataclass(frozen=True)
class Forall(_Printable):
    var: int
    body: "Formula"

    def free_vars(self):
        return self.body.free_vars() - {self.var}


@dataclass(frozen=True)
class Exists(_Printable):
    var: int
    body: "Formula"

    def free_vars(self):
        return self.body.free_vars() - {self.var}


Formula = Union[Atom, Top, Bottom, Not, And, Or, Implies, Iff, Forall, Exists]
CONNECTIVES = (Not, And, Or, Implies, Iff, Forall, Exists)


def strong_eq(t1: Term, t2: Term) -> Formula:
    """``t1 =s t2``, which is just sugar for containment both ways."""
    return And((Atom(t1, t2), Atom(t2, t1)))


def conj(parts) -> Formula:
    """Conjunction with unit/zero simplification; repeated parts are dropped."""
    out = []
    for p in parts:
        if isinstance(p, Bottom):
            return FALSE
        if isinstance(p, Top) or p in out:
            continue
        out.append(p)
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(parts) -> Formula:
    out = []
    for p in parts:
        if isinstance(p, Top):
            return TRUE
        if isinstance(p, Bottom) or p in out:
            continue
        out.append(p)
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Forall, Exists)):
        return False
    if isinstance(phi, Not):
        return is_quantifier_free(phi.body)
    if isinstance(phi, (And, Or)):
        return all(is_quantifier_free(a) for a in phi.args)
    if isinstance(phi, (Implies, Iff)):
        return is_quantifier_free(phi.lhs) and is_quantifier_free(phi.rhs)
    return True


def bound_vars(phi: Formula) -> frozenset[int]:
    if isinstance(phi, (Forall, Exists)):
        return bound_vars(phi.body) | {phi.var}
    if isinstance(phi, Not):
        return bound_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(bound_vars(a) for a in phi.args))
    if isinstance(phi, (Implies, Iff)):
        return bound_vars(phi.lhs) | bound_vars(phi.rhs)
    return frozenset()


def all_vars(phi: Formula) -> frozenset[int]:
    return phi.free_vars() | bound_vars(phi)


def satisfies(structure, phi: Formula, v: Valuation | None = None) -> bool:
    """Model-check ``phi`` at ``v``; quantifiers range over the whole carrier,
    left to right, stopping at the first decisive witness."""
    v = {} if v is None else v
    if isinstance(phi, Not):
        return not satisfies(structure, phi.body, v)
    if isinstance(phi, And):
        return all(satisfies(structure, a, v) for a in phi.args)
    if isinstance(phi, Or):
        return any(satisfies(structure, a, v) for a in phi.args)
    if isinstance(phi, Implies):
        return not satisfies(structure, phi.lhs, v) or satisfies(structure, phi.rhs, v)
    if isinstance(phi, Iff):
        return satisfies(structure, phi.lhs, v) == satisfies(structure, phi.rhs, v)
    if isinstance(phi, Exists):
        return any(satisfies(structure, phi.body, {**v, phi.var: a}) for a in range(structure.size))
    if isinstance(phi, Forall):
        return all(satisfies(structure, phi.body, {**v, phi.var: a}) for a in range(structure.size))
    missing = phi.free_vars() - set(v)
    if missing:
        raise UnboundVariable(f"free variables {sorted(missing)} are not valued")
    return phi.holds(structure, v)


def valid_in(structure, phi: Formula) -> tuple[bool, dict[int, int] | None]:
    """Check ``phi`` at every valuation of its free variables; returns the
    first failing valuation, if any."""
    for v in valuations(structure.size, sorted(phi.free_vars())):
        if not satisfies(structure, phi, v):
            return False, v
    return True, None


_FPREC = {"iff": 1, "implies": 2, "or": 3, "and": 4, "not": 5}


def format_formula(phi: Formula, names: Mapping[int, str] | None = None) -> str:
    return _fmt(phi, names, 0)


def _var_name(i: int, names) -> str:
    return names[i] if names and i in names else f"x{i}"


def _fmt(phi, names, ctx: int) -> str:
    def wrap(text: str, prec: int) -> str:
        return f"({text})" if prec < ctx else text

    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, (Forall, Exists)):
        q = "forall" if isinstance(phi, Forall) else "exists"
        return wrap(f"{q} {_var_name(phi.var, names)}. {_fmt(phi.body, names, 0)}", 0)
    if isinstance(phi, Not):
        return "!" + _fmt(phi.body, names, 6)
    if isinstance(phi, (And, Or)):
        p = _FPREC["and" if isinstance(phi, And) else "or"]
        sep = " & " if isinstance(phi, And) else " | "
        return wrap(sep.join(_fmt(a, names, p + 1) for a in phi.args), p)
    if isinstance(phi, Implies):
        p = _FPREC["implies"]
        return wrap(f"{_fmt(phi.lhs, names, p + 1)} -> {_fmt(phi.rhs, names, p)}", p)
    if isinstance(phi, Iff):
        p = _FPREC["iff"]
        return wrap(f"{_fmt(phi.lhs, names, p + 1)} <-> {_fmt(phi.rhs, names, p + 1)}", p)
    if isinstance(phi, Atom):
        return f"{format_term(phi.lhs, names)} sub {format_term(phi.rhs, names)}"
    return phi.format(names)


# ---------------------------------------------------------------------------
# Sum-of-products normal form
# ---------------------------------------------------------------------------

# A literal is (negated, leaf) with leaf a Var or Const; a product is a tuple
# of literals; a normal form is a tuple of products.


def _nf(t: Term, negated: bool) -> tuple[tuple[tuple[bool, Term], ...], ...]:
    if isinstance(t, (Var, Const)):
        return (((negated, t),),)
    if t.symbol == "-":
        return _nf(t.args[0], not negated)
    left, right = t.args
    if t.symbol == "+":
        return _nf(left, negated) + _nf(right, negated)
    if t.symbol == "*":
        # Only one factor carries the sign: -(a*b) = (-a)*b.
        ls, rs = _nf(left, negated), _nf(right, False)
        return tuple(p + q for p in ls for q in rs)
    raise KeyError(f"cannot normalize symbol {t.symbol!r}")


def sum_of_products(t: Term) -> tuple[tuple[tuple[bool, Term], ...], ...]:
    """The sum-of-products expansion of ``t`` as nested tuples of literals."""
    return _nf(t, False)


def _product_term(literals) -> Term:
    out = None
    for negated, leaf in literals:
        lit = neg(leaf) if negated else leaf
        out = lit if out is None else mul(out, lit)
    return out


def normalize_term(t: Term) -> Term:
    """Rewrite ``t`` as a left-nested sum of left-nested products of
    (possibly negated) variables and constants.

    Every multiring satisfies ``t sub normalize_term(t)``; equality needs full
    distributivity and, for products of two sums, more than that.  Shared
    subterms are duplicated, never reused.
    """
    out = None
    for product in sum_of_products(t):
        p = _product_term(product)
        out = p if out is None else add(out, p)
    return out


# ---------------------------------------------------------------------------
# First-order relational translation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationalStructure:
    """A first-order structure: strict operations stay functions, each
    multivalued binary operation becomes a ternary relation ``(a, b, d)``
    meaning ``d in a op b``."""

    size: int
    constants: Mapping[str, int]
    unary: Mapping[str, tuple[int, ...]]
    functions: Mapping[str, tuple[tuple[int, ...], ...]]
    relations: Mapping[str, frozenset[tuple[int, int, int]]]

    def constant(self, symbol: str) -> int:
        return self.constants[symbol]


@dataclass(frozen=True)
class Eq:
    """First-order equality between strict (function) terms."""

    lhs: Term
    rhs: Term

    def free_vars(self):
        return self.lhs.vars | self.rhs.vars

    def holds(self, rs: RelationalStructure, v: Valuation) -> bool:
        return fo_eval(rs, self.lhs, v) == fo_eval(rs, self.rhs, v)

    def format(self, names=None) -> str:
        return f"{format_term(self.lhs, names)} = {format_term(self.rhs, names)}"


@dataclass(frozen=True)
class Rel:
    symbol: str
    args: tuple[Term, Term, Term]

    def free_vars(self):
        return frozenset().union(*(a.vars for a in self.args))

    def holds(self, rs: RelationalStructure, v: Valuation) -> bool:
        return tuple(fo_eval(rs, a, v) for a in self.args) in rs.relations[self.symbol]

    def format(self, names=None) -> str:
        return f"{self.symbol}(" + ", ".join(format_term(a, names) for a in self.args) + ")"


def fo_eval(rs: RelationalStructure, t: Term, v: Valuation) -> int:
    if isinstance(t, Var):
        return v[t.index]
    if isinstance(t, Const):
        return rs.constant(t.symbol)
    if t.symbol in rs.unary:
        return rs.unary[t.symbol][fo_eval(rs, t.args[0], v)]
    a, b = (fo_eval(rs, x, v) for x in t.args)
    return rs.functions[t.symbol][a][b]


def to_first_order(structure) -> RelationalStructure:
    n = structure.size
    constants = {name: i for i, name in enumerate(structure.names)}
    constants["0"], constants["1"] = structure.zero, structure.one
    functions, relations = {}, {}
    for symbol in ("+", "*"):
        table = structure.add if symbol == "+" else structure.mul
        if all(bitset.is_singleton(c) for row in table for c in row):
            functions[symbol] = tuple(tuple(bitset.only(c) for c in row) for row in table)
        else:
            relations[symbol] = frozenset(
                (a, b, d) for a in range(n) for b in range(n) for d in bitset.elements(table[a][b])
            )
    return RelationalStructure(n, constants, {"-": tuple(structure.neg)}, functions, relations)


def totality_axioms(rs: RelationalStructure) -> list[Formula]:
    """``forall x forall y exists z R(x, y, z)`` for each relation symbol."""
    x, y, z = Var(0), Var(1), Var(2)
    return [Forall(0, Forall(1, Exists(2, Rel(s, (x, y, z))))) for s in sorted(rs.relations)]


class _Fresh:
    def __init__(self, start: int):
        self.next = start

    def __call__(self) -> int:
        self.next += 1
        return self.next - 1


def _member(t: Term, d: Term, rs: RelationalStructure, fresh: _Fresh) -> Formula:
    """A first-order formula saying the element term ``d`` lies in ``t``."""
    if isinstance(t, (Var, Const)):
        return Eq(d, t)
    if t.symbol == "-":
        a = fresh()
        return Exists(a, And((_member(t.args[0], Var(a), rs, fresh), Eq(d, neg(Var(a))))))
    a, b = fresh(), fresh()
    inner = [_member(t.args[0], Var(a), rs, fresh), _member(t.args[1], Var(b), rs, fresh)]
    if t.symbol in rs.relations:
        inner.append(Rel(t.symbol, (Var(a), Var(b), d)))
    else:
        inner.append(Eq(d, Apply(t.symbol, (Var(a), Var(b)))))
    return Exists(a, Exists(b, And(tuple(inner))))


def translate_formula(phi: Formula, rs: RelationalStructure) -> Formula:
    """Translate a containment formula into the relational language of ``rs``."""
    fresh = _Fresh(max(all_vars(phi), default=-1) + 1)
    return _translate(phi, rs, fresh)


def _translate(phi, rs, fresh):
    if isinstance(phi, Atom):
        d = fresh()
        return Forall(d, Implies(_member(phi.lhs, Var(d), rs, fresh), _member(phi.rhs, Var(d), rs, fresh)))
    if isinstance(phi, Not):
        return Not(_translate(phi.body, rs, fresh))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_translate(a, rs, fresh) for a in phi.args))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(_translate(phi.lhs, rs, fresh), _translate(phi.rhs, rs, fresh))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, _translate(phi.body, rs, fresh))
    return phi
