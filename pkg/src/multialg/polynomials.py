"""Multipolynomials over a finite multiring.

Sums and products of two polynomials are sets of polynomials.  Both are
defined coefficient by coefficient, so each result is exactly a Cartesian
product of coefficient sets; :class:`PolySet` stores it as one mask per
coefficient and never enumerates members.

Degrees follow the convention ``deg p = len(coefficients)``: the least ``t``
with every coefficient from ``t`` on equal to zero.  A nonzero constant has
degree 1 and the zero polynomial degree 0.  Bounds called ``dmax`` below are
usual degrees (highest exponent) and say so.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from multialg import bitset
from multialg.axioms import Morphism
from multialg.structures import FiniteMultiring


def sum_of_sets(R: FiniteMultiring, masks: Iterable[int]) -> int:
    out = 1 << R.zero
    for m in masks:
        out = R.sum_sets(out, m)
    return out


def product_of_sets(R: FiniteMultiring, masks: Iterable[int]) -> int:
    out = 1 << R.one
    for m in masks:
        out = R.prod_sets(out, m)
    return out


def finite_sum(R: FiniteMultiring, elements: Sequence[int]) -> int:
    """``a_0 + ... + a_{p-1}`` folded left; the empty sum is ``{0}``."""
    return sum_of_sets(R, (1 << a for a in elements))


def finite_product(R: FiniteMultiring, elements: Sequence[int]) -> int:
    """``a_0 * ... * a_{p-1}`` folded left; the empty product is ``{1}``."""
    return product_of_sets(R, (1 << a for a in elements))


# ---------------------------------------------------------------------------
# Polynomials and polynomial sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiPoly:
    """A polynomial as coefficient indices, constant term first."""

    coeffs: tuple[int, ...]
    zero: int

    def __post_init__(self):
        c = tuple(self.coeffs)
        while c and c[-1] == self.zero:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def of(cls, R: FiniteMultiring, coeffs: Iterable[int]) -> "MultiPoly":
        return cls(tuple(coeffs), R.zero)

    @classmethod
    def from_names(cls, R: FiniteMultiring, names: Iterable[str]) -> "MultiPoly":
        return cls(tuple(R.element(x) for x in names), R.zero)

    @property
    def deg(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if i < len(self.coeffs) else self.zero

    def lead(self) -> int:
        return self.coeffs[-1]


@dataclass(frozen=True)
class PolySet:
    """The set of polynomials whose ``i``-th coefficient lies in ``cells[i]``
    (and is zero past the last cell)."""

    cells: tuple[int, ...]
    zero: int

    def __post_init__(self):
        if any(c == 0 for c in self.cells):
            raise ValueError("PolySet cells must be nonempty")
        c = tuple(self.cells)
        while c and c[-1] == 1 << self.zero:
            c = c[:-1]
        object.__setattr__(self, "cells", c)

    def cell(self, i: int) -> int:
        return self.cells[i] if i < len(self.cells) else 1 << self.zero

    def __contains__(self, p: MultiPoly) -> bool:
        return polyset_contains(self, p)

    @classmethod
    def singleton(cls, p: MultiPoly) -> "PolySet":
        return cls(tuple(1 << c for c in p.coeffs), p.zero)


def polyset_contains(ps: PolySet, p: MultiPoly) -> bool:
    n = max(len(ps.cells), p.deg)
    return all(bitset.contains(ps.cell(i), p.coeff(i)) for i in range(n))


def polysets_meet(a: PolySet, b: PolySet) -> bool:
    n = max(len(a.cells), len(b.cells))
    return all(a.cell(i) & b.cell(i) for i in range(n))


def poly_add_set(R: FiniteMultiring, a: MultiPoly, b: MultiPoly) -> PolySet:
    n = max(a.deg, b.deg)
    return PolySet(tuple(R.add[a.coeff(i)][b.coeff(i)] for i in range(n)), R.zero)


def poly_mul_set(R: FiniteMultiring, a: MultiPoly, b: MultiPoly) -> PolySet:
    """Cell ``n`` is ``a_0 b_n + a_1 b_{n-1} + ... + a_n b_0``."""
    if a.is_zero or b.is_zero:
        return PolySet((), R.zero)
    n = a.deg + b.deg - 1
    cells = []
    for k in range(n):
        terms = (R.mul[a.coeff(i)][b.coeff(k - i)] for i in range(k + 1))
        cells.append(sum_of_sets(R, terms))
    return PolySet(tuple(cells), R.zero)


def polyset_add(R: FiniteMultiring, A: PolySet, B: PolySet) -> PolySet:
    n = max(len(A.cells), len(B.cells))
    return PolySet(tuple(R.sum_sets(A.cell(i), B.cell(i)) for i in range(n)), R.zero)


def polyset_mul(R: FiniteMultiring, A: PolySet, B: PolySet) -> PolySet:
    """Cellwise set-extended convolution.

    This contains every product of members; for strict rings it is exact.
    """
    if not A.cells or not B.cells:
        return PolySet((), R.zero)
    n = len(A.cells) + len(B.cells) - 1
    cells = []
    for k in range(n):
        terms = (R.prod_sets(A.cell(i), B.cell(k - i)) for i in range(k + 1))
        cells.append(sum_of_sets(R, terms))
    return PolySet(tuple(cells), R.zero)


def polyset_power(R: FiniteMultiring, g: MultiPoly, k: int) -> PolySet:
    if k < 0:
        raise ValueError("negative power")
    out = PolySet((1 << R.one,), R.zero)
    single = PolySet.singleton(g)
    for _ in range(k):
        out = polyset_mul(R, out, single)
    return out


def all_polys(R: FiniteMultiring, dmax: int, nonzero: bool = False) -> Iterator[MultiPoly]:
    """Every polynomial of usual degree at most ``dmax``, constants first,
    then by degree, each block in lexicographic coefficient order."""
    if not nonzero:
        yield MultiPoly((), R.zero)
    for d in range(dmax + 1):
        for lead in R.elements:
            if lead == R.zero:
                continue
            for lower in itertools.product(R.elements, repeat=d):
                yield MultiPoly((*lower, lead), R.zero)


# ---------------------------------------------------------------------------
# Evaluation and roots
# ---------------------------------------------------------------------------


def _evaluate_coeffs(R: FiniteMultiring, coeffs: Sequence[int], alpha: int) -> int:
    power = 1 << R.one
    terms = []
    for i, c in enumerate(coeffs):
        if i:
            power = R.prod_sets(power, 1 << alpha)
        terms.append(R.prod_sets(1 << c, power))
    return sum_of_sets(R, terms)


def evaluate(R: FiniteMultiring, p: MultiPoly, alpha: int) -> int:
    """``a_0 + a_1 alpha + ... + a_n alpha^n`` as a subset of the carrier."""
    return _evaluate_coeffs(R, p.coeffs, alpha)


def h_evaluate(f: Morphism, p: MultiPoly, s: int) -> int:
    """Evaluate at ``s`` in the target after pushing coefficients through ``f``."""
    return _evaluate_coeffs(f.target, [f(c) for c in p.coeffs], s)


def roots(R: FiniteMultiring, p: MultiPoly) -> tuple[int, ...]:
    return tuple(a for a in R.elements if bitset.contains(evaluate(R, p, a), R.zero))


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    witness: MultiPoly | None = None


def is_algebraically_closed_upto(R: FiniteMultiring, dmax: int) -> ClosureResult:
    """Check every nonconstant polynomial of usual degree ``<= dmax`` for a root."""
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    for p in all_polys(R, dmax, nonzero=True):
        if p.deg >= 2 and not roots(R, p):
            return ClosureResult(False, p)
    return ClosureResult(True)


# ---------------------------------------------------------------------------
# Euclidean division
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisionWitness:
    q: MultiPoly
    r: MultiPoly
    # (index, coefficient of a, cell of q*b + r at that index)
    certificate: tuple[tuple[int, int, int], ...]
    method: str = "long division"


def _inverse(R: FiniteMultiring, a: int) -> int | None:
    for b in R.elements:
        if R.mul[a][b] == 1 << R.one:
            return b
    return None


def _certificate(R, a: MultiPoly, b: MultiPoly, q: MultiPoly, r: MultiPoly):
    cells = polyset_add(R, poly_mul_set(R, q, b), PolySet.singleton(r))
    n = max(len(cells.cells), a.deg)
    return tuple((i, a.coeff(i), cells.cell(i)) for i in range(n))


def verify_division(R: FiniteMultiring, a: MultiPoly, b: MultiPoly, w: DivisionWitness) -> bool:
    """Replay a witness: ``a in q*b + r`` cellwise, the degree bound, and the
    stored certificate."""
    if not (w.r.is_zero or w.r.deg < b.deg):
        return False
    cert = _certificate(R, a, b, w.q, w.r)
    if cert != w.certificate:
        return False
    return all(bitset.contains(cell, coeff) for _, coeff, cell in cert)


def _long_divide(R: FiniteMultiring, a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly] | None:
    if a.deg < b.deg:
        return MultiPoly((), R.zero), a
    inv = _inverse(R, b.lead())
    if inv is None:
        return None
    shift = a.deg - b.deg
    t = bitset.only(R.mul[a.lead()][inv])
    # a' is chosen inside a - t X^shift b, with a zero top coefficient.
    rest = []
    for i in range(a.deg):
        s = R.mul[t][b.coeff(i - shift)] if i >= shift else 1 << R.zero
        cell = R.add[a.coeff(i)][R.neg[bitset.only(s)]]
        if i == a.deg - 1 or bitset.contains(cell, R.zero):
            if not bitset.contains(cell, R.zero):
                return None
            rest.append(R.zero)
        else:
            rest.append(bitset.lowest(cell))
    sub = _long_divide(R, MultiPoly(tuple(rest), R.zero), b)
    if sub is None:
        return None
    q_rest, r = sub
    q = list(q_rest.coeffs) + [R.zero] * (shift + 1 - q_rest.deg)
    q[shift] = t
    return MultiPoly(tuple(q), R.zero), r


def _search_divide(R: FiniteMultiring, a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly] | None:
    """Lexicographically least ``(q, r)`` with ``deg q <= deg a`` and
    ``deg r < deg b``, by exhaustion."""
    zero = MultiPoly((), R.zero)
    qs = [zero] + list(all_polys(R, max(a.deg - 1, 0), nonzero=True))
    rs = [zero] + (list(all_polys(R, b.deg - 2, nonzero=True)) if b.deg >= 2 else [])
    for q in qs:
        prod = poly_mul_set(R, q, b)
        for r in rs:
            if polyset_contains(polyset_add(R, prod, PolySet.singleton(r)), a):
                return q, r
    return None


def euclid_divide(R: FiniteMultiring, a: MultiPoly, b: MultiPoly) -> DivisionWitness:
    """Find ``q, r`` with ``a in q*b + r`` and ``deg r < deg b`` (or ``r = 0``).

    Long division first: divide leading coefficients, pick a member of
    ``a - t X^k b`` with a vanishing top coefficient (zero wherever a cell
    allows it, else its lowest element) and recurse.  Falls back to bounded
    exhaustive search if some leading coefficient is not invertible.
    """
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    method = "long division"
    found = _long_divide(R, a, b)
    if found is not None:
        w = DivisionWitness(*found, _certificate(R, a, b, *found), method)
        if verify_division(R, a, b, w):
            return w
    method = "search"
    found = _search_divide(R, a, b)
    if found is None:
        raise ArithmeticError(f"no division witness found in {R.name}")
    return DivisionWitness(*found, _certificate(R, a, b, *found), method)


# ---------------------------------------------------------------------------
# Divisibility and the 2-domain transfer
# ---------------------------------------------------------------------------


def divides_power(R: FiniteMultiring, p: MultiPoly, g: MultiPoly, k: int) -> bool:
    """Whether some ``p*q`` meets the cellwise expansion of ``g^k``, for ``q``
    ranging over every polynomial of usual degree ``deg(g^k) - deg p``."""
    if p.is_zero:
        raise ValueError("p must be nonzero")
    if k < 1:
        raise ValueError("k must be at least 1")
    target = polyset_power(R, g, k)
    span = max(len(target.cells) - p.deg, 0)
    for q in all_polys(R, span):
        if polysets_meet(poly_mul_set(R, p, q), target):
            return True
    return False


@dataclass(frozen=True)
class DomainResult:
    holds: bool
    witness: tuple[MultiPoly, MultiPoly] | None = None


def check_2domain_poly(R: FiniteMultiring, dmax: int) -> DomainResult:
    """No two nonzero polynomials of usual degree ``<= dmax`` have the zero
    polynomial among their products."""
    polys = list(all_polys(R, dmax, nonzero=True))
    for a in polys:
        for b in polys:
            cells = poly_mul_set(R, a, b)
            if all(bitset.contains(c, R.zero) for c in cells.cells):
                return DomainResult(False, (a, b))
    return DomainResult(True)


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------

_MONO = re.compile(r"^(?:(?P<coef>[^*\s^]+)\s*\*\s*)?(?P<x>[Xx])(?:\s*\^\s*(?P<exp>\d+))?$")


class PolySyntaxError(ValueError):
    pass


def parse_poly(R: FiniteMultiring, text: str) -> MultiPoly:
    """Parse ``"3 + 2*X + X^2"``; coefficients use the structure's element names."""
    coeffs: dict[int, int] = {}
    # Split on '+' that separates terms (a '+' never occurs inside a name).
    for raw in text.split("+"):
        term = raw.strip()
        if not term:
            raise PolySyntaxError(f"empty term in {text!r}")
        m = _MONO.match(term)
        if m:
            exp = int(m.group("exp") or 1)
            coef_name = m.group("coef") or R.names[R.one]
        else:
            exp, coef_name = 0, term
        try:
            coef = R.element(coef_name)
        except KeyError:
            raise PolySyntaxError(f"unknown coefficient {coef_name!r} in {R.name}") from None
        if exp in coeffs:
            raise PolySyntaxError(f"power X^{exp} appears twice in {text!r}")
        coeffs[exp] = coef
    n = max(coeffs, default=-1) + 1
    return MultiPoly(tuple(coeffs.get(i, R.zero) for i in range(n)), R.zero)


def format_poly(R: FiniteMultiring, p: MultiPoly) -> str:
    if p.is_zero:
        return R.names[R.zero]
    parts = []
    for i, c in enumerate(p.coeffs):
        if c == R.zero:
            continue
        name = R.names[c]
        if i == 0:
            parts.append(name)
            continue
        x = "X" if i == 1 else f"X^{i}"
        parts.append(x if c == R.one else f"{name}*{x}")
    return " + ".join(parts)


def format_polyset(R: FiniteMultiring, ps: PolySet) -> str:
    return "(" + ", ".join(R.show(c) for c in ps.cells) + ")"
