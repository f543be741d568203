"""Quantifier elimination for algebraically closed 1-fields.

Atoms ``t1 sub t2`` are first rewritten into constraints ``0 in f`` and
``0 notin g`` on formal polynomials.  A :class:`FormalPoly` is a multiset of
signed monomials that is never collapsed: two monomials with the same
exponents stay apart because adding their coefficients would yield a set.
Sets appear only when a polynomial is evaluated.

``eliminate`` then removes quantifiers innermost first.  Each ``exists Y``
over a conjunction is handled in three stages: a case split on leading
coefficients that leaves at most one membership constraint in ``Y`` (part
A), a divisibility test through pseudo-remainders that leaves only the
inequation (part B), and the coefficientwise reading of that inequation
(part C).  Parts B and C are sound only in algebraically closed, infinite
models; every step that needs such a hypothesis records it as a proviso in
the trace.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from multialg import bitset
from multialg.core import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bottom,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    Var,
    add,
    all_vars,
    conj,
    disj,
    is_strict_term,
    mul,
    satisfies,
    sub,
    sum_of_products,
    valuations,
)

# ---------------------------------------------------------------------------
# Formal polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Monomial:
    """``(-1)^negated * c_1 * ... * c_r * x_i^e_i * ...``.

    ``consts`` are constant symbols of the base structure, sorted, never
    ``"1"``; a monomial with the constant ``"0"`` is not constructed.
    """

    exps: tuple[tuple[int, int], ...] = ()
    consts: tuple[str, ...] = ()
    negated: bool = False

    def degree_in(self, y: int) -> int:
        return dict(self.exps).get(y, 0)

    def without(self, y: int) -> "Monomial":
        return Monomial(tuple(e for e in self.exps if e[0] != y), self.consts, self.negated)

    @property
    def vars(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.exps)

    def times(self, other: "Monomial") -> "Monomial":
        exps = dict(self.exps)
        for v, e in other.exps:
            exps[v] = exps.get(v, 0) + e
        return Monomial(
            tuple(sorted(exps.items())),
            tuple(sorted(self.consts + other.consts)),
            self.negated != other.negated,
        )

    def negate(self) -> "Monomial":
        return Monomial(self.exps, self.consts, not self.negated)

    def format(self, names: Mapping[int, str] | None = None) -> str:
        factors = list(self.consts)
        for v, e in self.exps:
            factors += [_vname(v, names)] * e
        body = "*".join(factors) or "1"
        return "-" + body if self.negated else body


def _vname(v: int, names) -> str:
    return names[v] if names and v in names else f"x{v}"


def _monomial(exps: Mapping[int, int], consts: Iterable[str], negated: bool) -> Monomial | None:
    consts = [c for c in consts if c != "1"]
    if "0" in consts:
        return None
    return Monomial(tuple(sorted((v, e) for v, e in exps.items() if e)), tuple(sorted(consts)), negated)


@dataclass(frozen=True)
class FormalPoly:
    monomials: tuple[Monomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "monomials", tuple(sorted(self.monomials)))

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def vars(self) -> frozenset[int]:
        return frozenset().union(*(m.vars for m in self.monomials))

    def format(self, names: Mapping[int, str] | None = None) -> str:
        if not self.monomials:
            return "0"
        return " + ".join(m.format(names) for m in self.monomials)

    def __str__(self):
        return self.format()

    def evaluate(self, structure, v: Mapping[int, int]) -> int:
        """The value as a subset: a left fold of set-valued sums over the
        monomials (an empty polynomial is ``{0}``)."""
        out = 1 << structure.zero
        for m in self.monomials:
            val = 1 << structure.one
            for c in m.consts:
                val = structure.prod_sets(val, 1 << structure.constant(c))
            for var, e in m.exps:
                for _ in range(e):
                    val = structure.prod_sets(val, 1 << v[var])
            if m.negated:
                val = structure.neg_set(val)
            out = structure.sum_sets(out, val)
        return out


ZERO_POLY = FormalPoly(())
ONE_POLY = FormalPoly((Monomial(),))


def var_poly(i: int, exp: int = 1) -> FormalPoly:
    return FormalPoly((Monomial(((i, exp),)),))


def const_poly(symbol: str) -> FormalPoly:
    m = _monomial({}, [symbol], False)
    return FormalPoly(() if m is None else (m,))


def formal_add(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    return FormalPoly(p.monomials + q.monomials)


def formal_neg(p: FormalPoly) -> FormalPoly:
    return FormalPoly(tuple(m.negate() for m in p.monomials))


def formal_sub(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    return formal_add(p, formal_neg(q))


def formal_mul(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    """Distribute every monomial of ``p`` over every monomial of ``q``."""
    return FormalPoly(tuple(a.times(b) for a in p.monomials for b in q.monomials))


def formal_pow(p: FormalPoly, k: int) -> FormalPoly:
    out = ONE_POLY
    for _ in range(k):
        out = formal_mul(out, p)
    return out


def deg_Y(p: FormalPoly, y: int) -> int:
    """Highest power of ``y`` (0 for the zero polynomial)."""
    return max((m.degree_in(y) for m in p.monomials), default=0)


def coeff_Y(p: FormalPoly, y: int, j: int) -> FormalPoly:
    """The coefficient ``a_j`` of ``y^j``, a polynomial in the other variables."""
    return FormalPoly(tuple(m.without(y) for m in p.monomials if m.degree_in(y) == j))


def truncate_j(p: FormalPoly, y: int, j: int) -> FormalPoly:
    """``p_j = a_j y^j + ... + a_0``."""
    return FormalPoly(tuple(m for m in p.monomials if m.degree_in(y) <= j))


def to_formal(t) -> FormalPoly:
    """Expand a term into a formal sum of signed monomials."""
    monos = []
    for product in sum_of_products(t):
        exps: dict[int, int] = {}
        consts = []
        negated = False
        for neg_flag, leaf in product:
            negated ^= neg_flag
            if isinstance(leaf, Var):
                exps[leaf.index] = exps.get(leaf.index, 0) + 1
            else:
                consts.append(leaf.symbol)
        m = _monomial(exps, consts, negated)
        if m is not None:
            monos.append(m)
    return FormalPoly(tuple(monos))


def merge_inequations(gs: Sequence[FormalPoly]) -> FormalPoly:
    """The formal product standing for ``0 notin g_1 & ... & 0 notin g_n``."""
    if not gs:
        raise ValueError("merge_inequations needs at least one polynomial")
    out = gs[0]
    for g in gs[1:]:
        out = formal_mul(out, g)
    return out


def pseudo_divide(q: FormalPoly, p_j: FormalPoly, y: int, d: int | None = None) -> tuple[FormalPoly, FormalPoly]:
    """Pseudo-division in ``y``: returns ``(q_j, r_j)`` meant to satisfy
    ``a^d q sub q_j p_j + r_j`` with ``a`` the leading coefficient of ``p_j``
    and ``deg_Y r_j < deg_Y p_j``.

    Each step replaces ``r`` by ``a*rest(r) - lc(r)*y^(D-m)*rest(p_j)``; the
    cancelled top terms are simply dropped.
    """
    m = deg_Y(p_j, y)
    if p_j.is_zero or m < 1:
        raise ValueError("pseudo_divide needs a divisor of positive degree in y")
    if d is None:
        d = deg_Y(q, y)
    if d < deg_Y(q, y):
        raise ValueError("d must be at least deg_Y(q)")
    a = coeff_Y(p_j, y, m)
    p_rest = truncate_j(p_j, y, m - 1)
    quot, r, steps = ZERO_POLY, q, 0
    while not r.is_zero and deg_Y(r, y) >= m:
        D = deg_Y(r, y)
        lc = formal_mul(coeff_Y(r, y, D), var_poly(y, D - m) if D > m else ONE_POLY)
        r = formal_sub(formal_mul(a, truncate_j(r, y, D - 1)), formal_mul(lc, p_rest))
        quot = formal_add(formal_mul(a, quot), lc)
        steps += 1
    scale = formal_pow(a, d - steps)
    return formal_mul(scale, quot), formal_mul(scale, r)


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyConstraint:
    """``0 in poly`` when ``member`` is true, else ``0 notin poly``."""

    member: bool
    poly: FormalPoly

    def free_vars(self) -> frozenset[int]:
        return self.poly.vars

    def holds(self, structure, v) -> bool:
        return bitset.contains(self.poly.evaluate(structure, v), structure.zero) == self.member

    def negate(self) -> "PolyConstraint":
        return PolyConstraint(not self.member, self.poly)

    def format(self, names=None) -> str:
        return ("mem(" if self.member else "nmem(") + self.poly.format(names) + ")"

    def __str__(self):
        return self.format()


def Member(p: FormalPoly) -> PolyConstraint:
    return PolyConstraint(True, p)


def NotMember(p: FormalPoly) -> PolyConstraint:
    return PolyConstraint(False, p)


def decide(c: PolyConstraint) -> bool | None:
    """Truth value of a constraint that is settled in every 1-field
    extending the base structure, else None."""
    p = c.poly
    if p.is_zero:
        return c.member
    if not p.vars and len(p.monomials) == 1:
        # A product of nonzero constants is nonzero.
        return not c.member
    return None


def _lit(c: PolyConstraint) -> Formula:
    v = decide(c)
    if v is None:
        return c
    return TRUE if v else FALSE


# ---------------------------------------------------------------------------
# Reduction of atoms
# ---------------------------------------------------------------------------


class _Fresh:
    def __init__(self, start: int):
        self._it = itertools.count(start)

    def __call__(self) -> int:
        return next(self._it)


def _split_products(t, fresh, bindings):
    """Replace the right factor of every product of two non-strict terms by a
    fresh variable ``u``, recording ``(u, factor)``."""
    if isinstance(t, (Var, Const)):
        return t
    args = tuple(_split_products(a, fresh, bindings) for a in t.args)
    if t.symbol == "*" and not is_strict_term(args[0]) and not is_strict_term(args[1]):
        u = fresh()
        bindings.append((u, args[1]))
        return mul(args[0], Var(u))
    return type(t)(t.symbol, args)


def reduce_atomic(atom: Atom, fresh: _Fresh | None = None) -> Formula:
    """An exact rewrite of ``t1 sub t2`` into polynomial constraints.

    With ``t1`` single-valued this is ``0 in NF(t2 - t1)``.  A multivalued
    ``t1`` is first unfolded to ``forall w (w sub t1 -> w sub t2)``, and a
    product of two multivalued factors gets an existential witness for one
    factor, so the expansion into monomials stays exact in hyperrings.
    """
    if fresh is None:
        fresh = _Fresh(max(atom.free_vars(), default=-1) + 1)
    t1, t2 = atom.lhs, atom.rhs
    if not is_strict_term(t1):
        w = fresh()
        return Forall(w, Implies(reduce_atomic(Atom(Var(w), t1), fresh), reduce_atomic(Atom(Var(w), t2), fresh)))
    bindings: list = []
    t = _split_products(sub(t2, t1), fresh, bindings)
    body: Formula = Member(to_formal(t))
    for u, s in reversed(bindings):
        body = Exists(u, And((reduce_atomic(Atom(Var(u), s), fresh), body)))
    return body


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


class ClauseLimitExceeded(RuntimeError):
    pass


def nnf(phi: Formula, negate: bool = False) -> Formula:
    """Push negations down to constraints; quantifiers are left alone."""
    if isinstance(phi, Not):
        return nnf(phi.body, not negate)
    if isinstance(phi, (Top, Bottom)):
        return (FALSE if isinstance(phi, Top) else TRUE) if negate else phi
    if isinstance(phi, PolyConstraint):
        return _lit(phi.negate() if negate else phi)
    if isinstance(phi, And):
        parts = [nnf(a, negate) for a in phi.args]
        return disj(parts) if negate else conj(parts)
    if isinstance(phi, Or):
        parts = [nnf(a, negate) for a in phi.args]
        return conj(parts) if negate else disj(parts)
    if isinstance(phi, Implies):
        return nnf(Or((Not(phi.lhs), phi.rhs)), negate)
    if isinstance(phi, Iff):
        a, b = phi.lhs, phi.rhs
        return nnf(Or((And((a, b)), And((Not(a), Not(b))))), negate)
    if isinstance(phi, Exists):
        return Forall(phi.var, nnf(phi.body, True)) if negate else Exists(phi.var, nnf(phi.body))
    if isinstance(phi, Forall):
        return Exists(phi.var, nnf(phi.body, True)) if negate else Forall(phi.var, nnf(phi.body))
    return Not(phi) if negate else phi


Clause = tuple[PolyConstraint, ...]


def _clean(clause: Iterable[PolyConstraint]) -> Clause | None:
    seen = []
    for c in clause:
        if c.negate() in seen:
            return None
        if c not in seen:
            seen.append(c)
    return tuple(seen)


def dnf(phi: Formula, max_clauses: int = 4096) -> list[Clause]:
    """Clauses of a quantifier-free formula; an empty clause means true."""
    phi = nnf(phi)

    def go(f) -> list[Clause]:
        if isinstance(f, Top):
            return [()]
        if isinstance(f, Bottom):
            return []
        if isinstance(f, PolyConstraint):
            return [(f,)]
        if isinstance(f, Or):
            out = []
            for a in f.args:
                out.extend(go(a))
                if len(out) > max_clauses:
                    raise ClauseLimitExceeded(f"more than {max_clauses} clauses")
            return out
        if isinstance(f, And):
            out: list[Clause] = [()]
            for a in f.args:
                nxt = []
                for left in out:
                    for right in go(a):
                        c = _clean(left + right)
                        if c is not None:
                            nxt.append(c)
                if len(nxt) > max_clauses:
                    raise ClauseLimitExceeded(f"more than {max_clauses} clauses")
                out = nxt
            return out
        raise TypeError(f"not a quantifier-free constraint formula: {f}")

    out = []
    for c in go(phi):
        if c not in out:
            out.append(c)
    return out


def from_clauses(clauses: Iterable[Clause]) -> Formula:
    return disj(conj(c) for c in clauses)


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class TraceStep:
    kind: str  # reduce, merge, partA, partB, partC
    input: str
    output: str
    provisos: tuple[str, ...] = ()

    @property
    def input_hash(self) -> str:
        return _digest(self.input)

    @property
    def output_hash(self) -> str:
        return _digest(self.output)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "input": self.input,
            "output": self.output,
            "input_hash": self.input_hash,
            "output_hash": self.output_hash,
            "provisos": list(self.provisos),
        }


@dataclass
class Trace:
    steps: list[TraceStep] = field(default_factory=list)

    def add(self, kind: str, before, after, provisos: Sequence[str] = ()) -> None:
        self.steps.append(TraceStep(kind, str(before), str(after), tuple(provisos)))

    @property
    def provisos(self) -> tuple[str, ...]:
        out: list[str] = []
        for s in self.steps:
            out += [p for p in s.provisos if p not in out]
        return tuple(out)

    def to_list(self) -> list[dict]:
        return [s.to_dict() for s in self.steps]


PROVISO_2DOMAIN = "2-domain"
PROVISO_CLOSED = "algebraically closed"
PROVISO_INFINITE = "infinite"


# ---------------------------------------------------------------------------
# Parts A, B and C
# ---------------------------------------------------------------------------


def _vanish(polys: Iterable[FormalPoly]) -> list[Formula]:
    return [_lit(Member(a)) for a in polys]


def part_a_step(p: FormalPoly, q: FormalPoly, y: int) -> list[list[Formula]]:
    """The case split replacing ``0 in p & 0 in q`` (``deg_Y p <= deg_Y q``).

    Branch ``j``: ``a_k .. a_{j+1}`` vanish, ``a_j`` does not, and the pair
    becomes ``0 in p_j & 0 in r_j``.  The last branch has every coefficient
    of ``p`` vanishing and keeps ``0 in q``.  Branch ``j = 0`` asks for
    ``0 notin a_0`` and ``0 in a_0`` at once and is omitted.
    """
    k, d = deg_Y(p, y), deg_Y(q, y)
    if k > d:
        raise ValueError("part A expects deg_Y p <= deg_Y q")
    coeffs = [coeff_Y(p, y, j) for j in range(k + 1)]
    branches = []
    for j in range(k, 0, -1):
        head = _vanish(coeffs[j + 1 :]) + [_lit(NotMember(coeffs[j]))]
        if FALSE in head:
            continue
        p_j = truncate_j(p, y, j)
        _, r_j = pseudo_divide(q, p_j, y, d)
        branches.append(head + [Member(p_j), _lit(Member(r_j))])
    tail = _vanish(coeffs) + [Member(q)]
    if FALSE not in tail:
        branches.append(tail)
    return branches


def part_a_formula(p: FormalPoly, q: FormalPoly, y: int) -> Formula:
    return disj(conj(b) for b in part_a_step(p, q, y))


def part_b_branches(p: FormalPoly, g: FormalPoly | None, y: int) -> list[tuple[list[Formula], FormalPoly | None]]:
    """Branches for ``exists Y (0 in p & 0 notin g)``: pairs of Y-free
    conditions and the polynomial ``r`` of the remaining ``exists Y (0 notin r)``
    (None meaning that block is simply true)."""
    k = deg_Y(p, y)
    coeffs = [coeff_Y(p, y, j) for j in range(k + 1)]
    q = formal_pow(g if g is not None else ONE_POLY, k)
    d = deg_Y(q, y)
    out = []
    for j in range(k, 0, -1):
        head = _vanish(coeffs[j + 1 :]) + [_lit(NotMember(coeffs[j]))]
        if FALSE in head:
            continue
        _, r_j = pseudo_divide(q, truncate_j(p, y, j), y, d)
        out.append((head, r_j))
    tail = _vanish(coeffs)
    if FALSE not in tail:
        out.append((tail, g))
    return out


def part_c_formula(g: FormalPoly, y: int) -> Formula:
    """``exists Y (0 notin sum a_l Y^l)`` read as ``0 notin a_l`` for some ``l``."""
    return disj(_lit(NotMember(coeff_Y(g, y, j))) for j in range(deg_Y(g, y) + 1))


def _split_clause(y: int, clause: Iterable[Formula]):
    outside, members, nonmembers = [], [], []
    for c in clause:
        if isinstance(c, PolyConstraint):
            c = _lit(c)
        if isinstance(c, Top):
            continue
        if isinstance(c, Bottom):
            return None
        if y not in c.free_vars():
            outside.append(c)
        elif c.member:
            members.append(c.poly)
        else:
            nonmembers.append(c.poly)
    return outside, members, nonmembers


def _block(y: int, members: Sequence[FormalPoly], g: FormalPoly | None) -> Formula:
    parts: list[Formula] = [Member(p) for p in members]
    if g is not None:
        parts.append(NotMember(g))
    return Exists(y, conj(parts))


def _ordered(members: Sequence[FormalPoly], y: int) -> list[FormalPoly]:
    return sorted(members, key=lambda p: (deg_Y(p, y), p.format()))


def eliminate_part_a(phi: Exists, trace: Trace | None = None) -> Formula:
    """Split ``exists Y`` over several memberships in ``Y`` into blocks with
    at most one.  Y-free conjuncts are moved outside first."""
    y = phi.var
    parts = _split_clause(y, _conjuncts(phi.body))
    if parts is None:
        return FALSE
    outside, members, nonmembers = parts
    g = merge_inequations(nonmembers) if nonmembers else None
    result = conj(outside + [_part_a_rec(y, members, g, trace)])
    return result


def _part_a_rec(y: int, members: list[FormalPoly], g: FormalPoly | None, trace: Trace | None) -> Formula:
    if len(members) <= 1:
        return _block(y, members, g)
    ms = _ordered(members, y)
    p, q, others = ms[0], ms[-1], ms[1:-1]
    out = []
    for branch in part_a_step(p, q, y):
        parts = _split_clause(y, list(branch) + [Member(o) for o in others])
        if parts is None:
            continue
        outside, new_members, new_non = parts
        assert not new_non
        out.append(conj(outside + [_part_a_rec(y, new_members, g, trace)]))
    result = disj(out)
    if trace is not None:
        trace.add("partA", _block(y, members, g), result)
    return result


def eliminate_part_b(phi: Exists, trace: Trace | None = None) -> Formula:
    """``exists Y (0 in p & 0 notin g)`` to a disjunction whose only
    quantifiers are blocks ``exists Y (0 notin r)``."""
    y = phi.var
    parts = _split_clause(y, _conjuncts(phi.body))
    if parts is None:
        return FALSE
    outside, members, nonmembers = parts
    if len(members) > 1:
        raise ValueError("part B expects at most one membership constraint in Y")
    g = merge_inequations(nonmembers) if nonmembers else None
    if not members:
        return conj(outside + [_block(y, [], g) if g is not None else TRUE])
    out = []
    for head, r in part_b_branches(members[0], g, y):
        if r is None:
            tail: Formula = TRUE
        elif y not in r.vars:
            tail = _lit(NotMember(r))
        else:
            tail = _block(y, [], r)
        out.append(conj(head + [tail]))
    result = conj(outside + [disj(out)])
    if trace is not None:
        trace.add("partB", phi, result, [PROVISO_CLOSED])
    return result


@dataclass(frozen=True)
class PartCResult:
    formula: Formula
    provisos: tuple[str, ...]


def eliminate_part_c(phi: Exists, trace: Trace | None = None) -> PartCResult:
    """``exists Y (0 notin g)`` to ``0 notin a_l`` for some ``l``; valid
    only in infinite models, which the result records."""
    y = phi.var
    parts = _split_clause(y, _conjuncts(phi.body))
    if parts is None:
        return PartCResult(FALSE, ())
    outside, members, nonmembers = parts
    if members:
        raise ValueError("part C expects no membership constraint in Y")
    if not nonmembers:
        return PartCResult(conj(outside), ())
    g = merge_inequations(nonmembers)
    result = conj(outside + [part_c_formula(g, y)])
    provisos = (PROVISO_INFINITE,)
    if len(nonmembers) > 1:
        provisos = (PROVISO_2DOMAIN, PROVISO_INFINITE)
    if trace is not None:
        trace.add("partC", phi, result, provisos)
    return PartCResult(result, provisos)


def _conjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        out = []
        for a in phi.args:
            out += _conjuncts(a)
        return out
    if isinstance(phi, Top):
        return []
    if isinstance(phi, (PolyConstraint, Bottom)):
        return [phi]
    raise TypeError(f"expected a conjunction of constraints, got {phi}")


# ---------------------------------------------------------------------------
# The driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EliminationResult:
    formula: Formula
    trace: Trace

    @property
    def provisos(self) -> tuple[str, ...]:
        return self.trace.provisos


class _Eliminator:
    def __init__(self, phi: Formula, max_clauses: int):
        self.max_clauses = max_clauses
        self.trace = Trace()
        self.fresh = _Fresh(max(all_vars(phi), default=-1) + 1)

    def run(self, phi: Formula) -> Formula:
        if isinstance(phi, Atom):
            out = reduce_atomic(phi, self.fresh)
            self.trace.add("reduce", phi, out)
            return self.run(out)
        if isinstance(phi, PolyConstraint):
            return _lit(phi)
        if isinstance(phi, (Top, Bottom)):
            return phi
        if isinstance(phi, Not):
            return nnf(Not(self.run(phi.body)))
        if isinstance(phi, And):
            return conj(self.run(a) for a in phi.args)
        if isinstance(phi, Or):
            return disj(self.run(a) for a in phi.args)
        if isinstance(phi, Implies):
            return disj([nnf(Not(self.run(phi.lhs))), self.run(phi.rhs)])
        if isinstance(phi, Iff):
            a, b = self.run(phi.lhs), self.run(phi.rhs)
            return nnf(Iff(a, b))
        if isinstance(phi, Exists):
            return self.exists(phi.var, self.run(phi.body))
        if isinstance(phi, Forall):
            body = nnf(Not(self.run(phi.body)))
            return nnf(Not(self.exists(phi.var, body)))
        raise TypeError(f"cannot eliminate {type(phi).__name__}")

    def exists(self, y: int, body: Formula) -> Formula:
        out = []
        for clause in dnf(body, self.max_clauses):
            out.append(self.exists_clause(y, clause))
        return disj(out)

    def exists_clause(self, y: int, clause: Clause) -> Formula:
        parts = _split_clause(y, clause)
        if parts is None:
            return FALSE
        outside, members, nonmembers = parts
        g = None
        if nonmembers:
            g = merge_inequations(nonmembers)
            if len(nonmembers) > 1:
                self.trace.add(
                    "merge", conj(NotMember(h) for h in nonmembers), NotMember(g), [PROVISO_2DOMAIN]
                )
        inner = _part_a_rec(y, list(members), g, self.trace) if len(members) > 1 else _block(y, members, g)
        return conj(outside + [self.finish(inner)])

    def finish(self, phi: Formula) -> Formula:
        """Run parts B and C on every remaining ``exists Y`` block."""
        if isinstance(phi, Exists):
            parts = _split_clause(phi.var, _conjuncts(phi.body))
            if parts is None:
                return FALSE
            if parts[1]:
                return self.finish(eliminate_part_b(phi, self.trace))
            return eliminate_part_c(phi, self.trace).formula
        if isinstance(phi, And):
            return conj(self.finish(a) for a in phi.args)
        if isinstance(phi, Or):
            return disj(self.finish(a) for a in phi.args)
        return phi


def eliminate(phi: Formula, max_clauses: int = 4096) -> EliminationResult:
    """Eliminate every quantifier of ``phi``.

    The output is quantifier-free, mentions no variable that is not free in
    ``phi``, and is meant to be equivalent to ``phi`` in infinite
    algebraically closed 1-fields over the base structure.
    """
    e = _Eliminator(phi, max_clauses)
    return EliminationResult(e.run(phi), e.trace)


def replay(phi: Formula, trace: Trace, max_clauses: int = 4096) -> bool:
    """Re-run the elimination and compare every step, hashes included."""
    again = eliminate(phi, max_clauses).trace
    if len(again.steps) != len(trace.steps):
        return False
    return all(a.to_dict() == b.to_dict() for a, b in zip(again.steps, trace.steps))


# ---------------------------------------------------------------------------
# Axioms and model checking
# ---------------------------------------------------------------------------


def _power_term(x, n: int):
    out = x
    for _ in range(n - 1):
        out = mul(out, x)
    return out


def ac_axiom(n: int) -> Formula:
    """``forall z_0..z_{n-1} exists x. 0 in z_0 + z_1 x + ... + x^n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = Var(n)
    term = Var(0)
    for i in range(1, n):
        term = add(term, mul(Var(i), _power_term(x, i)))
    term = add(term, _power_term(x, n))
    phi: Formula = Exists(n, Atom(Const("0"), term))
    for i in range(n - 1, -1, -1):
        phi = Forall(i, phi)
    return phi


def infinitude_axiom(n: int) -> Formula:
    """``exists z_0..z_{n-1}``, pairwise distinct.

    Distinctness is ``!(z_i sub z_j & z_j sub z_i)``.  Read as a disjunction
    the family would hold in every two-element model; it is used here as the
    conjunction, which says there are at least ``n`` elements.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    diffs = [
        Not(And((Atom(Var(i), Var(j)), Atom(Var(j), Var(i)))))
        for i, j in itertools.combinations(range(n), 2)
    ]
    phi: Formula = conj(diffs)
    for i in range(n - 1, -1, -1):
        phi = Exists(i, phi)
    return phi


def axioms_tilde(n_ac: int, n_inf: int) -> list[tuple[str, Formula]]:
    """The root axioms up to degree ``n_ac`` and the infinitude axioms up to
    ``n_inf`` elements."""
    out = [(f"AC{n}", ac_axiom(n)) for n in range(1, n_ac + 1)]
    out += [(f"INF{n}", infinitude_axiom(n)) for n in range(2, n_inf + 1)]
    return out


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    witness: dict[int, int] | None = None


def check_equivalence_on_model(structure, phi: Formula, psi: Formula) -> EquivalenceResult:
    """Compare ``phi`` and ``psi`` at every valuation of their free variables."""
    variables = sorted(phi.free_vars() | psi.free_vars())
    for v in valuations(structure.size, variables):
        if satisfies(structure, phi, v) != satisfies(structure, psi, v):
            return EquivalenceResult(False, v)
    return EquivalenceResult(True)
