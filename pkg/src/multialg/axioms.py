"""Exhaustive verification of multigroup / multiring / superring axioms and
the related finite checks: sign identities, characteristic, ideals,
morphisms and quotient multigroups.

Every check walks all element tuples in lexicographic order, so a reported
counterexample is the first one and rerunning gives the same witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from multialg import bitset
from multialg.structures import FiniteMultiring, Multigroup, StructureError

# ---------------------------------------------------------------------------
# Axiom tables
# ---------------------------------------------------------------------------


def _m1(g: Multigroup, a, b, c) -> bool:
    if not bitset.contains(g.op(a, b), c):
        return True
    return bitset.contains(g.op(c, g.inv[b]), a) and bitset.contains(g.op(g.inv[a], c), b)


def _m2(g: Multigroup, a, b) -> bool:
    return bitset.contains(g.op(a, g.unit), b) == (a == b)


def _m3(g: Multigroup, a, b, c) -> bool:
    return g.op_sets(g.op(a, b), 1 << c) == g.op_sets(1 << a, g.op(b, c))


def _m3_weak(g: Multigroup, a, b, c) -> bool:
    return bitset.issubset(g.op_sets(g.op(a, b), 1 << c), g.op_sets(1 << a, g.op(b, c)))


def _m4(g: Multigroup, a, b) -> bool:
    return g.op(a, b) == g.op(b, a)


def _op_nonempty(g: Multigroup, a, b) -> bool:
    return g.op(a, b) != 0


GROUP_AXIOMS: dict[str, tuple[int, Callable]] = {
    "nonempty": (2, _op_nonempty),
    "M1": (3, _m1),
    "M2": (2, _m2),
    "M3": (3, _m3),
    "M4": (2, _m4),
}

#: Checkable on demand, not part of any profile.
EXTRA_GROUP_AXIOMS: dict[str, tuple[int, Callable]] = {
    "M3_weak": (3, _m3_weak),
}


def _mul_strict(R: FiniteMultiring, a, b) -> bool:
    return bitset.is_singleton(R.mul[a][b])


def _mul_nonempty(R, a, b) -> bool:
    return R.mul[a][b] != 0


def _add_strict(R, a, b) -> bool:
    return bitset.is_singleton(R.add[a][b])


def _m5(R, a, b, c) -> bool:
    return R.prod_sets(R.mul[a][b], 1 << c) == R.prod_sets(1 << a, R.mul[b][c])


def _m6(R, a) -> bool:
    return R.mul[a][R.one] == 1 << a and R.mul[R.one][a] == 1 << a


def _m7(R, a, b) -> bool:
    return R.mul[a][b] == R.mul[b][a]


def _m8(R, a) -> bool:
    return R.mul[a][R.zero] == 1 << R.zero


def _m9(R, a, b, c) -> bool:
    return bitset.issubset(R.prod_sets(1 << c, R.add[a][b]), R.sum_sets(R.mul[c][a], R.mul[c][b]))


def _full_dist(R, a, b, c) -> bool:
    return R.prod_sets(1 << c, R.add[a][b]) == R.sum_sets(R.mul[c][a], R.mul[c][b])


def _sign_rule(R, a, b) -> bool:
    lhs = R.neg_set(R.mul[a][b])
    return lhs == R.mul[R.neg[a]][b] == R.mul[a][R.neg[b]]


def _nontrivial(R) -> bool:
    return R.zero != R.one


def _inverses(R, a) -> bool:
    return a == R.zero or any(bitset.contains(R.mul[a][b], R.one) for b in R.elements)


def _no_zero_divisors(R, a, b) -> bool:
    if not bitset.contains(R.mul[a][b], R.zero):
        return True
    return a == R.zero or b == R.zero


RING_AXIOMS: dict[str, tuple[int, Callable]] = {
    "mul_nonempty": (2, _mul_nonempty),
    "mul_strict": (2, _mul_strict),
    "add_strict": (2, _add_strict),
    "M5": (3, _m5),
    "M6": (1, _m6),
    "M7": (2, _m7),
    "M8": (1, _m8),
    "M9": (3, _m9),
    "full_distributivity": (3, _full_dist),
    "sign_rule": (2, _sign_rule),
    "nontrivial": (0, _nontrivial),
    "inverses": (1, _inverses),
    "no_zero_divisors": (2, _no_zero_divisors),
}

_GROUP = ["nonempty", "M1", "M2", "M3", "M4"]
_RING = _GROUP + ["mul_strict", "M5", "M6", "M7", "M8", "M9"]
_SUPER = _GROUP + ["mul_nonempty", "M5", "M6", "M7", "M8", "M9", "sign_rule"]

PROFILES: dict[str, list[str]] = {
    "multigroup": _GROUP,
    "multiring": _RING,
    "hyperring": _RING + ["full_distributivity"],
    "multidomain": _RING + ["nontrivial", "no_zero_divisors"],
    "multifield": _RING + ["nontrivial", "inverses"],
    "strict_multifield": _RING + ["nontrivial", "inverses", "add_strict"],
    "superring": _SUPER,
    "superdomain": _SUPER + ["nontrivial", "no_zero_divisors"],
    "superfield": _SUPER + ["nontrivial", "inverses"],
}


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    witness: tuple[int, ...] | None = None


@dataclass
class AxiomReport:
    structure: str
    profile: str
    results: list[AxiomResult] = field(default_factory=list)
    names: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "profile": self.profile,
            "passed": self.passed,
            "axioms": [
                {
                    "axiom": r.axiom,
                    "passed": r.passed,
                    "witness": None if r.witness is None else [self.names[e] for e in r.witness],
                }
                for r in self.results
            ],
        }

    def __str__(self) -> str:
        lines = [f"{self.structure} / {self.profile}: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.results:
            w = "" if r.witness is None else " witness (" + ", ".join(self.names[e] for e in r.witness) + ")"
            lines.append(f"  {r.axiom:22s} {'ok' if r.passed else 'FAILED'}{w}")
        return "\n".join(lines)


def _lookup(axiom: str) -> tuple[int, Callable, bool]:
    if axiom in GROUP_AXIOMS:
        return (*GROUP_AXIOMS[axiom], True)
    if axiom in EXTRA_GROUP_AXIOMS:
        return (*EXTRA_GROUP_AXIOMS[axiom], True)
    if axiom in RING_AXIOMS:
        return (*RING_AXIOMS[axiom], False)
    if axiom in SIGN_IDENTITIES:
        return (*SIGN_IDENTITIES[axiom], False)
    raise KeyError(f"unknown axiom {axiom!r}")


def _target(structure, group_level: bool):
    if group_level and isinstance(structure, FiniteMultiring):
        return structure.additive()
    if not group_level and not isinstance(structure, FiniteMultiring):
        raise TypeError("ring axioms need a FiniteMultiring")
    return structure


def check_axiom(structure, axiom: str) -> AxiomResult:
    arity, pred, group_level = _lookup(axiom)
    target = _target(structure, group_level)
    for tup in itertools.product(range(structure.size), repeat=arity):
        if not pred(target, *tup):
            return AxiomResult(axiom, False, tup)
    return AxiomResult(axiom, True)


def replay(structure, axiom: str, witness: Sequence[int]) -> bool:
    """Re-evaluate one axiom instance; ``False`` confirms a counterexample."""
    arity, pred, group_level = _lookup(axiom)
    if len(witness) != arity:
        raise ValueError(f"{axiom} takes {arity} elements")
    return pred(_target(structure, group_level), *witness)


def check_axioms(structure, profile: str) -> AxiomReport:
    """Check every axiom of ``profile`` by exhaustion over the carrier."""
    try:
        axioms = PROFILES[profile]
    except KeyError:
        raise KeyError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}") from None
    if isinstance(structure, Multigroup) and profile != "multigroup":
        raise TypeError("a bare multigroup can only be checked against the multigroup profile")
    report = AxiomReport(structure.name, profile, names=structure.names)
    for axiom in axioms:
        report.results.append(check_axiom(structure, axiom))
    return report


# ---------------------------------------------------------------------------
# Sign identities every multiring satisfies
# ---------------------------------------------------------------------------


def _neg_zero(R) -> bool:
    return R.neg[R.zero] == R.zero


def _neg_involution(R, x) -> bool:
    return R.neg[R.neg[x]] == x


def _neg_of_sum(R, x, y, z) -> bool:
    # z in x + y  <->  -z in -x + -y
    return bitset.contains(R.add[x][y], z) == bitset.contains(R.add[R.neg[x]][R.neg[y]], R.neg[z])


def _neg_of_product(R, x, y) -> bool:
    return R.neg_set(R.mul[x][y]) == R.mul[R.neg[x]][y] == R.mul[x][R.neg[y]]


SIGN_IDENTITIES: dict[str, tuple[int, Callable]] = {
    "neg_zero": (0, _neg_zero),
    "neg_involution": (1, _neg_involution),
    "neg_of_sum": (3, _neg_of_sum),
    "neg_of_product": (2, _neg_of_product),
}


def check_sign_identities(R: FiniteMultiring) -> AxiomReport:
    """Exhaustively check ``-0 = 0``, ``--x = x``, that negation commutes with
    sums, and the rule of signs for products."""
    report = AxiomReport(R.name, "sign identities", names=R.names)
    for axiom in SIGN_IDENTITIES:
        report.results.append(check_axiom(R, axiom))
    return report


# ---------------------------------------------------------------------------
# Characteristic
# ---------------------------------------------------------------------------


def characteristic(R: FiniteMultiring) -> int:
    """Least ``n >= 1`` with ``0 in 1 + ... + 1`` (n ones), or 0 if none.

    The partial sums form a deterministic sequence of subsets of a finite
    carrier, so once a subset repeats no new sum can ever appear.
    """
    partial = 1 << R.one
    seen = set()
    n = 1
    while partial not in seen:
        if bitset.contains(partial, R.zero):
            return n
        seen.add(partial)
        partial = R.sum_sets(partial, 1 << R.one)
        n += 1
    return 0


def characteristic_all(R: FiniteMultiring) -> int:
    """Least ``n >= 1`` with ``0 in a + ... + a`` (n terms) for every ``a``,
    or 0 if none; agrees with :func:`characteristic` on full 2-domains."""
    state = tuple(1 << a for a in R.elements)
    seen = set()
    n = 1
    while state not in seen:
        if all(bitset.contains(s, R.zero) for s in state):
            return n
        seen.add(state)
        state = tuple(R.sum_sets(s, 1 << a) for s, a in zip(state, R.elements))
        n += 1
    return 0


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdealInfo:
    is_ideal: bool
    generated: int
    is_prime: bool
    is_maximal: bool


def is_ideal(R: FiniteMultiring, S: int) -> bool:
    if S == 0:
        return False
    for a in bitset.elements(S):
        for b in bitset.elements(S):
            if not bitset.issubset(R.add[a][b], S):
                return False
        for r in R.elements:
            if not bitset.issubset(R.mul[r][a], S):
                return False
    return True


def generated_ideal(R: FiniteMultiring, S: int) -> int:
    """Least ideal containing ``S``: close under sums and carrier multiples."""
    ideal = S | (1 << R.zero)
    while True:
        grown = ideal
        for a in bitset.elements(ideal):
            for r in R.elements:
                grown |= R.mul[r][a]
            for b in bitset.elements(ideal):
                grown |= R.add[a][b]
        if grown == ideal:
            return ideal
        ideal = grown


def is_prime_ideal(R: FiniteMultiring, P: int) -> bool:
    if not is_ideal(R, P) or bitset.contains(P, R.one):
        return False
    for a in R.elements:
        for b in R.elements:
            if bitset.issubset(R.mul[a][b], P) and not (bitset.contains(P, a) or bitset.contains(P, b)):
                return False
    return True


def is_maximal_ideal(R: FiniteMultiring, M: int) -> bool:
    if not is_ideal(R, M) or M == R.full_mask:
        return False
    # Any ideal strictly above M contains some x outside M, hence <M, x>.
    return all(
        generated_ideal(R, M | (1 << x)) == R.full_mask
        for x in R.elements
        if not bitset.contains(M, x)
    )


def ideal_ops(R: FiniteMultiring, S: int) -> IdealInfo:
    """Whether ``S`` is an ideal, the ideal it generates, and whether that
    generated ideal is prime / maximal."""
    gen = generated_ideal(R, S)
    return IdealInfo(is_ideal(R, S), gen, is_prime_ideal(R, gen), is_maximal_ideal(R, gen))


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Morphism:
    source: FiniteMultiring
    target: FiniteMultiring
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.size:
            raise StructureError("morphism map must be total on the source carrier")
        if any(not 0 <= y < self.target.size for y in self.mapping):
            raise StructureError("morphism map leaves the target carrier")

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    def image(self, mask: int) -> int:
        return bitset.from_elements(self.mapping[a] for a in bitset.elements(mask))

    @classmethod
    def from_names(cls, source, target, pairs: dict[str, str]) -> "Morphism":
        return cls(source, target, tuple(target.element(pairs[x]) for x in source.names))


@dataclass(frozen=True)
class MorphismReport:
    is_morphism: bool
    is_strong: bool
    witness: tuple[str, tuple[int, ...]] | None = None


def check_morphism(f: Morphism) -> MorphismReport:
    """Check the morphism conditions (sums, negation, 0, products, 1) and,
    if they hold, strength: ``f(a+b) = f(a)+f(b)`` and ``f(ab) = f(a)f(b)``."""
    A, B = f.source, f.target
    for a in A.elements:
        for b in A.elements:
            for c in bitset.elements(A.add[a][b]):
                if not bitset.contains(B.add[f(a)][f(b)], f(c)):
                    return MorphismReport(False, False, ("add", (a, b, c)))
    for a in A.elements:
        if f(A.neg[a]) != B.neg[f(a)]:
            return MorphismReport(False, False, ("neg", (a,)))
    if f(A.zero) != B.zero:
        return MorphismReport(False, False, ("zero", ()))
    for a in A.elements:
        for b in A.elements:
            for c in bitset.elements(A.mul[a][b]):
                if not bitset.contains(B.mul[f(a)][f(b)], f(c)):
                    return MorphismReport(False, False, ("mul", (a, b, c)))
    if f(A.one) != B.one:
        return MorphismReport(False, False, ("one", ()))
    for a in A.elements:
        for b in A.elements:
            if f.image(A.add[a][b]) != B.add[f(a)][f(b)]:
                return MorphismReport(True, False, ("strong_add", (a, b)))
            if f.image(A.mul[a][b]) != B.mul[f(a)][f(b)]:
                return MorphismReport(True, False, ("strong_mul", (a, b)))
    return MorphismReport(True, True)


# ---------------------------------------------------------------------------
# Quotient multigroups
# ---------------------------------------------------------------------------


def _group_inverse(table: Sequence[Sequence[int]], e: int) -> list[int]:
    n = len(table)
    inv = []
    for a in range(n):
        found = [b for b in range(n) if table[a][b] == e]
        if len(found) != 1:
            raise StructureError("group table has no unique inverse")
        inv.append(found[0])
    return inv


def quotient_multigroup(
    table: Sequence[Sequence[int]],
    identity: int,
    S: Sequence[int] | set[int],
    names: Sequence[str] | None = None,
) -> tuple[Multigroup, list[int]]:
    """Quotient of a finite group by the transitive closure of
    ``a ~ b iff b * a^-1 in S``, with the inherited set-valued operation.

    Returns the multigroup and the class index of every group element.
    """
    n = len(table)
    names = list(names) if names is not None else [str(i) for i in range(n)]
    S = set(S)
    inv = _group_inverse(table, identity)
    if identity not in S:
        raise StructureError("S must contain the identity")
    if any(inv[s] not in S for s in S):
        raise StructureError("S must be closed under inverses")
    # reach[a] is the class mask of a; grow by relational composition.
    reach = [bitset.from_elements(b for b in range(n) if table[b][inv[a]] in S) for a in range(n)]
    while True:
        grown = [0] * n
        for a in range(n):
            acc = reach[a]
            for b in bitset.elements(reach[a]):
                acc |= reach[b]
            grown[a] = acc
        if grown == reach:
            break
        reach = grown
    classes: list[int] = []
    cls_of = [0] * n
    for a in range(n):
        if reach[a] not in classes:
            classes.append(reach[a])
        cls_of[a] = classes.index(reach[a])
    k = len(classes)
    op = [[0] * k for _ in range(k)]
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            for a in bitset.elements(ci):
                for b in bitset.elements(cj):
                    op[i][j] |= 1 << cls_of[table[a][b]]
    qinv = [0] * k
    for i, ci in enumerate(classes):
        targets = {cls_of[inv[a]] for a in bitset.elements(ci)}
        if len(targets) != 1:
            raise StructureError("inversion is not well defined on the classes")
        qinv[i] = targets.pop()
    qnames = tuple("[" + ",".join(names[a] for a in bitset.elements(c)) + "]" for c in classes)
    mg = Multigroup(
        "quotient", qnames, cls_of[identity], tuple(qinv), tuple(tuple(row) for row in op)
    )
    return mg, cls_of


def cyclic_group(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]
