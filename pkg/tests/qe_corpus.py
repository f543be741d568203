"""Shared corpora for the quantifier-elimination tests."""

import itertools
import random

from multialg.core import ONE, ZERO, Atom, Const, Var, add, mul, neg, sub
from multialg.parser import parse_formula
from multialg.qe import ONE_POLY, ZERO_POLY, FormalPoly, formal_add, formal_mul, var_poly

x, y, z = Var(0), Var(1), Var(2)

_HAND = [
    Atom(x, y),
    Atom(x, x),
    Atom(add(x, y), add(y, x)),
    Atom(mul(x, add(y, z)), z),
    Atom(z, mul(x, add(y, z))),
    Atom(mul(add(x, y), add(x, y)), z),
    Atom(ZERO, add(x, neg(x))),
    Atom(ONE, mul(x, y)),
    Atom(neg(add(x, y)), z),
    Atom(add(x, ONE), mul(add(y, ONE), add(z, x))),
    Atom(add(add(x, y), z), add(x, add(y, z))),
    Atom(mul(x, y), add(mul(x, y), ZERO)),
    Atom(ZERO, add(mul(x, x), ONE)),
    Atom(add(x, x), x),
    Atom(sub(x, y), sub(y, x)),
    Atom(mul(neg(x), y), neg(mul(x, y))),
    Atom(ZERO, mul(add(x, y), add(y, z))),
    Atom(add(mul(x, y), z), ONE),
    Atom(mul(add(x, ONE), add(x, neg(ONE))), add(mul(x, x), neg(ONE))),
    Atom(add(x, add(y, z)), mul(x, x)),
]


def _random_term(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([x, y, z, ZERO, ONE])
    op = rng.choice(["+", "+", "*", "-"])
    if op == "-":
        return neg(_random_term(rng, depth - 1))
    a, b = _random_term(rng, depth - 1), _random_term(rng, depth - 1)
    return add(a, b) if op == "+" else mul(a, b)


def reduction_corpus(n: int = 50, seed: int = 7) -> list[Atom]:
    """Hand-picked atoms followed by seeded random ones over x, y, z."""
    rng = random.Random(seed)
    out = list(_HAND)
    while len(out) < n:
        a = Atom(_random_term(rng, 3), _random_term(rng, 3))
        if a not in out:
            out.append(a)
    return out


PIPELINE_TEXTS = [
    "exists y. 0 in y - x",
    "forall y. exists z. y*z sub 1",
    "exists y. 0 in y & !(0 in y - 1)",
    "forall y. y sub x -> (exists z. z + z sub y)",
    "exists y. forall z. y*z sub z",
    "exists y. 0 in y*y + x*y + 1",
    "exists y. 0 in y*y - x & !(0 in y)",
    "forall y. 0 in y*y - x -> 0 in y - x",
    "exists y. 0 in x*y + 1 & 0 in y*y - y",
    "exists y. 0 in y - x & 0 in y*y - x",
    "forall x. exists y. 0 in x*y - 1 | 0 in x",
    "exists y. exists z. 0 in y*z - x & !(0 in y - z)",
    "forall y. forall z. y*z sub 0 -> y sub 0 | z sub 0",
    "exists y. x + y sub x",
    "exists y. y + y sub x & !(y sub x)",
    "x sub 1 <-> exists y. 0 in y*y - x",
    "!(exists y. 0 in y*y + 1)",
    "exists y. (x + y)*(x + y) sub x",
    "forall y. exists z. 0 in z*z*z + y*z + x",
    "exists y. 0 in y*y*y - x & 0 in y*y - x & 0 in y - 1",
    "exists y. !(0 in y*y*y + x*y) & !(0 in y + 1)",
    "forall y. (exists z. 0 in y - z*z) | 0 in y + x",
    "exists y. x*(y + 1) sub y",
    "exists y. y*y =s x",
    "forall x. forall y. x + y sub y + x",
    "exists y. 0 in x*y*y + y + 1",
    "exists y. 0 in x*y + 1 & !(0 in y*y - x)",
    "forall y. !(0 in y*y + x) | exists z. 0 in z - y",
    "exists y. (0 in y - x | 0 in y + x) & !(0 in y*y)",
    "forall y. exists z. !(0 in y*z) -> 0 in y + z",
]


def pipeline_corpus():
    return [parse_formula(t).formula for t in PIPELINE_TEXTS]


def y_polys(y: int, coeffs: list[FormalPoly], max_deg: int = 2) -> list[FormalPoly]:
    """Every polynomial ``sum c_j y^j`` with ``1 <= deg_Y <= max_deg`` and
    coefficients drawn from ``coeffs`` (the leading one nonzero)."""
    out = []
    for d in range(1, max_deg + 1):
        for cs in itertools.product(coeffs, repeat=d + 1):
            if cs[-1].is_zero:
                continue
            p = ZERO_POLY
            for j, c in enumerate(cs):
                p = formal_add(p, formal_mul(c, var_poly(y, j)) if j else c)
            out.append(p)
    return out


def atom_coefficients(x_vars: int, constants: list[str]) -> list[FormalPoly]:
    """Coefficient atoms: zero, the structure's nonzero constants, and
    each of the first ``x_vars`` variables."""
    from multialg.qe import const_poly

    out = [ZERO_POLY, ONE_POLY]
    out += [const_poly(c) for c in constants if c not in ("0", "1")]
    out += [var_poly(i) for i in range(x_vars)]
    return out
