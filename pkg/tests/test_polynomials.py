import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multialg import bitset
from multialg.axioms import Morphism
from multialg.polynomials import (
    DivisionWitness,
    MultiPoly,
    PolySet,
    PolySyntaxError,
    all_polys,
    check_2domain_poly,
    divides_power,
    euclid_divide,
    evaluate,
    finite_product,
    finite_sum,
    format_poly,
    h_evaluate,
    is_algebraically_closed_upto,
    parse_poly,
    poly_add_set,
    poly_mul_set,
    polyset_contains,
    roots,
    verify_division,
)
from multialg.structures import hp, kaleidoscope, krasner, signs, zmod

K, Q, H3 = krasner(), signs(), hp(3)


def P(R, text):
    return parse_poly(R, text)


def members(R, ps: PolySet):
    """Every polynomial in a PolySet, by brute force."""
    cells = [list(bitset.elements(c)) for c in ps.cells]
    for coeffs in itertools.product(*cells):
        yield MultiPoly(coeffs, R.zero)


# Finite sums and products ----------------------------------------------------


def test_finite_sum_examples():
    assert finite_sum(Q, []) == 1 << Q.zero
    assert finite_product(Q, []) == 1 << Q.one
    assert finite_sum(K, [1, 1]) == 0b11
    assert finite_sum(K, [1, 1, 1]) == 0b11


@pytest.mark.parametrize("R", [K, Q, H3, kaleidoscope(2)], ids=lambda R: R.name)
def test_finite_sum_order_independent(R):
    for elems in itertools.product(R.elements, repeat=3):
        values = {finite_sum(R, list(p)) for p in itertools.permutations(elems)}
        assert len(values) == 1


# Degrees, sums, products -----------------------------------------------------


def test_degree_convention():
    assert MultiPoly((), 0).deg == 0
    assert MultiPoly((1,), 0).deg == 1
    assert MultiPoly((0, 1, 0, 0), 0).deg == 2
    assert P(K, "X^2").deg == 3


def test_sum_and_product_cells():
    one = P(K, "1")
    assert poly_add_set(K, one, one).cells == (0b11,)
    a = P(Q, "1 + -1*X")
    assert poly_add_set(Q, a, MultiPoly((), Q.zero)).cells == tuple(1 << c for c in a.coeffs)
    sq = poly_mul_set(K, P(K, "1 + X"), P(K, "1 + X"))
    assert sq.cells == (0b10, 0b11, 0b10)


def test_polyset_membership():
    sq = poly_mul_set(K, P(K, "1 + X"), P(K, "1 + X"))
    assert polyset_contains(sq, P(K, "1 + X^2"))
    assert polyset_contains(sq, P(K, "1 + X + X^2"))
    assert not polyset_contains(sq, P(K, "X^2"))
    assert not polyset_contains(sq, P(K, "1 + X + X^2 + X^3"))
    for text in ("1", "X", "1 + -1*X^2", "-1 + X"):
        a = P(Q, text)
        neg = MultiPoly(tuple(Q.neg[c] for c in a.coeffs), Q.zero)
        assert polyset_contains(poly_add_set(Q, a, neg), MultiPoly((), Q.zero))


def _oracle_product(R, a, b):
    """Products by the defining rule: c_n in a_0 b_n + ... + a_n b_0, all n."""
    n = a.deg + b.deg
    out = set()
    for coeffs in itertools.product(R.elements, repeat=max(n - 1, 0)):
        c = MultiPoly(coeffs, R.zero)
        ok = True
        for k in range(max(n - 1, 0)):
            terms = [R.mul[a.coeff(i)][b.coeff(k - i)] for i in range(k + 1)]
            total = 1 << R.zero
            for t in terms:
                total = R.sum_sets(total, t)
            if not bitset.contains(total, c.coeff(k)):
                ok = False
                break
        if ok:
            out.add(c)
    return out


@pytest.mark.parametrize("R", [K, Q, H3], ids=lambda R: R.name)
def test_product_matches_definition(R):
    polys = list(all_polys(R, 1))
    for a, b in itertools.product(polys, repeat=2):
        ps = poly_mul_set(R, a, b)
        assert set(members(R, ps)) == _oracle_product(R, a, b)


@pytest.mark.parametrize("R", [K, Q, H3, zmod(5)], ids=lambda R: R.name)
def test_constants_embed_strongly(R):
    for a, b in itertools.product(R.elements, repeat=2):
        pa, pb = MultiPoly((a,), R.zero), MultiPoly((b,), R.zero)
        assert poly_add_set(R, pa, pb).cell(0) == R.add[a][b]
        assert poly_mul_set(R, pa, pb).cell(0) == R.mul[a][b]


@pytest.mark.parametrize("R", [K, Q, H3], ids=lambda R: R.name)
def test_monomial_laws(R):
    for n, m in itertools.product(range(3), repeat=2):
        xn = MultiPoly((R.zero,) * n + (R.one,), R.zero)
        xm = MultiPoly((R.zero,) * m + (R.one,), R.zero)
        prod = poly_mul_set(R, xn, xm)
        assert prod == PolySet.singleton(MultiPoly((R.zero,) * (n + m) + (R.one,), R.zero))
        for a in R.elements:
            axn = poly_mul_set(R, MultiPoly((a,), R.zero), xn)
            assert axn == PolySet.singleton(MultiPoly((R.zero,) * n + (a,), R.zero))


def test_zmod_matches_textbook_arithmetic():
    Z = zmod(5)
    rng = random.Random(5)
    for _ in range(50):
        a = [rng.randrange(5) for _ in range(rng.randrange(4))]
        b = [rng.randrange(5) for _ in range(rng.randrange(4))]
        pa, pb = MultiPoly(tuple(a), 0), MultiPoly(tuple(b), 0)
        prod = poly_mul_set(Z, pa, pb)
        assert all(bitset.is_singleton(c) for c in prod.cells)
        want = [0] * (len(a) + len(b))
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                want[i + j] = (want[i + j] + x * y) % 5
        assert [bitset.only(c) for c in prod.cells] == list(MultiPoly(tuple(want), 0).coeffs)


# Evaluation and roots --------------------------------------------------------


def _direct_eval(R, p, alpha):
    # Sum the monomials a_i * alpha^i in the reverse order.
    vals = []
    for i, c in enumerate(p.coeffs):
        v = 1 << c
        for _ in range(i):
            v = R.prod_sets(v, 1 << alpha)
        vals.append(v)
    out = 1 << R.zero
    for v in reversed(vals):
        out = R.sum_sets(out, v)
    return out


def test_evaluation_examples():
    assert evaluate(Q, P(Q, "-1"), Q.element("1")) == 1 << Q.element("-1")
    assert evaluate(K, P(K, "1 + X"), 1) == 0b11
    assert Q.subset_names(evaluate(Q, P(Q, "1 + X^2"), Q.element("-1"))) == ["1"]


@pytest.mark.parametrize("R", [K, Q, H3, hp(5)], ids=lambda R: R.name)
def test_evaluation_matches_direct_expansion(R):
    for p in all_polys(R, 2):
        for a in R.elements:
            assert evaluate(R, p, a) == _direct_eval(R, p, a)
            assert (a in roots(R, p)) == bitset.contains(evaluate(R, p, a), R.zero)


def test_h_evaluation():
    f = Morphism.from_names(Q, K, {"-1": "1", "0": "0", "1": "1"})
    p = P(Q, "-1 + X^2")
    assert h_evaluate(f, p, 1) == evaluate(K, P(K, "1 + X^2"), 1)


def test_roots_examples():
    for p in all_polys(K, 3):
        nonzero = sum(1 for c in p.coeffs if c != K.zero)
        if nonzero >= 2:
            assert 1 in roots(K, p)
            assert evaluate(K, p, 1) == K.full_mask
        elif p.deg >= 2:
            # A single monomial a X^n only vanishes at 0.
            assert roots(K, p) == (0,)
    Z = zmod(5)
    assert roots(Z, P(Z, "4 + X^2")) == (1, 4)
    assert [Q.names[a] for a in roots(Q, P(Q, "1 + X"))] == ["-1"]
    assert roots(Z, P(Z, "1 + X + X^2")) == ()


def test_closedness():
    assert is_algebraically_closed_upto(K, 5).closed
    res = is_algebraically_closed_upto(zmod(5), 2)
    assert not res.closed and res.witness.deg == 3 and roots(zmod(5), res.witness) == ()
    assert is_algebraically_closed_upto(Q, 1).closed
    with pytest.raises(ValueError):
        is_algebraically_closed_upto(K, 0)


# Euclidean division ----------------------------------------------------------


def test_division_examples():
    a, b = P(K, "1"), P(K, "1 + X")
    w = euclid_divide(K, a, b)
    assert w.q.is_zero and w.r == a
    Z = zmod(5)
    w = euclid_divide(Z, P(Z, "3"), P(Z, "2"))
    assert format_poly(Z, w.q) == "4" and w.r.is_zero
    w = euclid_divide(K, P(K, "X^2"), P(K, "1 + X"))
    assert verify_division(K, P(K, "X^2"), P(K, "1 + X"), w)
    with pytest.raises(ZeroDivisionError):
        euclid_divide(K, a, MultiPoly((), 0))


def _brute_force_division_exists(R, a, b):
    qs = [MultiPoly((), R.zero)] + list(all_polys(R, max(a.deg - 1, 0), nonzero=True))
    rs = [MultiPoly((), R.zero)] + (list(all_polys(R, b.deg - 2, nonzero=True)) if b.deg >= 2 else [])
    for q in qs:
        cells = poly_mul_set(R, q, b)
        for r in rs:
            n = max(len(cells.cells), r.deg, a.deg)
            if all(bitset.contains(R.sum_sets(cells.cell(i), 1 << r.coeff(i)), a.coeff(i)) for i in range(n)):
                return True
    return False


def test_division_oracle_over_k():
    for a in all_polys(K, 2):
        for b in all_polys(K, 1, nonzero=True):
            w = euclid_divide(K, a, b)
            assert verify_division(K, a, b, w)
            assert _brute_force_division_exists(K, a, b)


def test_tampered_witness_fails_replay():
    a, b = P(H3, "1 + 2*X + X^3"), P(H3, "2 + X")
    w = euclid_divide(H3, a, b)
    assert verify_division(H3, a, b, w)
    bad = DivisionWitness(w.q, P(H3, "1 + X"), w.certificate)
    assert not verify_division(H3, a, b, bad)


@pytest.mark.parametrize("R", [K, Q, H3, hp(5), zmod(5)], ids=lambda R: R.name)
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_division_always_replays(R, data):
    coeff = st.sampled_from(list(R.elements))
    a = MultiPoly(tuple(data.draw(st.lists(coeff, max_size=5))), R.zero)
    b = MultiPoly(tuple(data.draw(st.lists(coeff, min_size=1, max_size=5))), R.zero)
    if b.is_zero:
        return
    w = euclid_divide(R, a, b)
    assert verify_division(R, a, b, w)
    assert w.r.is_zero or w.r.deg < b.deg


def test_division_falls_back_to_search_without_inverses():
    # In Z/6 the leading coefficient 2 has no inverse, yet 2X + 4 = 2 * (X + 2).
    Z = zmod(6)
    a, b = P(Z, "4 + 2*X"), P(Z, "2")
    w = euclid_divide(Z, a, b)
    assert w.method == "search" and verify_division(Z, a, b, w)


# Divisibility and the 2-domain transfer --------------------------------------


def test_divides_power():
    g = P(K, "1 + X")
    assert divides_power(K, g, g, 1)
    assert divides_power(K, P(K, "1 + X"), g, 2)
    Z = zmod(5)
    assert not divides_power(Z, P(Z, "2 + X^2"), P(Z, "X"), 2)
    assert divides_power(Z, P(Z, "X"), P(Z, "X"), 2)


def test_two_domain_transfer():
    for R in (K, Q, H3):
        assert check_2domain_poly(R, 2).holds
    res = check_2domain_poly(zmod(6), 0)
    assert not res.holds
    a, b = res.witness
    assert (a.coeffs, b.coeffs) == ((2,), (3,))
    assert not check_2domain_poly(zmod(6), 1).holds


# Text syntax -----------------------------------------------------------------


def test_parse_and_format():
    Z = zmod(5)
    p = P(Z, "3 + 2*X + X^2")
    assert p.coeffs == (3, 2, 1)
    assert format_poly(Z, p) == "3 + 2*X + X^2"
    assert format_poly(Z, P(Z, "X^3 + 1")) == "1 + X^3"
    assert format_poly(Z, MultiPoly((), 0)) == "0"
    assert format_poly(Q, P(Q, "-1*X + 1")) == "1 + -1*X"


@pytest.mark.parametrize("bad", ["1 + + X", "7*X", "X + X", "2**X"])
def test_parse_errors(bad):
    with pytest.raises(PolySyntaxError):
        parse_poly(zmod(5), bad)


@pytest.mark.parametrize("R", [K, Q, H3, zmod(5)], ids=lambda R: R.name)
def test_format_parse_round_trip(R):
    for p in all_polys(R, 2):
        assert parse_poly(R, format_poly(R, p)) == p
