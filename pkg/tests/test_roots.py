from fractions import Fraction

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from anharmonic.roots import (
    cauchy_bound,
    certify,
    primitive,
    real_roots,
    refine_root,
    sign_variations,
    squarefree_factors,
    sturm_chain,
)


def from_roots(roots, extra=()):
    """Coefficients (constant first) of prod (x - r) * extra, exact."""
    x = sp.Symbol("x")
    expr = sp.Integer(1)
    for r in roots:
        expr *= x - sp.Rational(r.numerator, r.denominator)
    for f in extra:
        expr *= f(x)
    coeffs = sp.Poly(sp.expand(expr), x).all_coeffs()[::-1]
    return [mpq(int(c.p), int(c.q)) for c in coeffs]


def test_primitive_keeps_sign():
    assert primitive([mpq(1, 2), mpq(-3, 4)]) == [2, -3]
    assert primitive([-4, 0, 6]) == [-2, 0, 3]
    assert primitive([0, 0]) == []


def test_cauchy_bound_covers_roots():
    c = [-6, 11, -6, 1]  # roots 1, 2, 3
    B = cauchy_bound(c)
    assert B >= 3
    chain = sturm_chain(c)
    assert sign_variations(chain, -B) - sign_variations(chain, B) == 3
    assert sign_variations(chain, "-inf") - sign_variations(chain, "+inf") == 3


def test_exact_rational_root_is_hit():
    roots = real_roots([-6, 4])
    assert len(roots) == 1 and roots[0].exact == mpq(3, 2)


def test_no_real_roots():
    assert real_roots([1, 0, 1]) == []
    assert real_roots([5]) == []


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        real_roots([0])


def test_multiplicities():
    c = from_roots([Fraction(1), Fraction(1), Fraction(-2), Fraction(-2), Fraction(-2), Fraction(1, 3)])
    roots = real_roots(c, 20)
    got = [(float(r), r.multiplicity) for r in roots]
    assert got == [(pytest.approx(-2.0), 3), (pytest.approx(1 / 3), 1), (pytest.approx(1.0), 2)]
    assert sorted(m for _, m in squarefree_factors(c)) == [1, 2, 3]


def test_irrational_roots_refined():
    roots = real_roots([-2, 0, 1], 50)  # +-sqrt(2)
    assert len(roots) == 2
    for r in roots:
        assert certify([-2, 0, 1], r)
        assert r.hi - r.lo < mpq(1, 10**50)
    assert abs(float(roots[1]) - 2**0.5) < 1e-15


def test_refine_root_tightens():
    c = [-3, 0, 0, 1]
    (r,) = real_roots(c, 10)
    tight = refine_root(c, r, 60)
    assert tight.lo >= r.lo and tight.hi <= r.hi
    assert tight.hi - tight.lo < mpq(1, 10**60)


def test_positive_only():
    c = from_roots([Fraction(-5), Fraction(-1, 7), Fraction(2, 9), Fraction(4)])
    pos = real_roots(c, 20, positive_only=True)
    assert len(pos) == 2
    assert pos[0].lo <= mpq(2, 9) <= pos[0].hi
    assert pos[1].exact == 4  # dyadic roots land on a bisection point


def test_close_roots_separated():
    eps = Fraction(1, 10**12)
    c = from_roots([Fraction(1), 1 + eps, Fraction(2)])
    roots = real_roots(c, 20)
    assert len(roots) == 3
    assert roots[0].hi <= roots[1].lo


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=30), min_size=1, max_size=7, unique=True),
    st.integers(0, 2),
)
def test_random_rational_roots_recovered(rs, quadratics):
    # real roots from linear factors; x**2 + k + 1 factors add none
    extra = [lambda x, k=k: x**2 + k + 1 for k in range(quadratics)]
    c = from_roots(rs, extra)
    roots = real_roots(c, 25)
    assert len(roots) == len(rs)
    for r, expected in zip(roots, sorted(rs)):
        assert r.lo <= mpq(expected.numerator, expected.denominator) <= r.hi
        assert certify(c, r)
