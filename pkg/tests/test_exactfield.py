from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dp4brauer.exactfield import (
    FactorizationIncomplete,
    FieldElement,
    RadicalBasis,
    ZeroInput,
    apply_galois,
    fe_add,
    fe_inv,
    fe_is_zero,
    fe_mul,
    get_factor_bound,
    is_rational_square,
    is_square_in_quadratic,
    normalize_point,
    set_factor_bound,
    solve_linear,
    sqrt_in_field,
    squarefree_part,
)

nonzero_rationals = st.fractions(min_value=-10**4, max_value=10**4, max_denominator=500).filter(lambda q: q != 0)
BASIS = RadicalBasis([-1, 2, 3])


def elements(basis=BASIS):
    coeff = st.fractions(min_value=-50, max_value=50, max_denominator=20)
    return st.lists(coeff, min_size=basis.degree, max_size=basis.degree).map(
        lambda cs: FieldElement(basis, dict(enumerate(cs))))


@pytest.mark.parametrize("q, expected", [(18, 2), (Fraction(-4, 9), -1), (Fraction(12, 5), 15), (1, 1), (-1, -1)])
def test_squarefree_examples(q, expected):
    assert squarefree_part(q) == expected


def test_squarefree_zero():
    with pytest.raises(ZeroInput):
        squarefree_part(0)


def test_factor_bound_is_enforced():
    old = get_factor_bound()
    try:
        set_factor_bound(100)
        with pytest.raises(FactorizationIncomplete):
            squarefree_part(1009 * 1013)
        assert squarefree_part(1009 * 1009) == 1     # prime square is still detected after trial division
        assert squarefree_part(2 * 1009) == 2 * 1009  # prime cofactor is fine
    finally:
        set_factor_bound(old)


@given(nonzero_rationals, nonzero_rationals)
def test_squarefree_multiplicative(x, y):
    assert squarefree_part(x * y) == squarefree_part(squarefree_part(x) * squarefree_part(y))


@pytest.mark.parametrize("x, m, expected", [(2, 2, True), (-2, -1, False), (9, 5, True), (-3, -3, True), (6, 2, False)])
def test_is_square_in_quadratic(x, m, expected):
    assert is_square_in_quadratic(x, m) is expected


@settings(max_examples=1000)
@given(nonzero_rationals)
def test_square_in_trivial_extension_is_rational_square(x):
    import sympy

    num, den = sympy.Rational(x.numerator, x.denominator).as_numer_denom()
    plain = x > 0 and sympy.sqrt(num * den).is_Integer
    assert is_square_in_quadratic(x, 1) is bool(plain)
    assert is_rational_square(x) is bool(plain)


def test_adjoin():
    b = RadicalBasis([-1])
    assert b.adjoin(-1) == (b, frozenset({1}))
    bigger, idx = b.adjoin(2)
    assert bigger.radicals == (-1, 2) and idx == 2
    assert bigger.adjoin(-2) == (bigger, frozenset({1, 2}))
    assert bigger.adjoin(4) == (bigger, frozenset())


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        RadicalBasis([2, 3, 6])


def test_arithmetic_examples():
    b = RadicalBasis([2])
    r2 = FieldElement.radical(b, 1)
    assert fe_mul(r2, r2) == FieldElement.rational(b, 2)
    one_plus = FieldElement(b, {0: 1, 1: 1})
    assert fe_inv(one_plus) == FieldElement(b, {0: -1, 1: 1})
    assert fe_is_zero(fe_add(one_plus, -one_plus))


@settings(max_examples=60, deadline=None)
@given(elements())
def test_inverse(e):
    if fe_is_zero(e):
        with pytest.raises(ZeroDivisionError):
            fe_inv(e)
    else:
        assert fe_mul(fe_inv(e), e) == FieldElement.rational(BASIS, 1)


@settings(max_examples=60, deadline=None)
@given(elements(), elements())
def test_no_zero_divisors(x, y):
    if fe_is_zero(fe_mul(x, y)):
        assert fe_is_zero(x) or fe_is_zero(y)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), st.tuples(*[st.sampled_from((1, -1))] * 3))
def test_galois_is_ring_automorphism(x, y, signs):
    assert apply_galois(x + y, signs) == apply_galois(x, signs) + apply_galois(y, signs)
    assert apply_galois(x * y, signs) == apply_galois(x, signs) * apply_galois(y, signs)


def test_galois_examples():
    b = RadicalBasis([2])
    assert apply_galois(FieldElement.radical(b, 1), (-1,)) == -FieldElement.radical(b, 1)
    assert apply_galois(FieldElement.rational(b, 3), (-1,)) == FieldElement.rational(b, 3)
    b2 = RadicalBasis([2, -1])
    x = FieldElement(b2, {0: 1, 3: 1})
    assert apply_galois(x, (-1, -1)) == x


def test_sqrt_in_field():
    assert sqrt_in_field(4, RadicalBasis()) == FieldElement.rational(RadicalBasis(), 2)
    b = RadicalBasis([2])
    assert sqrt_in_field(8, b) == FieldElement.radical(b, 1, 2)
    assert sqrt_in_field(6, b) is None
    r = sqrt_in_field(Fraction(-3, 4), RadicalBasis([-3]))
    assert r * r == FieldElement.rational(RadicalBasis([-3]), Fraction(-3, 4))


def test_solve_linear():
    b = RadicalBasis([2])
    one, zero, r2 = (FieldElement.rational(b, 1), FieldElement(b), FieldElement.radical(b, 1))
    sol = solve_linear([[one, zero], [zero, one]], [one, r2])
    assert sol.dimension == 0 and sol.particular == (one, r2)
    assert solve_linear([[zero, zero]]).dimension == 2
    inconsistent = solve_linear([[one], [one]], [one, r2])
    assert inconsistent.particular is None


def test_normalize_point():
    b = RadicalBasis([2])
    r2 = FieldElement.radical(b, 1)
    p = normalize_point([FieldElement(b), r2, r2 * r2])
    assert p[0].is_zero() and p[1] == FieldElement.rational(b, 1) and p[2] == r2
