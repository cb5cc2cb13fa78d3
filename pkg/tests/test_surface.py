from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dp4brauer.exactfield import FieldElement, normalize_point, sqrt_in_field
from dp4brauer.surface import (
    LABELS,
    LineLabel,
    NotSmooth,
    build_lines,
    closed_form_matrix,
    closed_form_meets,
    complexity,
    intersect,
    intersection_matrix,
    lies_on_surface,
    singular_fibres,
    validate,
)

from conftest import admissible

coeff = st.integers(-20, 20).filter(bool)
tuples = st.tuples(coeff, coeff, coeff, coeff, coeff).filter(admissible)


@pytest.mark.parametrize("a, d", [((1, 1, 1, -1, 1), 2), ((1, 1, -1, -4, 1), -3)])
def test_validate(a, d):
    assert validate(*a).d == d


@pytest.mark.parametrize("a, message", [((1, 1, 1, 1, 1), "not smooth: d = 0"),
                                        ((0, 1, 2, 3, 4), "not smooth: a0 = 0")])
def test_validate_rejects(a, message):
    with pytest.raises(NotSmooth, match=message):
        validate(*a)


def test_labels():
    assert len(LABELS) == 16
    assert str(LineLabel.parse("M3-")) == "M3-"
    assert LineLabel.parse("L1+").partner == LineLabel.parse("L1-")


def test_closed_form_rows():
    m = closed_form_matrix()
    assert all(sum(x for j, x in enumerate(row) if j != i) == 5 for i, row in enumerate(m))
    assert all(m[i][j] == m[j][i] for i in range(16) for j in range(16))
    L1p = LineLabel.parse("L1+")
    assert not closed_form_meets(L1p, LineLabel.parse("M3-"))
    assert not closed_form_meets(L1p, LineLabel.parse("L3+"))
    assert {str(q) for q in LABELS if q != L1p and closed_form_meets(L1p, q)} == {"L1-", "M1-", "M2+", "M3+", "M4+"}


def _s(q, basis):
    return sqrt_in_field(Fraction(q), basis)


@pytest.mark.parametrize("a", [(1, 1, 1, -1, 1), (3, -7, 5, 11, -2), (2, 3, -5, 7, 11)])
def test_displayed_line_data_and_points(a):
    a0, a1, a2, a3, a4 = a
    d = a0 * a1 - a2 * a3
    config = build_lines(a)
    B = config.basis
    one, zero = FieldElement.rational(B, 1), FieldElement(B)
    L1p = config["L1+"]
    assert L1p.c == -_s(Fraction(-a2, a0), B)
    assert L1p.e == _s(Fraction(d, -a0 * a4), B)
    assert intersect(L1p, config["L1-"]) == normalize_point([-_s(Fraction(-a2, a0), B), zero, one, zero, zero])
    assert intersect(L1p, config["L3+"]) is None
    # L1+ meets M2+ at (-sqrt(-a2/a0) : sqrt(-a0/a3) : 1 : x3 : sqrt(d/(a4 a3))); the displayed
    # x3 = sqrt(a2/a3) is fixed up to the branch of the product radical by x0 x1 = x2 x3
    p = intersect(L1p, config["M2+"])
    x0, x1 = -_s(Fraction(-a2, a0), B), _s(Fraction(-a0, a3), B)
    expected = normalize_point([x0, x1, one, x0 * x1, _s(Fraction(d, a4 * a3), B)])
    assert p == expected
    assert (x0 * x1) * (x0 * x1) == FieldElement.rational(B, Fraction(a2, a3))


def test_named_field_of_definition():
    config = build_lines((1, 1, -1, -4, 1))
    assert config.basis.radicals == (3,)
    assert config["L1+"].definition_degree == 2 and config["L1-"].definition_degree == 2


@settings(max_examples=25, deadline=None)
@given(tuples)
def test_lines_lie_on_surface_and_match_closed_form(a):
    config = build_lines(a)
    c = validate(*a)
    assert all(lies_on_surface(l, c) for l in config.lines)
    assert intersection_matrix(config) == closed_form_matrix()


@settings(max_examples=40, deadline=None)
@given(tuples)
def test_fibre_partners_share_c(a):
    config = build_lines(a, verify=False)
    for l in config.lines:
        partner = config[l.label.partner]
        assert l.c == partner.c and l.e == -partner.e
        p = intersect(l, partner)
        assert p is not None


def test_singular_fibres_examples():
    fib = singular_fibres((1, 1, 1, -1, 1), "pi1")
    assert [f.parameter_class for f in fib] == [-1, 1]
    assert [f.components for f in fib] == [(("L1+", "L1-"), ("L2+", "L2-")), (("L3+", "L3-"), ("L4+", "L4-"))]
    assert [f.parameter_class for f in singular_fibres((1, 1, -1, -4, 1), "pi1")] == [1, 1]
    assert complexity((1, 1, 1, -1, 1), "pi1") == 4


@settings(max_examples=40, deadline=None)
@given(tuples, st.sampled_from(["pi1", "pi2"]))
def test_complexity_bounded(a, bundle):
    assert 0 <= complexity(a, bundle) <= 4
    assert sum(len(f.components) for f in singular_fibres(a, bundle)) == 4
