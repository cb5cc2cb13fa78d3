from fractions import Fraction

import pytest
import sympy

from conftest import random_admissible
from dp4brauer import (
    InapplicableTrivialBrauer,
    MixedConfiguration,
    TypeCheckFailed,
    brauer_presentations,
    build_lines,
    build_pencil,
    classify_formula,
    contr_I4,
    elliptic_model,
    fibre_type_check,
    height,
    mw_report,
    projection_height,
    verticality,
)
from dp4brauer.fibration import SECTIONS, contr_In, torsion_order

NONTRIVIAL = [(1, 1, 1, -1, 1), (1, 1, -1, -4, 1)]


@pytest.fixture(scope="module")
def models():
    return {a: elliptic_model(build_pencil(build_lines(a))) for a in NONTRIVIAL}


def test_contr_values():
    assert contr_I4(2, 2) == 1
    assert contr_I4(1, 3) == Fraction(1, 4)
    assert contr_I4(1, 1) == Fraction(3, 4)
    assert contr_I4(1, 2) == Fraction(1, 2)
    assert all(contr_I4(0, j) == 0 for j in range(4))
    assert contr_In(2, 1, 1) == Fraction(1, 2)


def test_contr_matches_inverse_cartan():
    # contr_n(i, j) is the (i, j) entry of the inverse of the A_{n-1} Cartan matrix
    for n in (2, 3, 4, 5):
        C = sympy.Matrix(n - 1, n - 1, lambda i, j: 2 if i == j else -1 if abs(i - j) == 1 else 0)
        inv = C.inv()
        for i in range(1, n):
            for j in range(1, n):
                assert contr_In(n, i, j) == Fraction(str(inv[i - 1, j - 1]))


def test_pencil_base_points(models):
    p = models[(1, 1, 1, -1, 1)].pencil
    assert [bp.field for bp in p.base_points] == [[-1]] * 4
    assert p.to_dict()["galois_stable"]
    q = models[(1, 1, -1, -4, 1)].pencil
    assert all(bp.rational for bp in q.base_points)


def test_F_and_Fprime_are_I4(models):
    for m in models.values():
        i4 = [f for f in m.fibres if f.kodaira == "I4"]
        assert len(i4) == 2
        assert {c.name for c in i4[0].components} | {c.name for c in i4[1].components} == {
            "L1+", "L2+", "M3+", "M4+", "L1-", "L2-", "M3-", "M4-"}


def test_theta_labels(models):
    th = models[(1, 1, 1, -1, 1)].theta_labels()
    assert th["Theta_{0,1}"] == "L1+" and th["Theta_{2,1}"] == "L2+"
    assert th["Theta_{0,2}"] == "L1-" and th["Theta_{2,2}"] == "L2-"


def test_hyperplane_x3_section_splits():
    # independent of the minor computation: on x3 = 0 the quadric x0 x1 = x2 x3 becomes x0 x1 = 0
    x0, x1, x2, x4 = sympy.symbols("x0 x1 x2 x4")
    for a in NONTRIVIAL:
        q = a[0] * x0**2 + a[1] * x1**2 + a[2] * x2**2 + a[4] * x4**2
        for sub in ({x0: 0}, {x1: 0}):
            conic = sympy.Poly(q.subs(sub), *(set((x0, x1, x2, x4)) - set(sub)))
            assert len(sympy.factor_list(conic.as_expr())[1]) == 1   # irreducible conic
    # so the member at t = 0 is two conics and the pencil has a third reducible fibre


def test_fibre_type_check_reports_extra_fibre(models):
    for m in models.values():
        with pytest.raises(TypeCheckFailed) as err:
            fibre_type_check(m)
        assert err.value.found == ["I4", "I4", "I2"]


def test_h_E2_is_zero_and_heights_agree(models):
    for m in models.values():
        assert height(m, "E2") == 0
        for i, P in enumerate(SECTIONS):
            for Q in SECTIONS[i:]:
                assert height(m, P, Q) == projection_height(m, P, Q), (P, Q)


def test_torsion_orders(models):
    for m in models.values():
        assert torsion_order(m, "E2") == 2
        assert torsion_order(m, "E1") == 1


def test_mw_report_fields():
    r = mw_report((1, 1, -1, -4, 1))
    assert r.full_rank_fields == ((3,),)
    assert r.geometric_rank == 1 and r.rank_over_Q == 0
    assert r.shioda_tate == "10 = 2 + 3 + 3 + 1 + 1"
    assert mw_report((1, 1, 1, -1, 1)).full_rank_fields == ((-2,),)


def test_mw_report_rejects_trivial_brauer():
    with pytest.raises(InapplicableTrivialBrauer):
        mw_report((1, 1, 2, -1, -3))


def test_verticality(models):
    m = models[(1, 1, 1, -1, 1)]
    verdicts = []
    for p in brauer_presentations(m.config):
        try:
            verdicts.append(verticality(p, m.pencil))
        except MixedConfiguration:
            verdicts.append("mixed")
    assert sorted(verdicts) == ["horizontal", "mixed", "mixed", "vertical"]


def test_heights_zero_on_random_nontrivial_surfaces():
    found = 0
    for a in random_admissible(40, bound=8, seed=11):
        if classify_formula(a).order == 1:
            continue
        try:
            m = elliptic_model(build_pencil(build_lines(a)))
        except Exception:
            continue
        assert height(m, "E2") == projection_height(m, "E2") == 0
        found += 1
        if found == 3:
            break
    assert found == 3
