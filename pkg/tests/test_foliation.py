"""Vector fields on charts and cones, the unit polynomial, splitting forms."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drinfeld.field import make_tower
from drinfeld.foliation import (chart_form_coefficients, delta_cone,
                                expected_chart_field, h_poly, h_unit_exponent,
                                min_valuation, pullback_field,
                                required_form_orders, saito_log_tangent_check,
                                splitting_polynomial, theta_chart,
                                verify_bracket_identity, verify_chart_field,
                                verify_chart_field_all, verify_chart_form,
                                verify_h_identity, verify_p_closed,
                                verify_splitting)
from drinfeld.mpoly import MPoly, substitute

F2 = make_tower(2, 1, 1)
F3 = make_tower(3, 1, 1)


def test_h_poly_smallest_cases_frozen():
    s = MPoly.variable(F2, 1, 0)
    assert h_poly(F2, 1) == MPoly.one(F2, 1) + s
    t = MPoly.variable(F3, 1, 0)
    assert h_poly(F3, 1) == MPoly.one(F3, 1) - t * t


def test_h_poly_degree():
    # top Moore term pairs the largest argument degree with the largest
    # q-power; dividing out the monomial removes one level sum
    for tower, n in ((F2, 2), (F3, 2), (F2, 3)):
        q = tower.q
        want = (sum(j * q**j for j in range(1, n + 1))
                - sum((q**r - 1) // (q - 1) for r in range(1, n + 1)))
        assert h_poly(tower, n).degree() == want
    assert h_poly(F2, 2).degree() == 6
    assert h_poly(F3, 2).degree() == 16


def test_unit_exponent_parities():
    assert h_unit_exponent(2, 1) == 1
    assert h_unit_exponent(2, 2) == 0
    assert h_unit_exponent(3, 1) == 1
    assert h_unit_exponent(3, 2) == 1
    assert h_unit_exponent(3, 3) == 0
    assert h_unit_exponent(4, 2) == 0


def test_h_identity_unit_witness():
    r = verify_h_identity(3, 1)
    assert r.status == "PASS"
    assert r.witness["unit"] == -1
    r = verify_h_identity(3, 3)
    assert r.status == "PASS"
    assert r.witness["unit"] == 1
    r = verify_h_identity(2, 2)
    assert r.status == "PASS"
    assert r.witness["unit"] == 1


def test_theta_chart_and_delta_cone_shapes():
    th = theta_chart(F2, 2, 1)
    t0 = MPoly.variable(F2, 2, 0)
    t1 = MPoly.variable(F2, 2, 1)
    assert th.coeffs == (t0 * t0 + t0, t1 * t1 + t1)
    d = delta_cone(F3, 2, 2)
    assert len(d.coeffs) == 3
    assert d.coeffs[0] == MPoly.variable(F3, 3, 0)**9


def test_bracket_identity_passes():
    assert verify_bracket_identity(2, 2).status == "PASS"
    assert verify_bracket_identity(3, 2).status == "PASS"


def test_p_closed_passes():
    for p in (2, 3):
        r = verify_p_closed(p)
        assert r.status == "PASS"


def test_saito_criterion_passes():
    for q, n in ((2, 1), (2, 2), (3, 2)):
        assert saito_log_tangent_check(q, n).status == "PASS"


def test_expected_chart_field_frozen():
    d = expected_chart_field(2, 2, 1)
    s1 = MPoly.variable(F2, 2, 0)
    s2 = MPoly.variable(F2, 2, 1)
    assert d.coeffs == (s1 * s1 + s1, s1 * (s2 * s2 + s2))


def test_pullback_field_matches_displayed_form():
    for q, n, j in ((2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 2)):
        got = pullback_field(q, n, j)
        want = expected_chart_field(q, n, j)
        assert got.coeffs == want.coeffs


@given(st.lists(st.tuples(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                          st.booleans()), max_size=4))
def test_pullback_commutes_with_substitution(data):
    # transforming the field then applying it agrees with applying then
    # substituting: pulled(f o pi) = (theta f) o pi
    terms = {e: F2.one for e, keep in data if keep}
    f = MPoly(F2, 2, terms)
    theta = theta_chart(F2, 2, 1)
    pulled = pullback_field(2, 2, 1)
    s1 = MPoly.variable(F2, 2, 0)
    s2 = MPoly.variable(F2, 2, 1)
    images = [s1, s1 * s2]
    assert pulled.apply(substitute(f, images)) == substitute(theta.apply(f), images)


def test_required_orders_table():
    assert required_form_orders(2, 3) == {1: 4, 2: 2}
    assert required_form_orders(3, 2) == {1: 2}


def test_min_valuation():
    s1 = MPoly.variable(F2, 2, 0)
    s2 = MPoly.variable(F2, 2, 1)
    assert min_valuation([s1 * s1 * s2, s1 * s1 * s1], 0) == 2
    assert min_valuation([s1 + s2], 1) == 0
    with pytest.raises(ValueError):
        min_valuation([MPoly.zero(F2, 2)], 0)


def test_chart_form_and_field_checks_pass():
    assert verify_chart_form(2, 2).status == "PASS"
    r = verify_chart_field(2, 2, 1)
    assert r.status == "PASS"
    r_all = verify_chart_field_all(2, 2)
    assert r_all.status == "PASS"
    assert r_all.witness["fields_checked"] == 2


def test_chart_form_coefficient_count():
    assert len(chart_form_coefficients(F2, 3)) == 3


def test_splitting_none_at_q2():
    f, w = splitting_polynomial(2)
    assert f is None
    assert w == {"exists": False, "candidates_checked": 64, "points": 7}
    r = verify_splitting(2)
    assert r.status == "PASS"


def test_splitting_constructed_for_larger_fields():
    f, w = splitting_polynomial(3)
    assert w["exists"] and w["degree"] == 6 and w["norm_degree"] == 3
    assert w["verified_vectors"] == 26
    f4, w4 = splitting_polynomial(4)
    assert w4["exists"] and w4["degree"] == 12
    assert verify_splitting(3).status == "PASS"
