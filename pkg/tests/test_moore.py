"""Moore determinants, product form, rank strata, codimension generators."""

import itertools
from math import comb

import pytest

from drinfeld.field import enumerate_field, frobenius_q, make_tower
from drinfeld.moore import (moore_degree, moore_det, moore_det_of,
                            moore_product, normalized_linear_forms,
                            stratum_of_point, verify_moore_identity,
                            verify_partial_identity, z_c_generators)
from drinfeld.mpoly import MPoly, evaluate

F2 = make_tower(2, 1, 1)
F3 = make_tower(3, 1, 1)
F4 = make_tower(2, 2, 1)


def test_moore_degree_table():
    assert moore_degree(2, 2) == 3
    assert moore_degree(2, 3) == 7
    assert moore_degree(3, 2) == 4
    assert moore_degree(4, 3) == 21


def test_two_variable_determinant_frozen():
    x = MPoly.variable(F2, 2, 0)
    y = MPoly.variable(F2, 2, 1)
    assert moore_det(F2, 2) == x * y**2 + x**2 * y
    x3 = MPoly.variable(F3, 2, 0)
    y3 = MPoly.variable(F3, 2, 1)
    assert moore_det(F3, 2) == x3 * y3**3 - x3**3 * y3


def test_determinant_is_homogeneous_of_known_degree():
    for tower, n in ((F2, 3), (F3, 2), (F4, 2)):
        d = moore_det(tower, n)
        want = sum(tower.q**i for i in range(n))
        assert {sum(e) for e in d.terms} == {want}


@pytest.mark.parametrize("tower,n", [(F2, 3), (F3, 2), (F4, 2)])
def test_normalized_forms_enumerate_dual_points(tower, n):
    forms = normalized_linear_forms(tower, n)
    assert len(forms) == (tower.q**n - 1) // (tower.q - 1)
    assert len(set(f.text() for f in forms)) == len(forms)
    for f in forms:
        coeffs = [f.terms.get(tuple(1 if v == k else 0 for v in range(n)),
                              tower.zero) for k in range(n)]
        last = max(k for k, c in enumerate(coeffs) if c)
        assert coeffs[last] == tower.one


def test_evaluation_agrees_with_field_level_determinant():
    # independent route: evaluate the polynomial vs compute the 2x2
    # determinant of Frobenius iterates directly in the field
    ext = make_tower(2, 2, 2)  # F_16 over F_4
    d = moore_det(F4, 2)
    elems = list(enumerate_field(ext))
    for a, b in itertools.product(elems[::3], elems[1::4]):
        lhs = evaluate(d, (a, b))
        rhs = a * frobenius_q(b, 1) - b * frobenius_q(a, 1)
        assert lhs == rhs


def test_moore_det_of_polynomial_arguments():
    x = MPoly.variable(F2, 2, 0)
    y = MPoly.variable(F2, 2, 1)
    # two arguments: det [[f, g], [f^q, g^q]]
    got = moore_det_of([x + y, y])
    want = (x + y) * y**2 + (x + y)**2 * y
    assert got == want


def test_product_form_matches_determinant_at_q3():
    assert moore_product(F3, 2) == moore_det(F3, 2)


def test_identity_checks_pass():
    r = verify_moore_identity(2, 2)
    assert r.status == "PASS"
    assert r.params == {"q": 2, "n": 2}
    assert verify_partial_identity(3, 2).status == "PASS"


def test_z_c_generator_count_degree_and_order():
    gens = z_c_generators(3, 2, tower=F2)
    assert len(gens) == comb(4, 1)
    for g in gens:
        assert {sum(e) for e in g.terms} == {7}
    # leaving out column 0 first: that generator does not involve x0
    assert all(e[0] == 0 for e in gens[0].terms)
    assert any(e[0] > 0 for e in gens[1].terms)


def test_z_1_is_the_full_moore_determinant():
    assert z_c_generators(2, 1, tower=F2)[0] == moore_det(F2, 3)
    with pytest.raises(ValueError):
        z_c_generators(2, 3, tower=F2)


def test_stratum_of_rational_and_generic_points():
    f8 = make_tower(2, 1, 3)
    one = f8.one
    g = f8.gen()
    assert stratum_of_point((one, f8.zero, f8.zero)) == 2
    assert stratum_of_point((one, g, g * g)) == 0
    f4 = make_tower(2, 1, 2)
    h = f4.gen()
    assert stratum_of_point((f4.one, h, f4.one + h)) == 1
    with pytest.raises(ValueError):
        stratum_of_point((f8.zero, f8.zero, f8.zero))


def test_stratum_agrees_with_generator_vanishing():
    f8 = make_tower(2, 1, 3)
    g = f8.gen()
    zgens = {c: z_c_generators(2, c, tower=F2) for c in (1, 2)}
    pts = [(f8.one, f8.zero, f8.zero), (f8.one, g, f8.zero),
           (f8.one, g, g * g), (f8.one, g, f8.one + g)]
    for pt in pts:
        s = stratum_of_point(pt)
        for c in (1, 2):
            vanish = all(not evaluate(z, pt) for z in zgens[c])
            assert vanish == (c <= s)
