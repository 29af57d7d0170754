"""Point, subspace, flag and stratum tallies over small fields."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drinfeld.counting import (flag_count, gaussian_binomial,
                               graph_closure_count, incidence_geometry,
                               normalize_point, omega_count,
                               projective_point_count, projective_points,
                               rational_subspaces, stratify_count,
                               subspace_count, subspace_points, verify_b2,
                               verify_flag_count, verify_strata_counts)
from drinfeld.field import make_tower
from drinfeld.report import ResourceBudgetError

F2 = make_tower(2, 1, 1)
F3 = make_tower(3, 1, 1)


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(4, 1, 2) == 15
    assert gaussian_binomial(4, 3, 2) == 15
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(4, 3, 3) == 40
    assert gaussian_binomial(3, 1, 5) == 31
    assert gaussian_binomial(2, 2, 7) == 1
    assert gaussian_binomial(2, 3, 7) == 0


@given(st.integers(1, 6), st.integers(0, 6), st.sampled_from([2, 3, 4]))
def test_gaussian_binomial_symmetry(n, k, q):
    assert gaussian_binomial(n, k, q) == gaussian_binomial(n, n - k, q)


def test_projective_point_counts():
    assert projective_point_count(2, 2) == 7
    assert projective_point_count(2, 8) == 73
    assert projective_point_count(3, 2) == 15
    assert projective_point_count(3, 3) == 40
    assert len(projective_points(F2, 2)) == 7
    f9 = make_tower(3, 1, 2)
    assert len(projective_points(f9, 3)) == projective_point_count(3, 9)


def test_projective_points_are_normalized_and_distinct():
    f4 = make_tower(2, 1, 2)
    pts = projective_points(f4, 2)
    assert len(pts) == 21
    assert len(set(pts)) == 21
    for pt in pts:
        last = next(x for x in reversed(pt) if x)
        assert last == f4.one
        assert normalize_point(pt) == pt


def test_rational_subspace_enumeration_matches_gaussian():
    # codim c subspaces of P^n over F_q, counted two ways
    for n, c, q in ((2, 1, 2), (2, 2, 2), (3, 2, 2), (3, 2, 3), (3, 3, 3)):
        tower = F2 if q == 2 else F3
        got = len(rational_subspaces(tower, n, c))
        assert got == subspace_count(n, n + 1 - c, q)


def test_subspace_points_of_a_rational_line():
    f4 = make_tower(2, 1, 2)
    lines = rational_subspaces(F2, 3, 2)
    assert len(lines) == 35
    pts = subspace_points(lines[0], f4)
    assert len(pts) == 5  # P^1(F_4)
    for pt in pts:
        assert len(pt) == 4


def test_incidence_geometry_of_the_smallest_plane():
    geo = incidence_geometry(2)
    assert len(geo.points) == 7
    assert len(geo.hyperplanes) == 7
    assert all(len(members) == 3 for members in geo.on_hyperplane)
    for i in range(7):
        assert len(geo.lines_through_point(i)) == 3
    # two distinct lines share exactly one point
    for i in range(7):
        for j in range(i + 1, 7):
            shared = geo.on_hyperplane[i] & geo.on_hyperplane[j]
            assert len(shared) == 1


def test_stratify_count_vectors_frozen():
    assert stratify_count(2, 2, 1) == [0, 0, 7]
    assert stratify_count(2, 2, 3) == [24, 42, 7]
    assert stratify_count(3, 2, 3) == [0, 360, 210, 15]
    assert stratify_count(3, 3, 2) == [0, 0, 780, 40]
    assert stratify_count(2, 3, 3) == [432, 312, 13]


def test_omega_count_and_totals():
    assert omega_count(2, 2, 3) == 24
    assert omega_count(2, 2, 2) == 0
    for n, q, m in ((2, 2, 3), (3, 2, 3), (2, 3, 2)):
        counts = stratify_count(n, q, m)
        assert sum(counts) == projective_point_count(n, q**m)


def test_strata_check_reports():
    r = verify_strata_counts(2, 2, 3)
    assert r.status == "PASS"
    assert r.witness == {"counts": [24, 42, 7], "points": 73, "omega": 24}
    assert verify_strata_counts(3, 3, 3).witness["counts"] == [0, 17280, 3120, 40]


def test_strata_check_respects_degree_budget():
    # n = 7 stays under the enumeration cap but its full minor has degree 255
    with pytest.raises(ResourceBudgetError):
        verify_strata_counts(7, 2, 1)


def test_flag_counts_frozen():
    assert flag_count(2, 1) == 21
    assert flag_count(2, 2) == 49
    assert flag_count(2, 3) == 129
    assert flag_count(3, 1) == 52
    assert graph_closure_count(2, 2) == 49
    assert graph_closure_count(3, 2) == 208


@pytest.mark.parametrize("q,m,expected",
                         [(2, 1, 21), (2, 2, 49), (2, 3, 129),
                          (3, 1, 52), (3, 2, 208)])
def test_flag_check_three_way_agreement(q, m, expected):
    r = verify_flag_count(q, m)
    assert r.status == "PASS"
    assert r.witness == {"flags": expected, "graph": expected,
                         "formula": expected}


def test_b2_values():
    r = verify_b2(2)
    assert r.status == "PASS"
    assert r.witness["points"] == 15 and r.witness["lines"] == 35
    assert r.witness["b2"] == 51
    assert r.witness["enumerated"] == {"points": 15, "lines": 35}
    r3 = verify_b2(3)
    assert r3.status == "PASS"
    assert r3.witness["b2"] == 1 + 40 + 130 == 171
