"""Moore determinants over F_q and the stratification they cut out.

The Moore matrix of w_1..w_n has entry w_j^(q^i) in row i (i = 0..n-1); its
determinant factors as the product of all nonzero linear forms whose last
nonzero coefficient is 1.  Partial derivatives reduce to q-th powers of
smaller Moore determinants.  Rank of the iterated-Frobenius matrix of a
point classifies which stratum the point lies on.
"""

from __future__ import annotations

import itertools

from .field import frobenius_q, make_tower, matrix_rank, tower_for_q
from .mpoly import MPoly, det_poly_matrix, partial
from .report import DEFAULT_BUDGET, CheckReport, FAIL, PASS

__checks__ = ["moore-identity", "moore-partial"]


def moore_degree(q: int, n: int) -> int:
    return (q**n - 1) // (q - 1)


def moore_matrix(tower, n_vars, cols, rows):
    """Matrix with entry x_(cols[j])^(q^i) for i in rows, as monomials."""
    q = tower.q
    out = []
    for i in rows:
        row = []
        for j in cols:
            exps = tuple(q**i if k == j else 0 for k in range(n_vars))
            row.append(MPoly.monomial(tower, n_vars, exps, tower.one))
        out.append(row)
    return out


def moore_det(tower, n: int) -> MPoly:
    """Moore determinant of n variables over F_q (q = tower.q)."""
    if n < 1:
        raise ValueError("need at least one variable")
    cols = list(range(n))
    return det_poly_matrix(moore_matrix(tower, n, cols, cols))


def moore_det_of(args) -> MPoly:
    """Moore determinant of arbitrary polynomial arguments.

    Row i holds the q^i-th powers of the arguments; the size is the number
    of arguments.
    """
    args = list(args)
    if not args:
        raise ValueError("need at least one argument")
    q = args[0].tower.q
    mat = [[a**(q**i) for a in args] for i in range(len(args))]
    return det_poly_matrix(mat)


def normalized_linear_forms(tower, n_vars: int):
    """All nonzero linear forms with last nonzero coefficient 1.

    One representative per point of the dual projective space:
    (q^n - 1)/(q - 1) forms, grouped by the index of that coefficient.
    """
    scalars = list(tower.enumerate())
    forms = []
    for top in range(n_vars):
        for lower in itertools.product(scalars, repeat=top):
            terms = {}
            for k, a in enumerate(lower):
                if a:
                    exps = tuple(1 if v == k else 0 for v in range(n_vars))
                    terms[exps] = a
            exps = tuple(1 if v == top else 0 for v in range(n_vars))
            terms[exps] = tower.one
            forms.append(MPoly(tower, n_vars, terms))
    return forms


def moore_product(tower, n: int) -> MPoly:
    """Product of all normalized linear forms in n variables."""
    acc = MPoly.one(tower, n)
    for form in normalized_linear_forms(tower, n):
        acc = acc * form
    return acc


def z_c_generators(n: int, c: int, tower=None):
    """Moore determinants of all (n+2-c)-subsets of x_0..x_n.

    These cut out the locus of points whose Frobenius orbit spans at most
    n+1-c dimensions.  Homogeneous of degree (q^(n+2-c) - 1)/(q - 1), one
    generator per (c-1)-subset left out, in lexicographic order of that
    subset.  c = 1 gives the single full Moore determinant.
    """
    if not 1 <= c <= n:
        raise ValueError(f"codimension {c} out of range for n={n}")
    if tower is None:
        raise ValueError("tower is required")
    size = n + 2 - c
    rows = list(range(size))
    gens = []
    for left_out in itertools.combinations(range(n + 1), c - 1):
        cols = [j for j in range(n + 1) if j not in left_out]
        gens.append(det_poly_matrix(moore_matrix(tower, n + 1, cols, rows)))
    return gens


def stratum_of_point(point) -> int:
    """n+1 minus the rank of the matrix of Frobenius iterates of the point.

    0 on the open locus where the Moore determinant is nonzero; c on the
    locally closed piece cut out by the codimension-c generators.
    """
    point = tuple(point)
    n_plus_1 = len(point)
    if all(not x for x in point):
        raise ValueError("the zero vector does not define a projective point")
    rows = [[frobenius_q(x, j) for x in point] for j in range(n_plus_1)]
    return n_plus_1 - matrix_rank(rows)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def verify_moore_identity(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """Moore determinant equals the product of normalized linear forms."""
    params = {"q": q, "n": n}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(moore_degree(q, n), "Moore determinant")
    det = moore_det(tower, n)
    prod = moore_product(tower, n)
    if det == prod:
        witness = {
            "degree": det.degree(),
            "monomials": len(det.terms),
            "linear_factors": (q**n - 1) // (q - 1),
        }
        return CheckReport("moore-identity", params, PASS, witness)
    diff = det - prod
    return CheckReport("moore-identity", params, FAIL,
                       {"difference": diff.text()})


def verify_partial_identity(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """d(Moore)/dw_i = (-1)^(i+1) * (Moore without w_i)^q, for every i."""
    params = {"q": q, "n": n}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(moore_degree(q, n), "Moore determinant")
    det = moore_det(tower, n)
    failures = []
    for i in range(n):
        got = partial(det, i)
        if n == 1:
            hat = MPoly.one(tower, n)
        else:
            cols = [j for j in range(n) if j != i]
            hat = det_poly_matrix(moore_matrix(tower, n, cols, range(n - 1)))
        expected = hat**q
        if i % 2:
            expected = -expected
        if got != expected:
            failures.append({"variable": i, "difference": (got - expected).text()})
    if failures:
        return CheckReport("moore-partial", params, FAIL, {"failures": failures})
    return CheckReport("moore-partial", params, PASS, {"variables_checked": n})
