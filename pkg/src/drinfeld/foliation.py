"""Vector fields attached to q-power maps and their chart geometry.

Two models of the same fields: on the affine chart, theta_i sends t_k to
t_k^(q^i) - t_k; on the cone, delta_i sends x_k to x_k^(q^i).  Verified
here: the bracket identity, p-closedness of the chart field, the
determinant criterion identifying the log-tangent fields of the rational
hyperplane arrangement, the factorization identity for the arrangement
polynomial in iterated-blow-up coordinates, pullbacks of the 1-form and of
the fields through the monomial substitution t_i = s_1...s_i, and the
existence dichotomy for a splitting form that is 1 on all nonzero rational
vectors.
"""

from __future__ import annotations

import itertools

from .field import make_tower, norm_form, tower_for_q
from .moore import (moore_degree, moore_det, moore_det_of,
                    normalized_linear_forms)
from .mpoly import (Derivation, DivisibilityError, MPoly, det_poly_matrix,
                    evaluate, exact_divide, substitute)
from .report import DEFAULT_BUDGET, CheckReport, FAIL, PASS

__checks__ = ["foliation-bracket", "foliation-pclosed", "foliation-saito",
              "foliation-h-identity", "foliation-chart-form",
              "foliation-chart-field", "foliation-splitting"]


def theta_chart(tower, n: int, i: int) -> Derivation:
    """Chart field: t_k -> t_k^(q^i) - t_k for k = 1..n."""
    q = tower.q
    coeffs = []
    for k in range(n):
        t = MPoly.variable(tower, n, k)
        coeffs.append(t**(q**i) - t)
    return Derivation(tuple(coeffs))


def delta_cone(tower, n: int, i: int) -> Derivation:
    """Cone field: x_k -> x_k^(q^i) for k = 0..n."""
    q = tower.q
    coeffs = []
    for k in range(n + 1):
        x = MPoly.variable(tower, n + 1, k)
        coeffs.append(x**(q**i))
    return Derivation(tuple(coeffs))


# ---------------------------------------------------------------------------
# bracket / p-power
# ---------------------------------------------------------------------------

def verify_bracket_identity(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """[theta_i, theta_j] = theta_j - theta_i on the chart, all 1 <= i < j <= n."""
    params = {"n": n, "q": q}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(q**n, "chart field coefficients")
    thetas = {i: theta_chart(tower, n, i) for i in range(1, n + 1)}
    bad = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        got = thetas[i].bracket(thetas[j])
        want = thetas[j] - thetas[i]
        if got.coeffs != want.coeffs:
            bad.append({"i": i, "j": j,
                        "bracket": [c.text() for c in got.coeffs]})
    if bad:
        return CheckReport("foliation-bracket", params, FAIL, {"mismatches": bad})
    return CheckReport("foliation-bracket", params, PASS,
                       {"pairs_checked": n * (n - 1) // 2})


def verify_p_closed(q: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """The chart field with coefficients t_k^q - t_k satisfies D^[p] = D.

    Checked by p-fold application on every variable, for charts of
    dimension 1..3.  Works verbatim for q = p^e with e > 1 as well; the
    report records p, e and q.
    """
    tower = tower_for_q(q, budget=budget)
    p = tower.p
    params = {"q": q, "p": p, "e": tower.e}
    bad = []
    for n in range(1, 4):
        D = theta_chart(tower, n, 1)
        Dp = D.p_power(p)
        if Dp.coeffs != D.coeffs:
            bad.append({"n": n, "p_power": [c.text() for c in Dp.coeffs]})
    if bad:
        return CheckReport("foliation-pclosed", params, FAIL, {"mismatches": bad})
    return CheckReport("foliation-pclosed", params, PASS, {"charts_checked": 3})


# ---------------------------------------------------------------------------
# determinant criterion
# ---------------------------------------------------------------------------

def saito_log_tangent_check(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """det(delta_i(x_j)) equals the full Moore determinant, and each field
    preserves the ideal of each rational hyperplane: delta_i(l) = l^(q^i)."""
    params = {"n": n, "q": q}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(moore_degree(q, n + 1), "arrangement polynomial")
    deltas = [delta_cone(tower, n, i) for i in range(n + 1)]
    mat = [list(d.coeffs) for d in deltas]
    det = det_poly_matrix(mat)
    arrangement = moore_det(tower, n + 1)
    if det != arrangement:
        return CheckReport("foliation-saito", params, FAIL,
                           {"difference": (det - arrangement).text()})
    forms = normalized_linear_forms(tower, n + 1)
    bad = []
    for ell in forms:
        for i, d in enumerate(deltas):
            if d.apply(ell) != ell**(q**i):
                bad.append({"form": ell.text(), "i": i})
    if bad:
        return CheckReport("foliation-saito", params, FAIL,
                           {"not_preserved": bad[:5]})
    return CheckReport("foliation-saito", params, PASS,
                       {"forms_checked": len(forms),
                        "determinant_degree": det.degree()})


# ---------------------------------------------------------------------------
# blow-up coordinates
# ---------------------------------------------------------------------------

def h_poly(tower, n: int, n_vars: int = None) -> MPoly:
    """The unit factor of the arrangement polynomial in s-coordinates:

    h_n = prod over i = 1..n and tuples (a_i..a_n) in F_q^(n+1-i) of
    (1 + sum_{l=i..n} a_l s_i...s_l), on variables s_1..s_n.
    """
    if n_vars is None:
        n_vars = n
    if n_vars < n:
        raise ValueError("not enough variables")
    scalars = list(tower.enumerate())
    acc = MPoly.one(tower, n_vars)
    for i in range(1, n + 1):
        for coeffs in itertools.product(scalars, repeat=n + 1 - i):
            factor = MPoly.one(tower, n_vars)
            for l, a in zip(range(i, n + 1), coeffs):
                if a:
                    exps = tuple(1 if i - 1 <= v <= l - 1 else 0
                                 for v in range(n_vars))
                    factor = factor + MPoly.monomial(tower, n_vars, exps, a)
            acc = acc * factor
    return acc


def _s_monomial(tower, n_vars: int, upto: int, skip: int = None) -> MPoly:
    """s_1 * ... * s_upto, optionally skipping one index (1-based)."""
    exps = tuple(1 if (v + 1) <= upto and (v + 1) != skip else 0
                 for v in range(n_vars))
    return MPoly.monomial(tower, n_vars, exps, tower.one)


def h_unit_exponent(q: int, n: int) -> int:
    """Parity of the unit separating the product form of h_n from the
    Moore-determinant quotient.

    Grouping the nonzero coefficient tuples at each level into scalar
    orbits gives prod_{a != 0}(1 + a*w) = -(w^(q-1) - 1) per normalized
    combination w (the nonzero scalars multiply to -1), so the product
    form picks up one sign for each of the (q^r - 1)/(q - 1) normalized
    combinations at level r.  In characteristic 2 the sign is trivial.
    """
    return sum((q**r - 1) // (q - 1) for r in range(1, n + 1)) % 2


def verify_h_identity(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """h_n * prod s_i^(1+q+...+q^(n-i)) equals the Moore determinant of
    (1, s_1, s_1 s_2, ...) up to the derived unit, exactly."""
    params = {"n": n, "q": q}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(n * (q**n + 1), "arrangement in s-coordinates")
    h = h_poly(tower, n)
    lhs = h
    for i in range(1, n + 1):
        e = (q**(n - i + 1) - 1) // (q - 1)
        lhs = lhs * MPoly.monomial(
            tower, n, tuple(e if v == i - 1 else 0 for v in range(n)),
            tower.one)
    args = [MPoly.one(tower, n)] + [_s_monomial(tower, n, i)
                                    for i in range(1, n + 1)]
    rhs = moore_det_of(args)
    unit_exp = h_unit_exponent(q, n)
    if unit_exp:
        rhs = -rhs
    unit = -1 if unit_exp and q % 2 else 1
    if lhs == rhs:
        return CheckReport("foliation-h-identity", params, PASS,
                           {"h_degree": h.degree(), "degree": rhs.degree(),
                            "unit": unit})
    return CheckReport("foliation-h-identity", params, FAIL,
                       {"difference": (lhs - rhs).text(), "unit": unit})


def chart_form_coefficients(tower, n: int):
    """dt_i coefficients of the 1-form on the chart: (-1)^i times the Moore
    determinant of (1, t_1, ..., t_n) with t_i removed, for i = 1..n."""
    ts = [MPoly.variable(tower, n, k) for k in range(n)]
    out = []
    for i in range(1, n + 1):
        args = [MPoly.one(tower, n)] + [t for k, t in enumerate(ts)
                                        if k != i - 1]
        d = moore_det_of(args)
        out.append(-d if i % 2 else d)
    return out


def required_form_orders(q: int, n: int):
    """Exceptional vanishing orders for the pulled-back form: s_i must divide
    every ds_j coefficient to order (q^(n-i)-1)/(q-1) + 1, i = 1..n-1."""
    return {i: (q**(n - i) - 1) // (q - 1) + 1 for i in range(1, n)}


def verify_chart_form(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """Pull the chart 1-form through t_i = s_1...s_i and check divisibility.

    Every ds_j coefficient must be exactly divisible by the product of
    s_i to the required orders, and the ds_n quotient must be (-1)^n times
    h_(n-1) on the nose.
    """
    params = {"n": n, "q": q}
    tower = tower_for_q(q, budget=budget)
    budget.check_degree(n * (q**n + 1), "pulled-back form")
    coeffs = chart_form_coefficients(tower, n)
    images = [_s_monomial(tower, n, i) for i in range(1, n + 1)]
    pulled = [substitute(w, images) for w in coeffs]
    orders = required_form_orders(q, n)
    P = MPoly.monomial(tower, n,
                       tuple(orders.get(v + 1, 0) for v in range(n)), tower.one)
    quotients = []
    for j in range(1, n + 1):
        A = MPoly.zero(tower, n)
        for i in range(j, n + 1):
            A = A + pulled[i - 1] * _s_monomial(tower, n, i, skip=j)
        try:
            quotients.append(exact_divide(A, P))
        except DivisibilityError as err:
            return CheckReport("foliation-chart-form", params, FAIL,
                               {"ds": j, "remainder": err.remainder.text()})
    expected_last = h_poly(tower, n - 1, n_vars=n)
    if (n + h_unit_exponent(q, n - 1)) % 2:
        expected_last = -expected_last
    if quotients[-1] != expected_last:
        return CheckReport(
            "foliation-chart-form", params, FAIL,
            {"ds": n, "quotient": quotients[-1].text(),
             "expected": expected_last.text()})
    return CheckReport("foliation-chart-form", params, PASS,
                       {"orders": {str(i): o for i, o in orders.items()},
                        "last_quotient_degree": quotients[-1].degree()})


def pullback_field(q: int, n: int, j: int, budget=DEFAULT_BUDGET) -> Derivation:
    """Transform theta_j through t_i = s_1...s_i by forward substitution.

    The Jacobian of the substitution is triangular with monomial entries,
    so each new coefficient comes from one exact division.
    """
    tower = tower_for_q(q, budget=budget)
    theta = theta_chart(tower, n, j)
    images = [_s_monomial(tower, n, i) for i in range(1, n + 1)]
    new_coeffs = []
    for k in range(1, n + 1):
        acc = substitute(theta.coeffs[k - 1], images)
        for l in range(1, k):
            acc = acc - _s_monomial(tower, n, k, skip=l) * new_coeffs[l - 1]
        new_coeffs.append(exact_divide(acc, _s_monomial(tower, n, k - 1)))
    return Derivation(tuple(new_coeffs))


def expected_chart_field(q: int, n: int, j: int, budget=DEFAULT_BUDGET) -> Derivation:
    """The displayed form of the transformed field:
    coefficient k is (s_1...s_(k-1))^(q^j - 1) (s_k^(q^j) - s_k)."""
    tower = tower_for_q(q, budget=budget)
    coeffs = []
    for k in range(1, n + 1):
        s_k = MPoly.variable(tower, n, k - 1)
        prefix = _s_monomial(tower, n, k - 1)**(q**j - 1)
        coeffs.append(prefix * (s_k**(q**j) - s_k))
    return Derivation(tuple(coeffs))


def min_valuation(polys, var_index: int) -> int:
    """Smallest exponent of the variable across all terms of all polys."""
    vals = [min(e[var_index] for e in f.terms) for f in polys if f]
    if not vals:
        raise ValueError("all polynomials are zero")
    return min(vals)


def verify_chart_field(q: int, n: int, j: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """The transformed field matches its displayed form; for j = 1 the
    vanishing order along s_1 is exactly 1 and 0 along s_2..s_(n-1)."""
    params = {"n": n, "q": q, "j": j}
    if not 1 <= j <= n:
        raise ValueError(f"field index {j} out of range")
    got = pullback_field(q, n, j, budget)
    want = expected_chart_field(q, n, j, budget)
    if got.coeffs != want.coeffs:
        return CheckReport(
            "foliation-chart-field", params, FAIL,
            {"got": [c.text() for c in got.coeffs],
             "expected": [c.text() for c in want.coeffs]})
    witness = {"matches_displayed_formula": True}
    if j == 1:
        orders = {"s1": min_valuation(got.coeffs, 0)}
        for i in range(2, n):
            orders[f"s{i}"] = min_valuation(got.coeffs, i - 1)
        witness["orders"] = orders
        if orders["s1"] != 1 or any(orders[f"s{i}"] != 0 for i in range(2, n)):
            return CheckReport("foliation-chart-field", params, FAIL, witness)
    return CheckReport("foliation-chart-field", params, PASS, witness)


def verify_chart_field_all(q: int, n: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """verify_chart_field across every field index j = 1..n, one report."""
    params = {"n": n, "q": q}
    merged = {}
    for j in range(1, n + 1):
        rep = verify_chart_field(q, n, j, budget)
        if rep.status != PASS:
            witness = dict(rep.witness or {})
            witness["j"] = j
            return CheckReport("foliation-chart-field", params, rep.status,
                               witness)
        if "orders" in (rep.witness or {}):
            merged["orders"] = rep.witness["orders"]
    merged["fields_checked"] = n
    return CheckReport("foliation-chart-field", params, PASS, merged)


# ---------------------------------------------------------------------------
# splitting form
# ---------------------------------------------------------------------------

def _norm_form_on_triple(tower, triple):
    """Norm form of the degree-m extension on three power-basis elements,
    with coefficients rebased to F_q."""
    base = make_tower(tower.p, tower.e, 1)
    u = tower.gen() if tower.m > 1 else tower.one
    basis = [u**k for k in triple]
    big = norm_form(tower, basis)
    terms = {}
    for exps, c in big.terms.items():
        if not c.in_base_field():
            raise AssertionError("norm form coefficient escaped the base field")
        terms[exps] = base.scalar(c.base_index())
    return MPoly(base, 3, terms)


def splitting_polynomial(q: int, budget=DEFAULT_BUDGET):
    """A form that is 1 on every nonzero vector of F_q^3, or a non-existence
    witness.

    For q > 2: the norm form of the degree-q extension, restricted to the
    span of three power-basis elements, never vanishes on nonzero rational
    vectors, so its (q-1)-th power is identically 1 there.  For q = 2 an
    exhaustive search over all homogeneous quadratics shows no such form
    exists.  Returns (MPoly or None, witness dict).
    """
    base = tower_for_q(q, budget=budget)
    nonzero = [v for v in _all_vectors(base, 3) if any(v)]
    if q == 2:
        monomials = [e for e in _degree_exponents(3, 2)]
        candidates = 0
        for mask in itertools.product([base.zero, base.one],
                                      repeat=len(monomials)):
            f = MPoly(base, 3, {e: c for e, c in zip(monomials, mask)})
            candidates += 1
            if all(evaluate(f, v) == base.one for v in nonzero):
                return f, {"exists": True, "unexpected": True,
                           "form": f.text()}
        return None, {"exists": False, "candidates_checked": candidates,
                      "points": len(nonzero)}

    tower = make_tower(base.p, base.e, q, budget=budget)
    for triple in itertools.combinations(range(tower.m), 3):
        G = _norm_form_on_triple(tower, triple)
        if any(not evaluate(G, v) for v in nonzero):
            continue
        F = G**(q - 1)
        bad = [v for v in nonzero if evaluate(F, v) != base.one]
        if bad:
            continue
        return F, {"exists": True, "degree": F.degree(),
                   "norm_degree": G.degree(), "verified_vectors": len(nonzero),
                   "power_basis_exponents": list(triple)}
    return None, {"exists": False, "reason": "no power-basis triple worked"}


def _all_vectors(tower, k):
    return list(itertools.product(tower.enumerate(), repeat=k))


def _degree_exponents(n_vars, d):
    out = []
    for exps in itertools.product(range(d + 1), repeat=n_vars):
        if sum(exps) == d:
            out.append(exps)
    return sorted(out)


def verify_splitting(q: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """The splitting form exists exactly when q > 2."""
    params = {"q": q}
    form, witness = splitting_polynomial(q, budget)
    if q == 2:
        if form is None:
            return CheckReport("foliation-splitting", params, PASS, witness)
        return CheckReport("foliation-splitting", params, FAIL, witness)
    if form is not None and witness.get("exists"):
        return CheckReport("foliation-splitting", params, PASS, witness)
    return CheckReport("foliation-splitting", params, FAIL, witness)
