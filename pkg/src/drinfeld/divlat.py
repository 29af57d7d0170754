"""Formal divisor-class arithmetic on blow-ups at rational centers.

Surface side: the blow-up of the plane at all q^2+q+1 rational points,
with basis {H, E_0..E_{N-1}}, the standard diagonal pairing, strict
transforms of rational lines, a numerical ledger of class identities, and
pushforward coefficients along the contraction of those strict transforms.

Threefold side: a deliberately coarse ring for the blow-up of P^3 along
points then lines.  Only H^3 = 1 and B * H^2 = 0 (for basis B != H) are
defined; any other product raises instead of returning 0.

All coefficients are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from .counting import incidence_geometry
from .report import DEFAULT_BUDGET, CheckReport, FAIL, PASS

__checks__ = ["lattice-surface", "lattice-threefold", "cone-discrepancy"]


class NotPushforwardError(ValueError):
    """The class is not a combination of the exceptional pullback and the
    contracted curves."""


class MissingRuleError(ValueError):
    """The coarse threefold ring has no rule for this product."""


class DivClass:
    __slots__ = ("lattice", "vec")

    def __init__(self, lattice, vec):
        self.lattice = lattice
        self.vec = tuple(Fraction(v) for v in vec)
        if len(self.vec) != len(lattice.names):
            raise ValueError("coefficient vector does not match the basis")

    def _check(self, other):
        if self.lattice is not other.lattice:
            raise ValueError("classes from different lattices")

    def __add__(self, other):
        self._check(other)
        return DivClass(self.lattice, [a + b for a, b in zip(self.vec, other.vec)])

    def __sub__(self, other):
        self._check(other)
        return DivClass(self.lattice, [a - b for a, b in zip(self.vec, other.vec)])

    def __neg__(self):
        return DivClass(self.lattice, [-a for a in self.vec])

    def __rmul__(self, scalar):
        return DivClass(self.lattice, [Fraction(scalar) * a for a in self.vec])

    __mul__ = __rmul__

    def __eq__(self, other):
        return (isinstance(other, DivClass) and self.lattice is other.lattice
                and self.vec == other.vec)

    def __hash__(self):
        return hash(self.vec)

    def coeff(self, name: str) -> Fraction:
        return self.vec[self.lattice.names.index(name)]

    def __repr__(self):
        parts = [f"{c}*{n}" for n, c in zip(self.lattice.names, self.vec) if c]
        return " + ".join(parts) if parts else "0"

    def to_jsonable(self):
        return {n: c for n, c in zip(self.lattice.names, self.vec) if c}


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

class SurfaceLattice:
    """Basis {H, E_0..E_{N-1}} with H^2 = 1, E_i^2 = -1, mixed products 0."""

    def __init__(self, q: int, budget=DEFAULT_BUDGET):
        self.q = q
        self.n_exceptional = q * q + q + 1
        self.names = ("H",) + tuple(f"E{i}" for i in range(self.n_exceptional))
        self.geometry = incidence_geometry(q, 2, budget)
        if len(self.geometry.points) != self.n_exceptional:
            raise AssertionError("point count mismatch")

    def zero(self):
        return DivClass(self, [0] * len(self.names))

    def basis(self, name: str):
        vec = [0] * len(self.names)
        vec[self.names.index(name)] = 1
        return DivClass(self, vec)

    @property
    def H(self):
        return self.basis("H")

    def exceptional_sum(self):
        return DivClass(self, [0] + [1] * self.n_exceptional)

    def line(self, line_index: int):
        """Strict transform of a rational line: H minus its rational points."""
        vec = [0] * len(self.names)
        vec[0] = 1
        for p in self.geometry.on_hyperplane[line_index]:
            vec[1 + p] = -1
        return DivClass(self, vec)

    def lines(self):
        return [self.line(i) for i in range(len(self.geometry.hyperplanes))]

    def intersect(self, a: DivClass, b: DivClass) -> Fraction:
        a._check(b)
        if a.lattice is not self:
            raise ValueError("classes from a different lattice")
        return a.vec[0] * b.vec[0] - sum(
            x * y for x, y in zip(a.vec[1:], b.vec[1:]))

    def canonical(self):
        return -3 * self.H + self.exceptional_sum()


def surface_lattice(q: int, budget=DEFAULT_BUDGET) -> SurfaceLattice:
    return SurfaceLattice(q, budget)


def contract_pushforward(cls: DivClass, lat: SurfaceLattice) -> Fraction:
    """Coefficient of the class along the exceptional pullback, modulo the
    contracted curves.

    The pullback of the contraction's exceptional class is
    P = sum E_i + ((q+1)/q) sum L_j, the unique lift orthogonal to every
    contracted curve.  Solves cls = lam*P + sum mu_j L_j exactly; raises
    NotPushforwardError if no solution exists.
    """
    q = lat.q
    lines = lat.lines()
    P = lat.exceptional_sum()
    for L in lines:
        P = P + Fraction(q + 1, q) * L
    columns = [P.vec] + [L.vec for L in lines]
    rows = len(lat.names)
    mat = [[columns[c][r] for c in range(len(columns))] + [cls.vec[r]]
           for r in range(rows)]
    ncols = len(columns)
    pivot_rows = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, rows) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [inv * v for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivot_rows.append(c)
        r += 1
    for i in range(r, rows):
        if mat[i][ncols]:
            raise NotPushforwardError(
                "class is not supported on the contraction data")
    solution = {c: mat[i][ncols] for i, c in enumerate(pivot_rows)}
    return solution.get(0, Fraction(0))


def verify_surface_ledger(q: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """Every class identity and intersection number on the surface side."""
    params = {"q": q}
    lat = surface_lattice(q, budget)
    H = lat.H
    E = lat.exceptional_sum()
    K = lat.canonical()
    lines = lat.lines()
    N = lat.n_exceptional
    dot = lat.intersect
    problems = []

    for i, L in enumerate(lines):
        if dot(L, L) != -q:
            problems.append({"line": i, "self_intersection": dot(L, L)})
        if dot(H, L) != 1:
            problems.append({"line": i, "H_intersection": dot(H, L)})

    B = lat.zero()
    for L in lines:
        B = B + L
    if (q * q + q + 1) * H != B + (q + 1) * E:
        problems.append({"identity": "degree of the arrangement"})

    seq_pairs = {
        "cotangent": ((-(q + 2) * H + 2 * E, (q - 1) * H - E), K),
        "log_strict": (((q * q - 1) * H - (q - 1) * E, (q - 1) * H - E), K + B),
        "log_total": (((q * q - 1) * H - (q - 1) * E, (q - 1) * H), K + B + E),
    }
    for name, (pair, total) in seq_pairs.items():
        if pair[0] + pair[1] != total:
            problems.append({"sequence": name})

    H2 = (q + 1) * H - E
    H3 = H
    KD = K + B + E
    if KD != (q - 1) * ((q + 2) * H - E) or KD != (q - 1) * (H2 + H3):
        problems.append({"identity": "boundary adjunction"})

    M = (q * q - 1) * H - (q - 1) * E
    m2, mh = dot(M, M), dot(M, H)
    if not (m2 > 0 and mh > 0):
        problems.append({"M_squared": m2, "M_dot_H": mh})
    if q == 2 and (m2, mh) != (2, 3):
        problems.append({"M_squared": m2, "M_dot_H": mh, "expected": [2, 3]})

    nef_values = {"E": {dot(H2, lat.basis(f"E{i}")) for i in range(N)},
                  "L": {dot(H2, L) for L in lines}}
    if nef_values["E"] != {1} or nef_values["L"] != {0}:
        problems.append({"nef_against_generators": {
            k: sorted(v) for k, v in nef_values.items()}})

    lam_M = contract_pushforward(M, lat)
    lam_aux = contract_pushforward((q - 1) * H - E, lat)
    lam_line = contract_pushforward(lines[0], lat)
    expected = (Fraction(q * q - q, N), Fraction(-(q + 2), N), Fraction(0))
    if (lam_M, lam_aux, lam_line) != expected:
        problems.append({"pushforward": [lam_M, lam_aux, lam_line],
                         "expected": list(expected)})

    witness = {
        "exceptional_count": N,
        "line_self_intersection": -q,
        "M_squared": m2,
        "M_dot_H": mh,
        "pushforward": {"M": lam_M, "auxiliary": lam_aux, "line": lam_line},
    }
    if problems:
        witness["problems"] = problems
        return CheckReport("lattice-surface", params, FAIL, witness)
    return CheckReport("lattice-surface", params, PASS, witness)


# ---------------------------------------------------------------------------
# threefold
# ---------------------------------------------------------------------------

class ThreefoldLattice:
    """Coarse basis {H, D2, D3}; only H^3 and B*H^2 have rules."""

    names = ("H", "D2", "D3")

    def zero(self):
        return DivClass(self, [0, 0, 0])

    def basis(self, name: str):
        vec = [0, 0, 0]
        vec[self.names.index(name)] = 1
        return DivClass(self, vec)

    @property
    def H(self):
        return self.basis("H")

    def triple(self, a: DivClass, b: DivClass, c: DivClass) -> Fraction:
        """Trilinear product; defined only when every contributing basis
        triple has at least two H factors."""
        total = Fraction(0)
        for i, ai in enumerate(a.vec):
            if not ai:
                continue
            for j, bj in enumerate(b.vec):
                if not bj:
                    continue
                for k, ck in enumerate(c.vec):
                    if not ck:
                        continue
                    h_count = [i, j, k].count(0)
                    if h_count == 3:
                        total += ai * bj * ck
                    elif h_count == 2:
                        pass
                    else:
                        raise MissingRuleError(
                            f"no rule for {self.names[i]}*{self.names[j]}"
                            f"*{self.names[k]}")
        return total

    def slope_against_hyperplanes(self, cls: DivClass) -> Fraction:
        return self.triple(cls, self.H, self.H)


def threefold_lattice() -> ThreefoldLattice:
    return ThreefoldLattice()


def canonical_threefold(lat: ThreefoldLattice) -> DivClass:
    """K = -(n+1)H + sum_i i*D^(i+1) with n = 3."""
    return -4 * lat.H + 1 * lat.basis("D2") + 2 * lat.basis("D3")


def verify_threefold_ledger(q: int, p: int, budget=DEFAULT_BUDGET) -> CheckReport:
    """Class identities of the coarse threefold ring at the given (p, q)."""
    params = {"q": q, "p": p}
    lat = threefold_lattice()
    H, D2, D3 = lat.H, lat.basis("D2"), lat.basis("D3")
    K = canonical_threefold(lat)
    problems = []

    if K != -4 * H + D2 + 2 * D3:
        problems.append({"identity": "canonical class"})

    c1F2 = -(q - 1) * (q + 2) * H + q * D3 + D2
    summand1 = -(q - 1) * H + D3
    summand2 = -(q * q - 1) * H + (q - 1) * D3 + D2
    if summand1 + summand2 != c1F2:
        problems.append({"identity": "rank-2 subsheaf determinant"})

    k_triviality = None
    if p == q == 2:
        k_triviality = (K - (p - 1) * c1F2 == lat.zero())
        if not k_triviality:
            problems.append({"identity": "K-triviality",
                             "difference": (K - (p - 1) * c1F2).to_jsonable()})

    Ltilde = (q * q + q + 2) * H - (q + 2) * D3 - 2 * D2
    slope = lat.slope_against_hyperplanes(Ltilde)
    if slope != q * q + q + 2 or slope <= 0:
        problems.append({"slope": slope})

    D1 = (q**3 + q * q + q + 1) * H - (q + 1) * D2 - (q * q + q + 1) * D3
    D = D1 + D2 + D3
    H2 = (q * q + q + 1) * H - D2 - (q + 1) * D3
    H3 = (q + 1) * H - D3
    H4 = H
    if (q - 1) * (H2 + H3 + H4) != K + D:
        problems.append({"identity": "boundary ledger",
                         "lhs": ((q - 1) * (H2 + H3 + H4)).to_jsonable(),
                         "rhs": (K + D).to_jsonable()})

    witness = {
        "K": K.to_jsonable(),
        "c1_det_F2": c1F2.to_jsonable(),
        "slope": slope,
        "k_triviality": k_triviality,
    }
    if problems:
        witness["problems"] = problems
        return CheckReport("lattice-threefold", params, FAIL, witness)
    return CheckReport("lattice-threefold", params, PASS, witness)


# ---------------------------------------------------------------------------
# cone discrepancy
# ---------------------------------------------------------------------------

def cone_discrepancy(m: int, d: int):
    """Discrepancy of the section in the blow-up of the cone over a degree-d
    rational normal curve-like base: a = (m+1)/d - 1, klt iff a > -1."""
    if m < 1 or d < 1:
        raise ValueError("need m >= 1 and d >= 1")
    a = Fraction(m + 1, d) - 1
    return a, a > -1


def verify_cone_discrepancy(m: int, d: int) -> CheckReport:
    params = {"m": m, "d": d}
    a, klt = cone_discrepancy(m, d)
    witness = {"discrepancy": a, "klt": klt}
    return CheckReport("cone-discrepancy", params, PASS if klt else FAIL,
                       witness)
