"""Sparse exact multivariate polynomials over a tower field.

Terms are stored as a dict mapping exponent tuples to nonzero coefficients.
The canonical term order is graded lexicographic: compare total degree first,
then the exponent tuple (x0 heaviest).  Serializations list terms in
descending canonical order, with coefficients rendered through the tower's
nested-list element encoding.

Also here: derivations (vector fields with polynomial coefficients), their
Lie bracket and p-th power, Hasse derivatives with Lucas binomials, exact
division with a remainder witness, and fraction-free determinants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .field import FieldElem, FieldTower, embed


class DivisibilityError(ArithmeticError):
    """Exact division failed; .remainder witnesses f - q*g != 0."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


def grlex_key(exps):
    return (sum(exps), exps)


class MPoly:
    __slots__ = ("tower", "n_vars", "terms")

    def __init__(self, tower: FieldTower, n_vars: int, terms: dict):
        self.tower = tower
        self.n_vars = n_vars
        self.terms = {e: c for e, c in terms.items() if c}

    # -- constructors

    @classmethod
    def zero(cls, tower, n_vars):
        return cls(tower, n_vars, {})

    @classmethod
    def constant(cls, tower, n_vars, value: FieldElem):
        return cls(tower, n_vars, {(0,) * n_vars: value})

    @classmethod
    def one(cls, tower, n_vars):
        return cls.constant(tower, n_vars, tower.one)

    @classmethod
    def variable(cls, tower, n_vars, i):
        if not 0 <= i < n_vars:
            raise ValueError(f"variable index {i} out of range")
        exps = tuple(1 if j == i else 0 for j in range(n_vars))
        return cls(tower, n_vars, {exps: tower.one})

    @classmethod
    def monomial(cls, tower, n_vars, exps, coeff: FieldElem):
        exps = tuple(exps)
        if len(exps) != n_vars or any(e < 0 for e in exps):
            raise ValueError(f"bad exponent vector {exps!r}")
        return cls(tower, n_vars, {exps: coeff})

    # -- structure

    def _check_compatible(self, other: "MPoly"):
        if self.tower.key != other.tower.key or self.n_vars != other.n_vars:
            raise ValueError("polynomials from different rings")

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def leading(self):
        """(exponents, coefficient) of the canonical leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # -- arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        self._check_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return MPoly(self.tower, self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.tower, self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, FieldElem):
            return MPoly.constant(self.tower, self.n_vars, embed(other, self.tower))
        if isinstance(other, int):
            return MPoly.constant(self.tower, self.n_vars, self.tower.from_int(other))
        return None

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        self._check_compatible(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                if e in out:
                    s = out[e] + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                elif c:
                    out[e] = c
        return MPoly(self.tower, self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.one(self.tower, self.n_vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return (self.tower.key == other.tower.key
                    and self.n_vars == other.n_vars and self.terms == other.terms)
        if isinstance(other, (FieldElem, int)):
            o = self._coerce(other)
            return self.terms == o.terms
        return NotImplemented

    __hash__ = None

    # -- serialization

    def text(self) -> str:
        """Canonical text: terms in descending order, 'coef*x0^a0*...'."""
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            coef = json.dumps(self.tower.encode(c), separators=(",", ":"))
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exps) if e)
            parts.append(f"{coef}*{mono}" if mono else coef)
        return "+".join(parts)

    def json_terms(self):
        """JSON term array: [[exponents...], "coef"] in descending order."""
        return [[list(exps), json.dumps(self.tower.encode(c), separators=(",", ":"))]
                for exps, c in self.sorted_terms()]

    def __repr__(self):
        return f"MPoly({self.text()})"

    def to_jsonable(self):
        return self.text()


# ---------------------------------------------------------------------------
# division, derivatives
# ---------------------------------------------------------------------------

def exact_divide(f: MPoly, g: MPoly) -> MPoly:
    """Quotient f/g when g divides f exactly.

    Raises DivisibilityError carrying f - q_partial*g as remainder witness
    the moment a leading term fails to divide.
    """
    f._check_compatible(g)
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    glead, gcoeff = g.leading()
    ginv = gcoeff.inverse()
    if len(g.terms) == 1:
        quot = {}
        stuck = {}
        for exps, c in f.terms.items():
            diff = tuple(a - b for a, b in zip(exps, glead))
            if any(d < 0 for d in diff):
                stuck[exps] = c
            else:
                quot[diff] = c * ginv
        if stuck:
            raise DivisibilityError(
                f"{g.text()} does not divide {f.text()}",
                remainder=MPoly(f.tower, f.n_vars, stuck))
        return MPoly(f.tower, f.n_vars, quot)
    quot: dict = {}
    rem = MPoly(f.tower, f.n_vars, dict(f.terms))
    while rem:
        lead, lcoeff = rem.leading()
        diff = tuple(a - b for a, b in zip(lead, glead))
        if any(d < 0 for d in diff):
            raise DivisibilityError(
                f"{g.text()} does not divide {f.text()}", remainder=rem)
        c = lcoeff * ginv
        quot[diff] = c
        rem = rem - MPoly.monomial(f.tower, f.n_vars, diff, c) * g
    return MPoly(f.tower, f.n_vars, quot)


def lucas_binom(a: int, b: int, p: int) -> int:
    """binom(a, b) mod p via Lucas' theorem on base-p digits."""
    if b < 0 or b > a:
        return 0
    result = 1
    while b:
        result = (result * math.comb(a % p, b % p)) % p
        if result == 0:
            return 0
        a //= p
        b //= p
    return result


def hasse_derivative(f: MPoly, alpha) -> MPoly:
    """Hasse derivative D^(alpha) f = sum binom(a, alpha) c_a x^(a - alpha)."""
    alpha = tuple(alpha)
    if len(alpha) != f.n_vars or any(a < 0 for a in alpha):
        raise ValueError(f"bad derivative order {alpha!r}")
    p = f.tower.p
    out: dict = {}
    for exps, c in f.terms.items():
        if any(e < a for e, a in zip(exps, alpha)):
            continue
        scale = 1
        for e, a in zip(exps, alpha):
            scale = (scale * lucas_binom(e, a, p)) % p
            if scale == 0:
                break
        if scale == 0:
            continue
        e_new = tuple(e - a for e, a in zip(exps, alpha))
        v = c * f.tower.from_int(scale)
        if e_new in out:
            s = out[e_new] + v
            if s:
                out[e_new] = s
            else:
                del out[e_new]
        else:
            out[e_new] = v
    return MPoly(f.tower, f.n_vars, out)


def partial(f: MPoly, i: int) -> MPoly:
    return hasse_derivative(f, tuple(1 if j == i else 0 for j in range(f.n_vars)))


# ---------------------------------------------------------------------------
# evaluation and substitution
# ---------------------------------------------------------------------------

def evaluate(f: MPoly, point) -> FieldElem:
    """Evaluate f at a point whose coordinates live in one tower field.

    Coefficients are embedded into the point's tower, which must either
    coincide with f's or extend it (same p, e; coefficients in F_q).
    """
    point = tuple(point)
    if len(point) != f.n_vars:
        raise ValueError(f"expected {f.n_vars} coordinates, got {len(point)}")
    target = point[0].tower if point else f.tower
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        v = cache.get(key)
        if v is None:
            v = point[i] ** e
            cache[key] = v
        return v

    acc = target.zero
    for exps, c in f.terms.items():
        v = embed(c, target)
        for i, e in enumerate(exps):
            if e:
                v = v * power(i, e)
        acc = acc + v
    return acc


def substitute(f: MPoly, images) -> MPoly:
    """Ring homomorphism sending variable i to images[i]."""
    images = list(images)
    if len(images) != f.n_vars:
        raise ValueError(f"expected {f.n_vars} images, got {len(images)}")
    target = images[0].tower if images else f.tower
    n_out = images[0].n_vars if images else f.n_vars
    for g in images:
        if g.tower.key != target.key or g.n_vars != n_out:
            raise ValueError("images from different rings")
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        v = cache.get(key)
        if v is None:
            v = images[i] ** e
            cache[key] = v
        return v

    acc = MPoly.zero(target, n_out)
    for exps, c in f.terms.items():
        term = MPoly.constant(target, n_out, embed(c, target))
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        acc = acc + term
    return acc


@dataclass(frozen=True)
class ChartSubstitution:
    """A monomial coordinate change, e.g. t_i -> s_1 ... s_i."""

    images: tuple

    def __post_init__(self):
        if not self.images or any(not g for g in self.images):
            raise ValueError("chart substitution images must be nonzero")

    def apply(self, f: MPoly) -> MPoly:
        return substitute(f, self.images)


# -- packed fast-path evaluation (hot enumeration loops) --------------------

def packed_terms(f: MPoly, ops):
    """Precompile f into (exponents, coefficient-index) pairs for eval_packed."""
    target = ops.elems[0].tower
    return [(exps, ops.to_index(embed(c, target))) for exps, c in f.sorted_terms()]


def power_rows(point_indices, max_exps, ops):
    """power_rows[i][e] = (point_i)^e as a packed index, 0 <= e <= max_exps[i]."""
    mul = ops.mul
    rows = []
    for xi, me in zip(point_indices, max_exps):
        row = [1]
        acc = 1
        for _ in range(me):
            acc = mul[acc][xi]
            row.append(acc)
        rows.append(row)
    return rows


def eval_packed(terms, ops, powrows) -> int:
    mul = ops.mul
    add = ops.add
    acc = 0
    for exps, ci in terms:
        v = ci
        for i, e in enumerate(exps):
            if e:
                v = mul[v][powrows[i][e]]
        acc = add[acc][v]
    return acc


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def det_poly_matrix(mat) -> MPoly:
    """Determinant of a square matrix of MPoly entries.

    Cofactor expansion up to size 5; fraction-free elimination (with exact
    division by the previous pivot) above that.
    """
    n = len(mat)
    if n == 0 or any(len(row) != n for row in mat):
        raise ValueError("matrix must be square and nonempty")
    tower = mat[0][0].tower
    n_vars = mat[0][0].n_vars
    for row in mat:
        for f in row:
            if f.tower.key != tower.key or f.n_vars != n_vars:
                raise ValueError("matrix entries from different rings")
    if n <= 5:
        return _det_cofactor(mat)
    return _det_bareiss(mat)


def _det_cofactor(mat) -> MPoly:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = None
    for j in range(n):
        entry = mat[0][j]
        if not entry:
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in mat[1:]]
        term = entry * _det_cofactor(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        return MPoly.zero(mat[0][0].tower, mat[0][0].n_vars)
    return acc


def _det_bareiss(mat) -> MPoly:
    n = len(mat)
    tower = mat[0][0].tower
    n_vars = mat[0][0].n_vars
    M = [list(row) for row in mat]
    prev = MPoly.one(tower, n_vars)
    negate = False
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return MPoly.zero(tower, n_vars)
            M[k], M[swap] = M[swap], M[k]
            negate = not negate
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exact_divide(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
            M[i][k] = MPoly.zero(tower, n_vars)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if negate else det


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    """Derivation of the polynomial ring, determined by its values on the
    variables: D = sum coeffs[i] d/dx_i."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("derivation needs at least one variable")
        t = self.coeffs[0]
        for c in self.coeffs:
            if c.tower.key != t.tower.key or c.n_vars != t.n_vars:
                raise ValueError("derivation coefficients from different rings")
        if t.n_vars != len(self.coeffs):
            raise ValueError("need one coefficient per variable")

    @property
    def n_vars(self):
        return len(self.coeffs)

    @property
    def tower(self):
        return self.coeffs[0].tower

    def apply(self, f: MPoly) -> MPoly:
        acc = MPoly.zero(self.tower, self.n_vars)
        for i, c in enumerate(self.coeffs):
            if c:
                acc = acc + c * partial(f, i)
        return acc

    def bracket(self, other: "Derivation") -> "Derivation":
        if self.n_vars != other.n_vars:
            raise ValueError("bracket of derivations on different rings")
        return Derivation(tuple(self.apply(other.coeffs[i]) - other.apply(self.coeffs[i])
                                for i in range(self.n_vars)))

    def p_power(self, p: int) -> "Derivation":
        """D^[p]: the derivation with coefficients D^p(x_i) (p-fold apply)."""
        out = []
        for i in range(self.n_vars):
            u = MPoly.variable(self.tower, self.n_vars, i)
            for _ in range(p):
                u = self.apply(u)
            out.append(u)
        return Derivation(tuple(out))

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return Derivation(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return Derivation(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Derivation(tuple(-a for a in self.coeffs))

    def to_jsonable(self):
        return [c.text() for c in self.coeffs]
