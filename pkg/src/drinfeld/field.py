"""Exact arithmetic in finite field towers F_p < F_q = F_{p^e} < F_{q^m}.

A FieldTower fixes both moduli deterministically: the base modulus is the
first monic irreducible of degree e over F_p, the extension modulus the first
monic irreducible of degree m over F_q, where candidates are ordered by the
integer value of their non-leading coefficient vector (low-degree coefficient
least significant, coefficients ordered 0 < 1 < ... < p-1).  Two towers with
equal (p, e, m) therefore have identical arithmetic, and elements may be moved
between them freely.

Elements are immutable FieldElem values: a length-m tuple of F_q coefficients,
each F_q coefficient stored as an integer index (value of its F_p coefficient
vector in base p).  The text encoding used in reports nests coefficient lists
and collapses trivial levels, so t+1 in F_4 reads [1,1] and 1 in F_2 reads 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .report import Budget, DEFAULT_BUDGET

_PACKED_LIMIT = 1024


class DegenerateBasisError(ValueError):
    """A claimed basis is linearly dependent over F_q."""


# ---------------------------------------------------------------------------
# polynomials over F_p: little-endian int tuples, used only for modulus search
# ---------------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _fp_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _fp_rem(a, b, p):
    # b monic
    a = list(a)
    db = len(b) - 1
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    rem = a[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def _fp_monic_polys(p, degree):
    for tail in itertools.product(range(p), repeat=degree):
        yield list(tail) + [1]


def _fp_is_irreducible(f, p):
    d = len(f) - 1
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for g in _fp_monic_polys(p, k):
            if not _fp_rem(f, g, p):
                return False
    return True


def _first_irreducible_fp(p, d):
    for k in range(p ** d):
        coeffs = [(k // p ** i) % p for i in range(d)]
        f = coeffs + [1]
        if _fp_is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible of degree {d} over F_{p}")


# ---------------------------------------------------------------------------
# the base field F_q with full lookup tables (q is always small here)
# ---------------------------------------------------------------------------

class _BaseField:
    """F_q = F_p[t]/(base_modulus), elements encoded as indices 0..q-1."""

    def __init__(self, p: int, e: int):
        self.p = p
        self.e = e
        self.q = q = p ** e
        self.modulus = _first_irreducible_fp(p, e)

        def decode(i):
            return [(i // p ** j) % p for j in range(e)]

        def encode(c):
            return sum(cj * p ** j for j, cj in enumerate(c))

        self.add = [[encode([(x + y) % p for x, y in zip(decode(a), decode(b))])
                     for b in range(q)] for a in range(q)]
        self.neg = [encode([(-x) % p for x in decode(a)]) for a in range(q)]
        self.sub = [[self.add[a][self.neg[b]] for b in range(q)] for a in range(q)]
        mul = []
        for a in range(q):
            row = []
            for b in range(q):
                prod = _fp_mul(decode(a), decode(b), p)
                rem = _fp_rem(prod, list(self.modulus), p)
                rem += [0] * (e - len(rem))
                row.append(encode(rem))
            mul.append(row)
        self.mul = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self.inv = inv
        self.decode = decode
        self.encode = encode


# polynomials over F_q: little-endian lists of indices

def _fq_mul(a, b, K):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            row = K.mul[ai]
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = K.add[out[i + j]][row[bj]]
    return out


def _fq_rem(a, b, K):
    # b monic
    a = list(a)
    db = len(b) - 1
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            row = K.mul[c]
            for j in range(db + 1):
                a[k - db + j] = K.sub[a[k - db + j]][row[b[j]]]
    rem = a[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def _fq_is_irreducible(f, K):
    d = len(f) - 1
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for tail in itertools.product(range(K.q), repeat=k):
            g = list(tail) + [1]
            if not _fq_rem(f, g, K):
                return False
    return True


def _first_irreducible_fq(K, d):
    for k in range(K.q ** d):
        coeffs = [(k // K.q ** i) % K.q for i in range(d)]
        f = coeffs + [1]
        if _fq_is_irreducible(f, K):
            return tuple(f)
    raise AssertionError(f"no irreducible of degree {d} over F_{K.q}")


# ---------------------------------------------------------------------------
# towers and elements
# ---------------------------------------------------------------------------

class FieldTower:
    """Arithmetic context for F_p < F_q < F_{q^m}.  Use make_tower()."""

    def __init__(self, p: int, e: int, m: int):
        self.p = p
        self.e = e
        self.m = m
        self.q = p ** e
        self.size = self.q ** m
        self._K = _BaseField(p, e)
        self.base_modulus = self._K.modulus
        if m == 1:
            # any monic degree-1 polynomial gives F_q itself; X is first
            self.ext_modulus = (0, 1)
        else:
            self.ext_modulus = _first_irreducible_fq(self._K, m)
        # reduction rows: _red[k] = X^{m+k} mod ext_modulus, k = 0..m-2
        K = self._K
        neg_tail = [K.neg[c] for c in self.ext_modulus[:m]]
        red = [list(neg_tail)]
        for _ in range(m - 2):
            prev = red[-1]
            shifted = [0] + prev[:-1]
            top = prev[-1]
            if top:
                row = K.mul[top]
                shifted = [K.add[s][row[t]] for s, t in zip(shifted, neg_tail)]
            red.append(shifted)
        self._red = [tuple(r) for r in red]
        self.zero = FieldElem(self, (0,) * m)
        self.one = FieldElem(self, (1,) + (0,) * (m - 1))
        self._packed = None

    @property
    def key(self):
        return (self.p, self.e, self.m)

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, m={self.m})"

    # -- construction helpers

    def elem(self, coeffs) -> "FieldElem":
        coeffs = tuple(coeffs)
        if len(coeffs) != self.m or any(not 0 <= c < self.q for c in coeffs):
            raise ValueError(f"bad coefficient vector {coeffs!r} for {self!r}")
        return FieldElem(self, coeffs)

    def scalar(self, base_index: int) -> "FieldElem":
        """The element of F_q < F_{q^m} with the given index."""
        if not 0 <= base_index < self.q:
            raise ValueError(f"base index {base_index} out of range for q={self.q}")
        return FieldElem(self, (base_index,) + (0,) * (self.m - 1))

    def from_int(self, k: int) -> "FieldElem":
        """Image of the integer k under Z -> F_p < F_{q^m}."""
        return self.scalar(k % self.p)

    def gen(self) -> "FieldElem":
        """Class of X, a generator of F_{q^m} over F_q (requires m > 1)."""
        if self.m == 1:
            raise ValueError("tower has m=1; use base_gen() for F_q over F_p")
        return FieldElem(self, (0, 1) + (0,) * (self.m - 2))

    def base_gen(self) -> "FieldElem":
        """Class of t, a generator of F_q over F_p (requires e > 1)."""
        if self.e == 1:
            raise ValueError("tower has e=1; F_q is the prime field")
        return self.scalar(self._K.encode([0, 1] + [0] * (self.e - 2)))

    # -- element text encoding (nested little-endian lists, trivial levels
    #    collapsed: m=1 drops the outer list, e=1 turns F_q entries into ints)

    def encode(self, x: "FieldElem"):
        if x.tower.key != self.key:
            raise ValueError("element belongs to a different tower")

        def enc_fq(idx):
            if self.e == 1:
                return idx
            return self._K.decode(idx)

        if self.m == 1:
            return enc_fq(x.coeffs[0])
        return [enc_fq(c) for c in x.coeffs]

    def parse(self, obj) -> "FieldElem":
        def parse_fq(o):
            if self.e == 1:
                if not isinstance(o, int) or not 0 <= o < self.p:
                    raise ValueError(f"bad F_{self.p} coefficient {o!r}")
                return o
            if not isinstance(o, list) or len(o) != self.e:
                raise ValueError(f"expected list of {self.e} ints, got {o!r}")
            if any(not isinstance(c, int) or not 0 <= c < self.p for c in o):
                raise ValueError(f"bad F_p digits {o!r}")
            return self._K.encode(o)

        if self.m == 1:
            return FieldElem(self, (parse_fq(obj),))
        if not isinstance(obj, list) or len(obj) != self.m:
            raise ValueError(f"expected list of {self.m} coefficients, got {obj!r}")
        return FieldElem(self, tuple(parse_fq(o) for o in obj))

    def moduli_description(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "m": self.m,
            "base_modulus": list(self.base_modulus),
            "ext_modulus": [self._K.decode(c) if self.e > 1 else c
                            for c in self.ext_modulus],
        }

    # -- internal coefficient arithmetic

    def _add(self, a, b):
        add = self._K.add
        return tuple(add[x][y] for x, y in zip(a, b))

    def _neg(self, a):
        neg = self._K.neg
        return tuple(neg[x] for x in a)

    def _mul(self, a, b):
        K = self._K
        m = self.m
        if m == 1:
            return (K.mul[a[0]][b[0]],)
        t = [0] * (2 * m - 1)
        add = K.add
        for i, ai in enumerate(a):
            if ai:
                row = K.mul[ai]
                for j, bj in enumerate(b):
                    if bj:
                        t[i + j] = add[t[i + j]][row[bj]]
        for k in range(2 * m - 2, m - 1, -1):
            ck = t[k]
            if ck:
                row = K.mul[ck]
                red = self._red[k - m]
                for j, rj in enumerate(red):
                    if rj:
                        t[j] = add[t[j]][row[rj]]
        return tuple(t[:m])

    def _pow(self, a, n):
        result = self.one.coeffs
        base = a
        while n:
            if n & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            n >>= 1
        return result

    def enumerate(self):
        """All q^m elements, in index order (0 first, then 1, ...)."""
        q, m = self.q, self.m
        for k in range(self.size):
            yield FieldElem(self, tuple((k // q ** j) % q for j in range(m)))

    def packed_ops(self):
        """Full lookup tables for the whole tower, or None when too large."""
        if self.size > _PACKED_LIMIT:
            return None
        if self._packed is None:
            self._packed = _build_packed(self)
        return self._packed


class FieldElem:
    __slots__ = ("tower", "coeffs")

    def __init__(self, tower: FieldTower, coeffs: tuple):
        self.tower = tower
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.tower.key != self.tower.key:
                raise ValueError("elements from incompatible towers")
            return other
        if isinstance(other, int):
            return self.tower.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.tower, self.tower._add(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.tower, self.tower._neg(self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.tower, self.tower._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if not self:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElem(self.tower, self.tower._pow(self.coeffs, self.tower.size - 2))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElem(self.tower, self.tower._pow(self.coeffs, n))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.tower.key == other.tower.key and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self.tower.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.tower.key, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"FieldElem({self.tower.encode(self)!r}, q={self.tower.q}, m={self.tower.m})"

    def in_base_field(self) -> bool:
        """Structural membership test for F_q < F_{q^m}."""
        return not any(self.coeffs[1:])

    def base_index(self) -> int:
        if not self.in_base_field():
            raise ValueError(f"{self!r} is not in the base field")
        return self.coeffs[0]


@dataclass
class PackedOps:
    """Integer-indexed tables for a whole small tower (hot loops only)."""

    size: int
    add: list
    mul: list
    neg: list
    inv: list
    frob: list  # x -> x^q
    elems: list

    def to_index(self, x: FieldElem) -> int:
        q = x.tower.q
        idx = 0
        for j in reversed(range(x.tower.m)):
            idx = idx * q + x.coeffs[j]
        return idx

    def from_index(self, i: int) -> FieldElem:
        return self.elems[i]


def _build_packed(tower: FieldTower) -> PackedOps:
    q, m, size = tower.q, tower.m, tower.size
    elems = list(tower.enumerate())
    coeff_of = [e.coeffs for e in elems]
    index = {c: i for i, c in enumerate(coeff_of)}
    add = [[index[tower._add(a, b)] for b in coeff_of] for a in coeff_of]
    mul = [[index[tower._mul(a, b)] for b in coeff_of] for a in coeff_of]
    neg = [index[tower._neg(a)] for a in coeff_of]
    inv = [0] * size
    for i in range(1, size):
        inv[i] = index[tower._pow(coeff_of[i], size - 2)]
    frob = [index[tower._pow(c, q)] for c in coeff_of]
    return PackedOps(size, add, mul, neg, inv, frob, elems)


# ---------------------------------------------------------------------------
# tower construction (cached, recorded)
# ---------------------------------------------------------------------------

_TOWER_CACHE: dict = {}
_RECORDERS: list = []


def make_tower(p: int, e: int, m: int, budget: Budget = DEFAULT_BUDGET) -> FieldTower:
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if e < 1 or m < 1:
        raise ValueError("e and m must be positive")
    budget.check_field_size(p ** (e * m))
    key = (p, e, m)
    tower = _TOWER_CACHE.get(key)
    if tower is None:
        tower = FieldTower(p, e, m)
        _TOWER_CACHE[key] = tower
    for rec in _RECORDERS:
        rec.add(key)
    return tower


def tower_for_q(q: int, m: int = 1, budget: Budget = DEFAULT_BUDGET) -> FieldTower:
    """Resolve a prime power q = p^e and build the tower F_p < F_q < F_{q^m}."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    p = 2
    while q % p:
        p += 1
        if p * p > q:
            p = q
            break
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise ValueError(f"q={q} is not a prime power")
    return make_tower(p, e, m, budget)


class record_towers:
    """Context manager collecting the keys of towers touched inside it."""

    def __init__(self):
        self.keys = set()

    def __enter__(self):
        _RECORDERS.append(self.keys)
        return self.keys

    def __exit__(self, *exc):
        _RECORDERS.remove(self.keys)
        return False


# ---------------------------------------------------------------------------
# Frobenius, roots, embeddings, enumeration
# ---------------------------------------------------------------------------

def frobenius_q(x: FieldElem, i: int = 1) -> FieldElem:
    """x^(q^i), computed by repeated p-th powering."""
    if i < 0:
        raise ValueError("Frobenius power must be nonnegative")
    p = x.tower.p
    for _ in range(i * x.tower.e):
        x = x ** p
    return x


def qth_root(x: FieldElem) -> FieldElem:
    """The unique y with y^q = x, namely x^(q^(m-1))."""
    return frobenius_q(x, x.tower.m - 1)


def enumerate_field(tower: FieldTower):
    return tower.enumerate()


def embed(x: FieldElem, target: FieldTower) -> FieldElem:
    """Move x into target: same tower, or constant embedding F_q -> F_{q^m}."""
    if x.tower.key == target.key:
        return x if x.tower is target else FieldElem(target, x.coeffs)
    if (x.tower.p, x.tower.e) == (target.p, target.e) and x.tower.m == 1:
        return target.scalar(x.coeffs[0])
    raise ValueError(f"no embedding of {x.tower!r} into {target!r}")


# ---------------------------------------------------------------------------
# linear algebra over a single tower field
# ---------------------------------------------------------------------------

def matrix_rank(rows) -> int:
    """Rank of a matrix given as a list of FieldElem rows (may be empty)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return 0
    tower = rows[0][0].tower
    ops = tower.packed_ops()
    if ops is not None:
        int_rows = [[ops.to_index(x) for x in r] for r in rows]
        return _packed_rank(int_rows, ops)
    rank = 0
    ncols = len(rows[0])
    pivots = []
    for row in rows:
        for pc, prow in pivots:
            c = row[pc]
            if c:
                row[:] = [a - c * b for a, b in zip(row, prow)]
        lead = next((j for j in range(ncols) if row[j]), None)
        if lead is None:
            continue
        inv = row[lead].inverse()
        row[:] = [inv * a for a in row]
        pivots.append((lead, row))
        pivots.sort(key=lambda t: t[0])
        rank += 1
        if rank == ncols:
            break
    return rank


def _packed_rank(rows, ops: PackedOps) -> int:
    add, mul, neg, inv = ops.add, ops.mul, ops.neg, ops.inv
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    pivots = []
    rank = 0
    for row in rows:
        for pc, prow in pivots:
            c = row[pc]
            if c:
                crow = mul[neg[c]]
                row[:] = [add[a][crow[b]] for a, b in zip(row, prow)]
        lead = next((j for j in range(ncols) if row[j]), None)
        if lead is None:
            continue
        irow = mul[inv[row[lead]]]
        row[:] = [irow[a] for a in row]
        pivots.append((lead, row))
        rank += 1
        if rank == ncols:
            break
    return rank


# ---------------------------------------------------------------------------
# norm forms
# ---------------------------------------------------------------------------

def norm_form(tower: FieldTower, basis):
    """Norm of F_{q^m}/F_q written on the span of basis, as a polynomial.

    basis is a list of s <= m elements of the top field, independent over
    F_q.  The result is the degree-m form prod_{i<m} Fr^i(sum_j u_j b_j) in s
    variables; its coefficients are Galois invariant, hence lie in F_q, and
    this is verified before returning.
    """
    from . import mpoly

    basis = list(basis)
    s = len(basis)
    if not 1 <= s <= tower.m:
        raise ValueError(f"need between 1 and m={tower.m} basis elements")
    if any(b.tower.key != tower.key for b in basis):
        raise ValueError("basis elements must live in the given tower")
    K = tower._K
    if _fq_row_rank([list(b.coeffs) for b in basis], K) != s:
        raise DegenerateBasisError("basis is linearly dependent over F_q")
    form = mpoly.MPoly.one(tower, s)
    for i in range(tower.m):
        lin = mpoly.MPoly.zero(tower, s)
        for j, b in enumerate(basis):
            lin = lin + mpoly.MPoly.monomial(
                tower, s, tuple(1 if k == j else 0 for k in range(s)),
                frobenius_q(b, i))
        form = form * lin
    for coeff in form.terms.values():
        if frobenius_q(coeff, 1) != coeff:
            raise AssertionError("norm form coefficient escaped F_q")
    return form


def _fq_row_rank(rows, K) -> int:
    rows = [list(r) for r in rows]
    ncols = max(len(r) for r in rows)
    rank = 0
    pivots = []
    for row in rows:
        for pc, prow in pivots:
            c = row[pc]
            if c:
                crow = K.mul[K.neg[c]]
                row[:] = [K.add[a][crow[b]] for a, b in zip(row, prow)]
        lead = next((j for j in range(ncols) if row[j]), None)
        if lead is None:
            continue
        irow = K.mul[K.inv[row[lead]]]
        row[:] = [irow[a] for a in row]
        pivots.append((lead, row))
        rank += 1
    return rank
