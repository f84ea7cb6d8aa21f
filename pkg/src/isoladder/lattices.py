"""Full-rank Z-lattices in K, kept in a canonical Hermite normal form.

A lattice is (1/den) * rowspan(rows) where rows is an upper-triangular integer
matrix with positive pivots and entries above each pivot reduced modulo it.
The denominator is minimal, so equal lattices have identical fields.
"""

from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

from .algebra_core import AlgebraElement
from .errors import MismatchedAlgebra, NotContained, RankDeficient
from .linalg import (content, elementary_divisors, hnf, mat_mul, transpose,
                     triangular_adjugate, triangular_det)


class ZLattice:
    __slots__ = ("algebra", "rows", "den", "__dict__")

    def __init__(self, algebra, rows, den):
        self.algebra = algebra
        self.rows = rows
        self.den = den

    # ---- construction

    @classmethod
    def from_rows(cls, algebra, rows, den=1, modulus=None):
        """Normalize an arbitrary generating set (integer rows over ``den``)."""
        n = algebra.degree
        try:
            H = hnf(rows, n, modulus)
        except ValueError:
            raise RankDeficient("generators do not span a full-rank lattice") from None
        return cls._canonical(algebra, H, den)

    @classmethod
    def _canonical(cls, algebra, H, den):
        g = gcd(content(H), den)
        if g > 1:
            H = [[x // g for x in row] for row in H]
            den //= g
        return cls(algebra, tuple(tuple(r) for r in H), den)

    @classmethod
    def from_elements(cls, algebra, elems):
        den = 1
        for e in elems:
            den = lcm(den, e.den)
        rows = [[c * (den // e.den) for c in e.coords] for e in elems]
        return cls.from_rows(algebra, rows, den)

    @classmethod
    def standard(cls, algebra):
        """Z[pi] itself."""
        n = algebra.degree
        return cls(algebra, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), 1)

    # ---- basic data

    @property
    def n(self):
        return self.algebra.degree

    def __eq__(self, other):
        return (isinstance(other, ZLattice) and self.den == other.den and self.rows == other.rows
                and self.algebra == other.algebra)

    def __hash__(self):
        return hash((self.rows, self.den))

    def sort_key(self):
        return (self.den, self.rows)

    def __repr__(self):
        return f"ZLattice(den={self.den}, rows={[list(r) for r in self.rows]})"

    @cached_property
    def int_det(self):
        return triangular_det(self.rows)

    @cached_property
    def volume(self):
        """Covolume relative to Z[pi]: det(rows) / den^n."""
        return Fraction(self.int_det, self.den ** self.n)

    @cached_property
    def _adj(self):
        return triangular_adjugate([list(r) for r in self.rows])

    def basis(self):
        return [AlgebraElement(self.algebra, r, self.den) for r in self.rows]

    def scaled_rows(self, den):
        """Integer rows of this lattice written over the common denominator ``den``."""
        f = den // self.den
        if f == 1:
            return [list(r) for r in self.rows]
        return [[x * f for x in r] for r in self.rows]

    def to_json(self):
        return {"denominator": str(self.den), "rows": [[str(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, algebra, data):
        rows = [[int(x) for x in r] for r in data["rows"]]
        return cls.from_rows(algebra, rows, int(data["denominator"]))

    # ---- membership

    def coordinates(self, elem):
        """Coordinates of ``elem`` in this basis as Fractions."""
        X, D = self._adj
        # x = c * (rows/den)  =>  c = x * den * rows^{-1} = x * den * X / D
        num = [0] * self.n
        for k, a in enumerate(elem.coords):
            if a:
                Xk = X[k]
                for j in range(self.n):
                    num[j] += a * Xk[j]
        scale = Fraction(self.den, elem.den * D)
        return [scale * v for v in num]

    def contains_vector(self, vec, den=1):
        X, D = self._adj
        num = [0] * self.n
        for k, a in enumerate(vec):
            if a:
                Xk = X[k]
                for j in range(self.n):
                    num[j] += a * Xk[j]
        m = den * D
        return all((v * self.den) % m == 0 for v in num)

    def contains(self, elem):
        return self.contains_vector(elem.coords, elem.den)

    def issubset(self, other):
        _check(self, other)
        return all(other.contains_vector(r, self.den) for r in self.rows)

    def __le__(self, other):
        return self.issubset(other)

    def __lt__(self, other):
        return self != other and self.issubset(other)

    def scale(self, c):
        """c * L for a nonzero rational c."""
        c = Fraction(c)
        rows = [[x * abs(c.numerator) for x in r] for r in self.rows]
        return ZLattice.from_rows(self.algebra, rows, self.den * c.denominator,
                                  modulus=self.int_det * abs(c.numerator) ** self.n)

    def mul_element(self, elem):
        """elem * L (elem must be regular for the result to be full rank)."""
        rows = [self.algebra.mul_int(elem.coords, r) for r in self.rows]
        return ZLattice.from_rows(self.algebra, rows, self.den * elem.den)


def _check(a, b):
    if a.algebra != b.algebra:
        raise MismatchedAlgebra("lattices live in different algebras")


def lat_sum(L1, L2):
    _check(L1, L2)
    d = lcm(L1.den, L2.den)
    A = L1.scaled_rows(d)
    B = L2.scaled_rows(d)
    mod = triangular_det(A)
    return ZLattice.from_rows(L1.algebra, A + B, d, modulus=mod)


def lat_sum_many(lats):
    out = lats[0]
    for L in lats[1:]:
        out = lat_sum(out, L)
    return out


def lat_intersect(L1, L2):
    """Intersection via the kernel of the stacked system [[B1, B1], [B2, 0]]."""
    _check(L1, L2)
    n = L1.n
    d = lcm(L1.den, L2.den)
    A = L1.scaled_rows(d)
    B = L2.scaled_rows(d)
    rows = [a + a for a in A] + [b + [0] * n for b in B]
    mod = triangular_det(A) * triangular_det(B)
    H = hnf(rows, 2 * n, mod)
    kernel_part = [row[n:] for row in H[n:]]
    return ZLattice._canonical(L1.algebra, kernel_part, d)


def lat_product(L1, L2):
    _check(L1, L2)
    alg = L1.algebra
    rows = [alg.mul_int(a, b) for a in L1.rows for b in L2.rows]
    # L1 contains det(L1)*Z[pi], so L1*L2 contains det(L1)*L2 and hence det(L1)det(L2)*Z^n
    mod = L1.int_det * L2.int_det
    return ZLattice.from_rows(alg, rows, L1.den * L2.den, modulus=mod)


def lat_power(L, k):
    out = L
    for _ in range(k - 1):
        out = lat_product(out, L)
    return out


def colon(L1, L2):
    """(L1 : L2) = {x in K : x L2 in L1}."""
    _check(L1, L2)
    alg = L1.algebra
    n = L1.n
    X1, D1 = L1._adj
    # x * b_j in L1  <=>  x * Mult(m_j) * X1 * (d1 / (d2 * D1)) integral, b_j = m_j / d2
    cols = []
    for m in L2.rows:
        E = mat_mul(alg.mult_matrix(m), X1)
        cols.extend(transpose(E))
    W = hnf(cols, n)
    NW, DW = triangular_adjugate(W)
    r = Fraction(L2.den * D1, L1.den * DW)
    rows = [[x * r.numerator for x in row] for row in transpose(NW)]
    mod = abs(r.numerator) ** n * DW ** (n - 1)
    return ZLattice.from_rows(alg, rows, r.denominator, modulus=mod)


def index(L1, L2):
    """Generalized index [L1 : L2] = vol(L2) / vol(L1)."""
    _check(L1, L2)
    return L2.volume / L1.volume


def quotient_invariants(L1, L2):
    """Invariant factors of L1/L2 (requires L2 inside L1)."""
    if not L2.issubset(L1):
        raise NotContained("second lattice is not contained in the first")
    X1, D1 = L1._adj
    rel = mat_mul([list(r) for r in L2.rows], X1)
    scale = Fraction(L1.den, L2.den * D1)
    M = [[int(x * scale) for x in row] for row in rel]
    return elementary_divisors(M)
