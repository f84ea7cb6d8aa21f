"""Orders, fractional ideals and maximal ideals above a rational prime."""

from fractions import Fraction
from math import lcm

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf

from .errors import NotAnOrder, NotIntegral, NotSingular, RankDeficient
from .lattices import ZLattice, colon, index, lat_intersect, lat_product, lat_sum, lat_sum_many
from .linalg import hnf_any_rank, left_kernel_mod, reduce_mod_space, rref_mod


def _int_log(value, base):
    """Exact k with base**k == value (value a positive integer or Fraction)."""
    value = Fraction(value)
    if value.denominator != 1:
        raise ValueError("not an integer power")
    v = value.numerator
    k = 0
    while v > 1:
        if v % base:
            raise ValueError(f"{value} is not a power of {base}")
        v //= base
        k += 1
    return k


class Order:
    """A subring of K that is a full-rank lattice. Instances are memoized by lattice."""

    _cache = {}

    def __new__(cls, lattice, check=True):
        key = (lattice.algebra, lattice.den, lattice.rows)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        self = super().__new__(cls)
        self.lattice = lattice
        self._maximal = {}
        self._table = None
        if check:
            _check_order(lattice)
        cls._cache[key] = self
        return self

    def __init__(self, lattice, check=True):
        pass

    @property
    def algebra(self):
        return self.lattice.algebra

    @property
    def n(self):
        return self.lattice.n

    def __eq__(self, other):
        return isinstance(other, Order) and self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice)

    def __le__(self, other):
        return self.lattice.issubset(other.lattice)

    def __lt__(self, other):
        return self != other and self.lattice.issubset(other.lattice)

    def sort_key(self):
        return self.lattice.sort_key()

    def __repr__(self):
        return f"Order(index_in_Zpi={self.lattice.volume})"

    def contains(self, elem):
        return self.lattice.contains(elem)

    def index_in(self, other):
        """[other : self] as an integer."""
        v = index(other.lattice, self.lattice)
        assert v.denominator == 1
        return v.numerator

    def as_ideal(self):
        return FractionalIdeal(self.lattice, self)

    # structure constants of T in its own basis: basis_i * basis_j = sum c_ijk basis_k
    def structure_table(self):
        if self._table is None:
            L = self.lattice
            X, D = L._adj
            n = self.n
            table = []
            for i in range(n):
                row = []
                for j in range(n):
                    v = self.algebra.mul_int(L.rows[i], L.rows[j])
                    num = [0] * n
                    for k, a in enumerate(v):
                        if a:
                            Xk = X[k]
                            for t in range(n):
                                num[t] += a * Xk[t]
                    m = L.den * D
                    coords = []
                    for x in num:
                        q, r = divmod(x, m)
                        if r:
                            raise NotAnOrder("lattice is not closed under multiplication")
                        coords.append(q)
                    row.append(coords)
                table.append(row)
            self._table = table
        return self._table

    def lattice_from_coords(self, vecs, extra_scale=None):
        """Lattice spanned by integer T-coordinate vectors (plus ell*T if extra_scale=ell)."""
        L = self.lattice
        n = self.n
        rows = []
        for v in vecs:
            acc = [0] * n
            for i, a in enumerate(v):
                if a:
                    r = L.rows[i]
                    for t in range(n):
                        acc[t] += a * r[t]
            rows.append(acc)
        mod = None
        if extra_scale:
            rows.extend([[extra_scale * x for x in r] for r in L.rows])
            mod = L.int_det * extra_scale ** n
        return ZLattice.from_rows(self.algebra, rows, L.den, modulus=mod)

    def coords_of_lattice(self, M):
        """Integer coordinates (in this order's basis) of the basis rows of a sublattice M."""
        out = []
        for r in M.rows:
            c = self.lattice.coordinates(self.algebra.element(r, M.den))
            if any(x.denominator != 1 for x in c):
                raise ValueError("lattice not contained in order")
            out.append([int(x) for x in c])
        return out


def _check_order(L):
    n = L.n
    one = [1] + [0] * (n - 1)
    if not L.contains_vector(one):
        raise NotAnOrder("lattice does not contain 1")
    alg = L.algebra
    for i in range(n):
        for j in range(i, n):
            v = alg.mul_int(L.rows[i], L.rows[j])
            if not L.contains_vector(v, L.den * L.den):
                raise NotAnOrder("lattice is not closed under multiplication")


def order_of_lattice(L):
    return Order(L)


def standard_order(algebra):
    return Order(ZLattice.standard(algebra))


def order_from_generators(algebra, elems):
    """Smallest order containing Z and the given integral elements.

    Z[g_1, ..., g_k] is spanned by the monomials g_1^a_1 ... g_k^a_k with every
    a_i < n, since each g_i satisfies a monic integer polynomial of degree <= n.
    """
    for e in elems:
        if not e.is_integral():
            raise NotIntegral(f"generator {e!r} is not integral")
    n = algebra.degree
    span = [algebra.one]
    for g in elems:
        powers = [algebra.one]
        for _ in range(n - 1):
            powers.append(powers[-1] * g)
        span = _echelon_elements(algebra, [b * pw for b in span for pw in powers])
    if len(span) < n:
        raise RankDeficient("generators do not give a full-rank order")
    return Order(ZLattice.from_elements(algebra, span))


def _echelon_elements(algebra, elems):
    den = 1
    for e in elems:
        den = lcm(den, e.den)
    rows = [[c * (den // e.den) for c in e.coords] for e in elems]
    return [algebra.element(r, den) for r in hnf_any_rank(rows, algebra.degree)]


def order_generated_by_lattice(L):
    """Smallest order containing 1 and the lattice L (L must consist of integral elements)."""
    n = L.n
    cur = ZLattice.from_rows(L.algebra, [list(r) for r in L.rows] + [[L.den] + [0] * (n - 1)], L.den,
                             modulus=L.int_det)
    while True:
        nxt = lat_sum(cur, lat_product(cur, cur))
        if nxt == cur:
            return Order(cur)
        cur = nxt


def adjoin(S, elem):
    """The order S[elem] = S + elem*S + elem^2*S + ..."""
    alg = S.algebra
    cur = S.lattice
    while True:
        d = cur.den * elem.den
        rows = cur.scaled_rows(d) + [alg.mul_int(elem.coords, r) for r in cur.rows]
        nxt = ZLattice.from_rows(alg, rows, d, modulus=cur.int_det * elem.den ** cur.n)
        if nxt == cur:
            return Order(nxt)
        cur = nxt


def ring_sum(S, T):
    """Smallest order containing both S and T."""
    cur = lat_sum(S.lattice, T.lattice)
    while True:
        nxt = lat_product(cur, cur)
        if nxt == cur:
            break
        cur = nxt
    return Order(cur)


class FractionalIdeal:
    """A lattice I together with an order that multiplies it into itself."""

    def __init__(self, lattice, over):
        self.lattice = lattice
        self.over = over

    def __eq__(self, other):
        return isinstance(other, FractionalIdeal) and self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice)

    def __repr__(self):
        return f"FractionalIdeal(index={self.lattice.volume / self.over.lattice.volume})"

    def is_integral(self):
        return self.lattice.issubset(self.over.lattice)

    def times(self, other):
        return FractionalIdeal(lat_product(self.lattice, other.lattice), self.over)

    def extend(self, T):
        """I*T viewed as a T-ideal."""
        return FractionalIdeal(lat_product(self.lattice, T.lattice), T)

    def power(self, k):
        if k == 0:
            return self.over.as_ideal()
        out = self
        for _ in range(k - 1):
            out = FractionalIdeal(lat_product(out.lattice, self.lattice), self.over)
        return out

    def multiplicator_ring(self):
        return multiplicator_ring(self)

    def is_invertible(self, order=None):
        """Invertible as an ideal of ``order`` (default: its own multiplicator ring)."""
        T = order or multiplicator_ring(self)
        inv = colon(T.lattice, self.lattice)
        return lat_product(self.lattice, inv) == T.lattice


class MaximalIdeal(FractionalIdeal):
    """A maximal ideal m of ``over`` with residue field of size residue_size = ell^f."""

    def __init__(self, lattice, over, residue_char, residue_size, subspace=None):
        super().__init__(lattice, over)
        self.residue_char = residue_char
        self.residue_size = residue_size
        self.subspace = subspace
        self._singular = None

    @property
    def is_singular(self):
        if self._singular is None:
            self._singular = is_singular(self)
        return self._singular

    @property
    def residue_degree(self):
        return _int_log(self.residue_size, self.residue_char)

    def __repr__(self):
        return f"MaximalIdeal(ell={self.residue_char}, size={self.residue_size})"


def multiplicator_ring(I):
    return Order(colon(I.lattice, I.lattice), check=False)


def is_singular(m):
    """Singular iff (m : m) differs from the order (equivalently m is not invertible)."""
    return colon(m.lattice, m.lattice) != m.over.lattice


# ------------------------------------------------------------ maximal ideals


def _mul_mod(table, u, v, p, n):
    out = [0] * n
    for i, a in enumerate(u):
        if a:
            ti = table[i]
            for j, b in enumerate(v):
                if b:
                    ab = a * b
                    row = ti[j]
                    for k in range(n):
                        if row[k]:
                            out[k] += ab * row[k]
    return [x % p for x in out]


def _pow_mod(table, u, e, p, n, one):
    result = one
    base = u
    while e:
        if e & 1:
            result = _mul_mod(table, result, base, p, n)
        base = _mul_mod(table, base, base, p, n)
        e >>= 1
    return result


def _mat_pow_mod(M, e, p):
    n = len(M)
    result = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = M
    while e:
        if e & 1:
            result = [[sum(result[i][k] * base[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]
        base = [[sum(base[i][k] * base[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]
        e >>= 1
    return result


def _ideal_span(table, gens, V, p, n):
    """Subspace V + sum gens * T (mod p), returned in rref."""
    rows = [list(v) for v in V]
    for g in gens:
        for i in range(n):
            e = [0] * n
            e[i] = 1
            rows.append(_mul_mod(table, g, e, p, n))
    basis, piv = rref_mod(rows, n, p)
    return basis, piv


def _roots_mod(poly_asc, p):
    """Roots in F_p of a squarefree split polynomial (ascending coefficients)."""
    f = [ZZ(c % p) for c in reversed(poly_asc)]
    _, factors = gf_factor_sqf(f, p, ZZ)
    roots = []
    for fac in factors:
        if len(fac) == 2:
            # fac = [a, b] means a*x + b
            a, b = int(fac[0]), int(fac[1])
            roots.append((-b * pow(a, -1, p)) % p)
    return sorted(roots)


def _min_poly_mod(table, e, V, piv, p, n, one):
    """Minimal polynomial of e in T/(V) over F_p, ascending, monic."""
    powers = []
    cur = one
    while True:
        red = reduce_mod_space(cur, V, piv, p)
        # express red in terms of previous reduced powers
        rows = [pw for pw in powers] + [red]
        ker = left_kernel_mod(rows, p)
        dep = [k for k in ker if k[-1] % p]
        if dep:
            k = dep[0]
            inv = pow(k[-1], -1, p)
            return [(c * inv) % p for c in k]
        powers.append(red)
        cur = _mul_mod(table, cur, e, p, n)


def _mod_data(T, p):
    """Structure table mod p, coordinates of 1, Frobenius matrix and radical of T/pT."""
    key = ("mod", p)
    if key in T._maximal:
        return T._maximal[key]
    n = T.n
    table = [[[x % p for x in c] for c in row] for row in T.structure_table()]
    one = [int(x) % p for x in T.lattice.coordinates(T.algebra.one)]
    # Frobenius x -> x^p is F_p-linear on T/pT; its iterates kill exactly the nilradical
    frob = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        frob.append(_pow_mod(table, e, p, p, n, one))
    k = 1
    while p ** k < n:
        k += 1
    radical = left_kernel_mod(_mat_pow_mod(frob, k, p), p)
    rad_basis, rad_piv = rref_mod(radical, n, p)
    data = (table, one, frob, rad_basis, rad_piv)
    T._maximal[key] = data
    return data


def ell_radical(T, ell):
    """Preimage in T of the nilradical of T/ell*T (the intersection of the maximal ideals above ell)."""
    _, _, _, rad_basis, _ = _mod_data(T, ell)
    return FractionalIdeal(T.lattice_from_coords(rad_basis, extra_scale=ell), T)


def maximal_ideals_above(T, ell):
    """All maximal ideals of T containing ell, sorted by (residue size, lattice)."""
    if ell in T._maximal:
        return T._maximal[ell]
    n = T.n
    p = ell
    table, one, frob, rad_basis, rad_piv = _mod_data(T, p)
    found = []

    def split(V, piv):
        # fixed space of Frobenius modulo V: x^p - x in V
        rows = []
        for i in range(n):
            diff = [(frob[i][t] - (1 if t == i else 0)) % p for t in range(n)]
            rows.append(reduce_mod_space(diff, V, piv, p))
        fixed = left_kernel_mod(rows, p)
        s = len(fixed) - len(V)
        if s == 1:
            found.append((V, piv))
            return
        W, wpiv = rref_mod(list(V) + [one], n, p)
        e = None
        for f in fixed:
            r = reduce_mod_space(f, W, wpiv, p)
            if any(r):
                e = f
                break
        assert e is not None
        mp = _min_poly_mod(table, e, V, piv, p, n, one)
        for c in _roots_mod(mp, p):
            gen = [(x - c * o) % p for x, o in zip(e, one)]
            Vc, pc = _ideal_span(table, [gen], V, p, n)
            if len(Vc) < n:
                split(Vc, pc)

    split(rad_basis, rad_piv)
    out = []
    for V, piv in found:
        lat = T.lattice_from_coords(V, extra_scale=p)
        size = p ** (n - len(V))
        out.append(MaximalIdeal(lat, T, p, size, subspace=(tuple(map(tuple, V)), tuple(piv))))
    out.sort(key=lambda m: (m.residue_size, m.lattice.sort_key()))
    T._maximal[ell] = out
    return out


def maximal_ideals_containing(T, I, ell):
    return [m for m in maximal_ideals_above(T, ell) if I.lattice.issubset(m.lattice)]


def singular_primes_above(T, ell):
    return [m for m in maximal_ideals_above(T, ell) if m.is_singular]


def cm_type(T, m):
    """Cohen-Macaulay type of T at m: dim over T/m of (T:m)/T."""
    ext = colon(T.lattice, m.lattice)
    size = index(ext, T.lattice)
    return _int_log(size, m.residue_size)


def is_gorenstein_at(T, ell):
    return all(cm_type(T, m) == 1 for m in maximal_ideals_above(T, ell))


def is_gorenstein_at_ideal(T, m):
    return cm_type(T, m) == 1


def is_bass_at(R, l):
    """R is Bass at l: every l-overorder is Gorenstein at its maximal ideals above l."""
    from .ladders import l_overorders
    for S in l_overorders(R, l):
        for M in maximal_ideals_above(S, l.residue_char):
            # M lies over l exactly when it contains l
            if l.lattice.issubset(M.lattice) and cm_type(S, M) != 1:
                return False
    return True


def is_bass(R, overorders=None):
    """Global definition: every overorder of R is Gorenstein (cross-check on small cases)."""
    from .ladders import enumerate_overorders
    from .maximalization import singular_rational_primes
    orders = overorders if overorders is not None else enumerate_overorders(R)
    primes = singular_rational_primes(R)
    for S in orders:
        for ell in primes:
            if not is_gorenstein_at(S, ell):
                return False
    return True


def ideal_from_elements(T, elems):
    """The T-ideal generated by the given elements (must have full rank)."""
    lats = [T.lattice.mul_element(e) for e in elems]
    return FractionalIdeal(lat_sum_many(lats), T)


def restrict_ideal(M, R):
    """M cap R as an ideal of R."""
    return FractionalIdeal(lat_intersect(M.lattice, R.lattice), R)


def as_maximal_ideal(I, ell):
    """Wrap an ideal known to be maximal in its order into a MaximalIdeal."""
    for m in maximal_ideals_above(I.over, ell):
        if m.lattice == I.lattice:
            return m
    raise ValueError("ideal is not maximal above ell")


__all__ = [
    "Order", "FractionalIdeal", "MaximalIdeal", "order_from_generators", "standard_order",
    "maximal_ideals_above", "is_singular", "multiplicator_ring", "cm_type", "is_gorenstein_at",
    "is_bass_at", "is_bass", "adjoin", "ring_sum", "NotSingular",
]
