"""The etale algebra K = Q[x]/(h) in the power basis 1, pi, ..., pi^(n-1)."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from sympy import Poly, symbols, factorint

from .errors import BadPolynomial, NotIntegral, NotInvertible, NotSquarefree, ZeroDivisor

_X = symbols("x")


def _poly(coeffs):
    return Poly(list(reversed(coeffs)), _X)


def poly_str(coeffs, var="x"):
    """Human readable form of an ascending coefficient list."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True, eq=False)
class EtaleAlgebra:
    """K = Q[x]/(h) for a monic squarefree integer polynomial h (ascending coefficients)."""

    h: tuple
    q: int = None
    p: int = None
    _tail: tuple = field(repr=False, default=())

    @property
    def degree(self):
        return len(self.h) - 1

    def __eq__(self, other):
        return isinstance(other, EtaleAlgebra) and self.h == other.h and self.q == other.q

    def __hash__(self):
        return hash((self.h, self.q))

    # -- integer vector arithmetic (coordinates in Z[pi]) --

    def mul_int(self, a, b):
        n = self.degree
        c = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        c[i + j] += ai * bj
        out = c[:n]
        for k in range(n, 2 * n - 1):
            ck = c[k]
            if ck:
                red = self._tail[k - n]
                for j in range(n):
                    out[j] += ck * red[j]
        return out

    @cached_property
    def mult_table(self):
        n = self.degree
        basis = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return tuple(tuple(tuple(self.mul_int(basis[i], basis[j])) for j in range(n)) for i in range(n))

    def mult_matrix(self, a):
        """Rows are a * pi^i, so x * a = x-row-vector times this matrix."""
        n = self.degree
        rows = [list(a)]
        for _ in range(1, n):
            prev = rows[-1]
            top = prev[-1]
            row = [0] + prev[:-1]
            if top:
                red = self._tail[0]
                row = [row[j] + top * red[j] for j in range(n)]
            rows.append(row)
        return rows

    @cached_property
    def power_traces(self):
        """Tr(pi^k) for k = 0 .. 2n-2 via Newton's identities."""
        n = self.degree
        # h = x^n + c_{n-1} x^{n-1} + ... + c_0 ; e-coefficients
        c = self.h
        traces = [n]
        for k in range(1, 2 * n - 1):
            s = 0
            for i in range(1, min(k, n) + 1):
                # coefficient of x^{n-i}
                ci = c[n - i]
                if k - i == 0:
                    s -= i * ci
                else:
                    s -= ci * traces[k - i]
            traces.append(s)
        return tuple(traces)

    def trace_int(self, a):
        t = self.power_traces
        return sum(ai * t[i] for i, ai in enumerate(a))

    def element(self, coords, den=1):
        return AlgebraElement(self, coords, den)

    @property
    def one(self):
        return self.element([1] + [0] * (self.degree - 1))

    @property
    def pi(self):
        if self.degree == 1:
            return self.element([-self.h[0]])
        return self.element([0, 1] + [0] * (self.degree - 2))

    def q_over_pi(self):
        if self.q is None:
            raise BadPolynomial("algebra has no q")
        return self.pi.inverse() * self.q

    def __repr__(self):
        return f"EtaleAlgebra(h={poly_str(self.h)}, q={self.q})"


def make_algebra(h, q=None):
    """Build K = Q[x]/(h). ``h`` is an ascending integer coefficient list."""
    h = [int(c) for c in h]
    while len(h) > 1 and h[-1] == 0:
        h.pop()
    if len(h) < 2:
        raise BadPolynomial("degree must be at least 1")
    if h[-1] != 1:
        raise BadPolynomial("h must be monic")
    P = _poly(h)
    if P.degree() > 1 and P.gcd(P.diff(_X)).degree() > 0:
        raise NotSquarefree("gcd(h, h') is not 1")
    if h[0] == 0:
        raise NotInvertible("h(0) = 0, so pi is not invertible")
    n = len(h) - 1
    # reductions of x^k for k = n .. 2n-2
    tail = []
    cur = [-c for c in h[:n]]
    tail.append(tuple(cur))
    for _ in range(n, 2 * n - 2):
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            nxt = [nxt[j] - top * h[j] for j in range(n)]
        cur = nxt
        tail.append(tuple(cur))
    p = None
    if q is not None:
        q = int(q)
        fac = factorint(q)
        if q < 2 or len(fac) != 1:
            raise BadPolynomial(f"q = {q} is not a prime power")
        p = next(iter(fac))
    A = EtaleAlgebra(tuple(h), q, p, tuple(tail))
    if q is not None:
        try:
            A.q_over_pi().integer_minimal_polynomial()
        except NotIntegral:
            raise BadPolynomial("q/pi is not integral") from None
    return A


def _solve_rational(rows, rhs):
    """Solve x * M = rhs for square M (rows), exact. Returns list of Fractions or None."""
    n = len(rows)
    # transpose system: M^T x^T = rhs^T
    A = [[Fraction(rows[j][i]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


class AlgebraElement:
    """An element (1/den) * sum coords[i] pi^i, kept in lowest terms."""

    __slots__ = ("algebra", "coords", "den")

    def __init__(self, algebra, coords, den=1):
        coords = [int(c) for c in coords]
        if len(coords) != algebra.degree:
            raise ValueError("coordinate vector has wrong length")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            den, coords = -den, [-c for c in coords]
        g = gcd(den, *coords) if coords else den
        if g > 1:
            den //= g
            coords = [c // g for c in coords]
        self.algebra = algebra
        self.coords = tuple(coords)
        self.den = den

    @classmethod
    def from_fractions(cls, algebra, fracs):
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        return cls(algebra, [int(f * den) for f in fracs], den)

    def fractions(self):
        return [Fraction(c, self.den) for c in self.coords]

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            return other
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return AlgebraElement(self.algebra, [f.numerator] + [0] * (self.algebra.degree - 1), f.denominator)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.den * o.den
        return AlgebraElement(self.algebra, [a * o.den + b * self.den for a, b in zip(self.coords, o.coords)], d)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.coords], self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraElement(self.algebra, self.algebra.mul_int(self.coords, o.coords), self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, k):
        result = self.algebra.one
        base = self
        if k < 0:
            base, k = self.inverse(), -k
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.algebra == o.algebra and self.coords == o.coords and self.den == o.den

    def __hash__(self):
        return hash((self.coords, self.den))

    def is_zero(self):
        return not any(self.coords)

    def inverse(self):
        A = self.algebra
        M = A.mult_matrix(self.coords)
        sol = _solve_rational(M, [1] + [0] * (A.degree - 1))
        if sol is None:
            raise ZeroDivisor("element is a zero divisor")
        return AlgebraElement.from_fractions(A, [s * self.den for s in sol])

    def trace(self):
        return Fraction(self.algebra.trace_int(self.coords), self.den)

    def minimal_polynomial(self):
        """Monic minimal polynomial over Q, ascending list of Fractions."""
        A = self.algebra
        n = A.degree
        powers = [A.one.fractions()]
        cur = A.one
        for k in range(1, n + 1):
            cur = cur * self
            target = cur.fractions()
            # solve target = sum_{i<k} c_i * powers[i] (least squares not needed: exact)
            sol = _solve_span(powers, target)
            if sol is not None:
                return [-c for c in sol] + [Fraction(1)]
            powers.append(target)
        raise AssertionError("minimal polynomial degree exceeds n")

    def integer_minimal_polynomial(self):
        mp = self.minimal_polynomial()
        if any(c.denominator != 1 for c in mp):
            raise NotIntegral("element is not integral over Z")
        return [int(c) for c in mp]

    def is_integral(self):
        try:
            self.integer_minimal_polynomial()
        except NotIntegral:
            return False
        return True

    def __repr__(self):
        body = poly_str(self.coords, "pi")
        return body if self.den == 1 else f"({body})/{self.den}"


def _solve_span(vectors, target):
    """Coefficients c with sum c_i vectors[i] = target, or None."""
    k = len(vectors)
    n = len(target)
    A = [[vectors[i][r] for i in range(k)] + [target[r]] for r in range(n)]
    row = 0
    pivcols = []
    for col in range(k):
        piv = next((r for r in range(row, n) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [x * inv for x in A[row]]
        for r in range(n):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        pivcols.append(col)
        row += 1
    for r in range(row, n):
        if A[r][k] != 0:
            return None
    sol = [Fraction(0)] * k
    for r, col in enumerate(pivcols):
        sol[col] = A[r][k]
    return sol
