"""l-maximal overorders, the maximal order and conductors."""

import os
from dataclasses import dataclass

from sympy import discriminant, isprime, symbols
from sympy.ntheory import pollard_rho, primerange

from .errors import FactorizationIncomplete
from .lattices import colon, lat_sum
from .orders import FractionalIdeal, Order, ell_radical, standard_order

TRIAL_BOUND = int(os.environ.get("ISOLADDER_TRIAL_BOUND", 10 ** 6))
RHO_SEED = 2
RHO_RETRIES = 8

_x = symbols("x")


@dataclass(frozen=True)
class FactoredIndex:
    """Prime factorization covering every prime where the starting order may be non-maximal."""

    primes: tuple
    source: str = "trial_division"

    @classmethod
    def parse(cls, text):
        """Parse 'p1^e1,p2^e2,...' (exponent optional)."""
        out = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "^" in part:
                p, e = part.split("^")
                out.append((int(p), int(e)))
            else:
                out.append((int(part), 1))
        return cls(tuple(sorted(out)), "user_supplied")


def factor_integer(N, bound=None):
    """Factor |N| by trial division to ``bound`` then Pollard rho with a fixed seed.

    Returns (factors dict, source). Raises FactorizationIncomplete with the cofactor.
    """
    bound = TRIAL_BOUND if bound is None else bound
    N = abs(N)
    factors = {}
    source = "trial_division"
    for p in primerange(2, bound + 1):
        if p * p > N:
            break
        if N % p == 0:
            e = 0
            while N % p == 0:
                N //= p
                e += 1
            factors[p] = e
    if N == 1:
        return factors, source
    stack = [N]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= bound * bound or isprime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        source = "pollard_rho"
        d = None
        for attempt in range(RHO_RETRIES):
            d = pollard_rho(m, seed=RHO_SEED + attempt, retries=2)
            if d:
                break
        if not d:
            raise FactorizationIncomplete("could not factor the discriminant", cofactor=str(m))
        stack.extend([d, m // d])
    return factors, source


def polynomial_discriminant(h):
    return int(discriminant(sum(c * _x ** i for i, c in enumerate(h)), _x))


def discriminant_factors(algebra, bound=None):
    cached = _disc_cache.get(algebra)
    if cached is None:
        cached = factor_integer(polynomial_discriminant(algebra.h), bound)
        _disc_cache[algebra] = cached
    return cached


_disc_cache = {}
_max_cache = {}
_lmax_cache = {}


def l_maximal_overorder(T, ell):
    """Smallest overorder of T that is maximal at every prime above ell."""
    key = (T, ell)
    if key in _lmax_cache:
        return _lmax_cache[key]
    cur = T
    while True:
        J = ell_radical(cur, ell)
        nxt = Order(colon(J.lattice, J.lattice), check=False)
        if nxt == cur:
            break
        cur = nxt
    _lmax_cache[key] = cur
    return cur


def maximal_order(algebra, hints=None):
    """O_K as the sum of the ell-maximalizations of Z[pi] over primes with ell^2 | disc(h)."""
    if hints is None and algebra in _max_cache:
        return _max_cache[algebra]
    if hints is not None:
        primes = [p for p, e in hints.primes if e >= 2]
    else:
        factors, _ = discriminant_factors(algebra)
        primes = sorted(p for p, e in factors.items() if e >= 2)
    Zpi = standard_order(algebra)
    lat = Zpi.lattice
    for p in primes:
        lat = lat_sum(lat, l_maximal_overorder(Zpi, p).lattice)
    O = Order(lat)
    if hints is None:
        _max_cache[algebra] = O
    return O


def set_maximal_order_hints(algebra, hints):
    """Compute O_K from user-supplied factors and remember it for this algebra."""
    O = maximal_order(algebra, hints)
    _max_cache[algebra] = O
    return O


def singular_rational_primes(T):
    """Rational primes dividing [O_K : T]."""
    O = maximal_order(T.algebra)
    idx = T.index_in(O)
    factors, _ = discriminant_factors(T.algebra)
    return sorted(p for p in factors if idx % p == 0)


def conductor(T):
    """f_T = (T : O_K), an O_K-ideal inside T."""
    O = maximal_order(T.algebra)
    return FractionalIdeal(colon(T.lattice, O.lattice), O)


def conductor_l_part(T, ell):
    """(T : O) for O the ell-maximal overorder of T; agrees with f_T at every prime above ell."""
    O = l_maximal_overorder(T, ell)
    return FractionalIdeal(colon(T.lattice, O.lattice), O)
