"""Minimal l-overorders, splitting types, multiplicator ladders and overorder enumeration."""

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from sympy import factorint

from .errors import EnumerationTooLarge, NotALadder, NotContained, NotMinimal, NotSingular, ValuationMismatch
from .lattices import ZLattice, colon, index, lat_intersect, lat_power, lat_product, lat_sum
from .linalg import rref_mod
from .orders import (MaximalIdeal, Order, adjoin, cm_type, is_bass_at,
                     maximal_ideals_above, multiplicator_ring)
from .maximalization import conductor_l_part, l_maximal_overorder, maximal_order

QUOTIENT_LIMIT = int(os.environ.get("ISOLADDER_QUOTIENT_LIMIT", 2 ** 16))

INERT, SPLIT, RAMIFIED, SINGULAR = "Inert", "Split", "Ramified", "Singular"
DELTA = {INERT: -1, RAMIFIED: 0, SPLIT: 1}


@dataclass
class SplittingType:
    """How l behaves in its minimal overorder T = (l:l)."""

    variant: str
    f: int = None
    ideals: tuple = ()

    @property
    def delta(self):
        return DELTA.get(self.variant)

    def describe(self):
        return f"Inert({self.f})" if self.variant == INERT else self.variant


@dataclass
class MultiplicatorLadder:
    """The chain R = R_d < ... < R_0. ``orders[i]`` is R_i and ``primes[i]`` is L_i (i >= 1)."""

    orders: list
    primes: list
    base_prime: MaximalIdeal
    conductors: list
    top_splitting: SplittingType = None
    verified: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def d(self):
        return len(self.orders) - 1

    @property
    def rungs(self):
        return list(reversed(self.orders))

    @property
    def base(self):
        return self.orders[-1]

    @property
    def top(self):
        return self.orders[0]

    @property
    def residue_size(self):
        return self.base_prime.residue_size

    @property
    def delta(self):
        return self.top_splitting.delta if self.top_splitting else None


# ------------------------------------------------------------------ helpers


def _prime_factors(n):
    return sorted(factorint(n))


def is_l_overorder(R, l, S):
    """S is an l-overorder of R: (R:S) is R or its only maximal ideal overhead is l."""
    C = colon(R.lattice, S.lattice)
    if C == R.lattice:
        return True
    if not C.issubset(l.lattice):
        return False
    idx = index(R.lattice, C).numerator
    for p in _prime_factors(idx):
        for m in maximal_ideals_above(R, p):
            if m.lattice != l.lattice and C.issubset(m.lattice):
                return False
    return True


def _torsion_lines(S, U, ell):
    """Representatives y of the lines of (U cap ell^-1 S)/S, the ell-torsion of U/S."""
    X = lat_intersect(U.lattice, S.lattice.scale(Fraction(1, ell)))
    k_size = index(X, S.lattice)
    if k_size == 1:
        return []
    # coordinates of S basis in X basis, reduced mod ell
    coords = []
    for r in S.lattice.rows:
        c = X.coordinates(S.algebra.element(r, S.lattice.den))
        coords.append([int(x) for x in c])
    n = S.n
    _, piv = rref_mod(coords, n, ell)
    free = [c for c in range(n) if c not in piv]
    xs = X.basis()
    out = []
    for vec in product(range(ell), repeat=len(free)):
        lead = next((v for v in vec if v), 0)
        if lead != 1:
            continue
        y = None
        for c, a in zip(free, vec):
            if a:
                term = xs[c] * a
                y = term if y is None else y + term
        out.append(y)
    return out


def orders_between(R, U, limit=None):
    """Every order S with R <= S <= U, sorted canonically (brute force)."""
    limit = QUOTIENT_LIMIT if limit is None else limit
    size = R.index_in(U)
    if size > limit:
        raise EnumerationTooLarge(f"quotient of size {size} exceeds limit {limit}", size=size)
    seen = {R}
    queue = [R]
    while queue:
        S = queue.pop()
        idx = S.index_in(U)
        for ell in _prime_factors(idx) if idx > 1 else []:
            for y in _torsion_lines(S, U, ell):
                T = adjoin(S, y)
                if T not in seen:
                    seen.add(T)
                    queue.append(T)
    return sorted(seen, key=lambda O: (O.index_in(U), O.sort_key()))


def minimal_overorders_within(R, U, keep=None):
    """Minimal elements among the orders R < S <= U (optionally filtered by ``keep``)."""
    cands = set()
    idx = R.index_in(U)
    for ell in _prime_factors(idx) if idx > 1 else []:
        for y in _torsion_lines(R, U, ell):
            T = adjoin(R, y)
            if T != R and (keep is None or keep(T)):
                cands.add(T)
    mins = [T for T in cands if not any(S != T and S < T for S in cands)]
    return sorted(mins, key=lambda O: O.sort_key())


_lover_cache = {}


def l_overorders(R, l, limit=None):
    """All l-overorders of R (brute force inside the ell-maximal overorder)."""
    key = (R, l.lattice)
    if key not in _lover_cache:
        U = l_maximal_overorder(R, l.residue_char)
        _lover_cache[key] = [S for S in orders_between(R, U, limit) if is_l_overorder(R, l, S)]
    return _lover_cache[key]


def ideals_above(T, l):
    """Maximal ideals of the overorder T lying above the maximal ideal l of a suborder."""
    return [M for M in maximal_ideals_above(T, l.residue_char) if l.lattice.issubset(M.lattice)]


def extend_to_maximal(l, T):
    """l*T as a MaximalIdeal of T when it is one, else None."""
    lat = lat_product(l.lattice, T.lattice)
    for M in maximal_ideals_above(T, l.residue_char):
        if M.lattice == lat:
            return M
    return None


# ------------------------------------------------------------------ operations


def minimal_l_overorder(R, l):
    """(T, unique) with T = (l:l); unique is True iff T is the only minimal l-overorder of R."""
    if not l.is_singular:
        raise NotSingular("l is regular; it has no proper l-overorder")
    T = multiplicator_ring(l)
    if cm_type(R, l) == 1:
        return T, True
    U = l_maximal_overorder(R, l.residue_char)
    mins = minimal_overorders_within(R, U, keep=lambda S: is_l_overorder(R, l, S))
    return T, mins == [T]


def classify_splitting(R, l):
    """Inert / Split / Ramified / Singular behaviour of l in T = (l:l)."""
    T, unique = minimal_l_overorder(R, l)
    if not unique:
        raise NotMinimal("(l:l) is not the unique minimal l-overorder")
    above = ideals_above(T, l)
    if len(above) == 2:
        return SplittingType(SPLIT, ideals=tuple(above))
    if len(above) != 1:
        raise AssertionError(f"{len(above)} maximal ideals above l in a minimal overorder")
    L = above[0]
    if L.lattice == l.lattice:
        f = 0
        size = l.residue_size
        while size < L.residue_size:
            size *= l.residue_size
            f += 1
        return SplittingType(INERT, f=f + 1, ideals=(L,))
    sq = lat_product(L.lattice, L.lattice)
    if sq == l.lattice:
        return SplittingType(RAMIFIED, ideals=(L,))
    assert sq.issubset(l.lattice) and sq != l.lattice
    return SplittingType(SINGULAR, ideals=(L,))


def build_ladder(R, l, verify=True, limit=None):
    """The l-multiplicator ladder of R, or NotALadder naming the violated condition."""
    ell = l.residue_char
    orders = [R]
    primes = [l]
    cur, L = R, l
    level = 0
    while L.is_singular:
        T, unique = minimal_l_overorder(cur, L)
        if not unique:
            raise NotALadder("multiplicator-ring jump", reason="multiplicator-ring jump", rung=level)
        if lat_product(l.lattice, T.lattice) != L.lattice:
            raise NotALadder("extension of l differs from the rung ideal",
                             reason="extension mismatch", rung=level)
        above = ideals_above(T, L)
        singular = [M for M in above if M.is_singular]
        orders.append(T)
        level += 1
        if not singular:
            break
        if len(above) > 1:
            raise NotALadder("two maximal ideals above l mid-chain",
                             reason="several maximal ideals above l", rung=level)
        cur, L = T, singular[0]
        primes.append(L)
    orders.reverse()
    primes = [None] + list(reversed(primes)) if len(orders) > 1 else [None]
    top_split = classify_splitting(orders[1], primes[1]) if len(orders) > 1 else None
    conductors = [conductor_l_part(S, ell) for S in orders]
    ladder = MultiplicatorLadder(orders, primes, l, conductors, top_split)
    if verify and ladder.d > 0:
        try:
            found = set(l_overorders(R, l, limit))
        except EnumerationTooLarge:
            ladder.verified = False
        else:
            if found != set(orders):
                raise NotALadder("extra l-overorders outside the chain",
                                 reason="extra l-overorders", count=len(found))
    return ladder


def ladder_laws_hold(ladder):
    """Conductor law f_i = l^i f_0 and rung law R_i = R + l^i f_0 for every level."""
    l = ladder.base_prime
    f0 = ladder.conductors[0].lattice
    R = ladder.base
    ok = True
    for i in range(ladder.d + 1):
        li_f0 = f0 if i == 0 else lat_product(lat_power(l.lattice, i), f0)
        ok &= ladder.conductors[i].lattice == li_f0
        ok &= ladder.orders[i].lattice == lat_sum(R.lattice, li_f0)
    return ok


def _valuation(I, P):
    k = 0
    cur = P.over.lattice
    while True:
        nxt = lat_product(cur, P.lattice)
        if not I.issubset(nxt):
            return k
        cur = nxt
        k += 1


def ladder_length_from_conductor(ladder):
    """Recompute d from valuations of the base conductor at the primes above l."""
    if ladder.d == 0:
        return 0
    sp = ladder.top_splitting
    if sp is None or sp.variant == SINGULAR:
        raise ValuationMismatch("top splitting is singular; no valuation formula")
    U = l_maximal_overorder(ladder.base, ladder.base_prime.residue_char)
    f = ladder.conductors[-1].lattice
    Ps = ideals_above(U, ladder.base_prime)
    vals = [_valuation(f, P) for P in Ps]
    if sp.variant == RAMIFIED:
        if len(vals) != 1 or vals[0] % 2:
            raise ValuationMismatch("ramified valuation is not even", vals=str(vals))
        d = vals[0] // 2
    elif sp.variant == SPLIT:
        if len(vals) != 2 or vals[0] != vals[1]:
            raise ValuationMismatch("split valuations differ", vals=str(vals))
        d = vals[0]
    else:
        if len(vals) != 1:
            raise ValuationMismatch("inert prime is not unique", vals=str(vals))
        d = vals[0]
    if d != ladder.d:
        raise ValuationMismatch(f"valuation gives {d}, ladder has {ladder.d}", vals=str(vals))
    return d


def singular_primes(R):
    """All singular maximal ideals of R, sorted by (ell, residue size, lattice)."""
    from .maximalization import singular_rational_primes
    out = []
    for ell in singular_rational_primes(R):
        out.extend(m for m in maximal_ideals_above(R, ell) if m.is_singular)
    return out


def enumerate_overorders(R, method="auto", limit=None):
    """All overorders of R, sorted by index in O_K then canonical form."""
    O = maximal_order(R.algebra)
    if method in ("auto", "fast"):
        try:
            res = _overorders_fast(R, O)
        except NotALadder:
            if method == "fast":
                raise
        else:
            return res
    return orders_between(R, O, limit)


def _overorders_fast(R, O):
    sing = singular_primes(R)
    ds = [build_ladder(R, m, verify=False).d for m in sing]
    powers = []
    for m, d in zip(sing, ds):
        pw = [O.lattice]
        cur = O.lattice
        for _ in range(d):
            cur = lat_product(cur, m.lattice)
            pw.append(cur)
        powers.append(pw)
    out = set()
    for ks in product(*[range(d + 1) for d in ds]):
        J = O.lattice
        for pw, k in zip(powers, ks):
            if k:
                J = lat_product(J, pw[k])
        out.add(Order(lat_sum(R.lattice, J)))
    return sorted(out, key=lambda S: (S.index_in(O), S.sort_key()))


def count_ladders(R, l, overorders=None):
    """Number of l-multiplicator ladders: overorders S that agree with R at l."""
    orders = overorders if overorders is not None else enumerate_overorders(R)
    return sum(1 for S in orders if not colon(R.lattice, S.lattice).issubset(l.lattice))


def locate_in_ladder(R, l, T):
    """(ladder over base O, level i): O agrees with R at l and with T elsewhere; T = O_i."""
    if not R.lattice.issubset(T.lattice):
        raise NotContained("T is not an overorder of R")
    ladder_R = build_ladder(R, l, verify=False)
    O_K = maximal_order(R.algebra)
    V = lat_sum(R.lattice, lat_product(lat_power(l.lattice, max(ladder_R.d, 1)), O_K.lattice))
    base = Order(lat_intersect(T.lattice, V))
    L = extend_to_maximal(l, base)
    if L is None:
        raise NotContained("l does not extend to a maximal ideal of the base")
    ladder = build_ladder(base, L, verify=False)
    for i, S in enumerate(ladder.orders):
        if S == T:
            return ladder, i
    raise NotContained("T is not on the ladder of its base")


def find_base_order(O, L):
    """A maximal suborder R with L^2 <= R < O, (l:l) = O for l = L cap R, and R Bass at l.

    None when no such R exists, and for regular L, where O already carries the whole graph.
    """
    if not L.is_singular:
        return None
    alg = O.algebra
    ell = L.residue_char
    L2 = lat_product(L.lattice, L.lattice)
    n = alg.degree
    bottom = Order(ZLattice.from_rows(alg, [list(r) for r in L2.rows] + [[L2.den] + [0] * (n - 1)],
                                      L2.den, modulus=L2.int_det))
    inner = [S for S in orders_between(bottom, O) if S != O]
    maximal = [S for S in inner if not any(S < T for T in inner)]
    for R in sorted(maximal, key=lambda S: S.sort_key()):
        l_lat = lat_intersect(L.lattice, R.lattice)
        l = next((m for m in maximal_ideals_above(R, ell) if m.lattice == l_lat), None)
        if l is None:
            continue
        if colon(l.lattice, l.lattice) != O.lattice:
            continue
        if is_bass_at(R, l):
            return R, l
    return None
