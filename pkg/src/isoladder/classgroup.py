"""Class groups along a ladder: finite abelian groups, class-number ratios,
binary quadratic forms for the imaginary quadratic case, and external class data."""

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from pathlib import Path

from .errors import (InconsistentRatios, NotBass, NotImaginaryQuadratic, SchemaError,
                     UnknownUnitIndex)
from .ladders import INERT, SPLIT, classify_splitting
from .lattices import ZLattice, lat_product
from .linalg import smith_form, xgcd
from .orders import is_bass_at, maximal_ideals_above

SCHEMA_VERSION = 1


# ------------------------------------------------------------------ abelian groups


class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k with d_1 | d_2 | ... ; elements are exponent tuples."""

    def __init__(self, invariants):
        inv = tuple(int(d) for d in invariants if int(d) != 1)
        if any(d < 1 for d in inv):
            raise ValueError(f"invariant factors must be positive: {invariants}")
        if any(b % a for a, b in zip(inv, inv[1:])):
            raise ValueError(f"invariant factors do not form a divisibility chain: {invariants}")
        self.invariants = inv

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.invariants == other.invariants

    def __hash__(self):
        return hash(self.invariants)

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.invariants)})"

    @property
    def rank(self):
        return len(self.invariants)

    @property
    def order(self):
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def zero(self):
        return (0,) * self.rank

    def reduce(self, v):
        if len(v) != self.rank:
            raise ValueError(f"element {v} has the wrong length for {self}")
        return tuple(int(x) % d for x, d in zip(v, self.invariants))

    def add(self, u, v):
        return tuple((a + b) % d for a, b, d in zip(u, v, self.invariants))

    def neg(self, v):
        return tuple(-a % d for a, d in zip(v, self.invariants))

    def scale(self, k, v):
        return tuple(k * a % d for a, d in zip(v, self.invariants))

    def elements(self):
        out = [()]
        for d in self.invariants:
            out = [e + (a,) for e in out for a in range(d)]
        return out

    def element_order(self, v):
        k = 1
        for a, d in zip(v, self.invariants):
            k = k * (d // gcd(a, d)) // gcd(k, d // gcd(a, d))
        return k

    def closure(self, gens):
        """The subgroup generated by ``gens``."""
        seen = {self.zero()}
        queue = deque(seen)
        gens = [self.reduce(g) for g in gens]
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.add(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism v -> v * matrix, rows indexed by the source invariants."""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    matrix: tuple

    def __post_init__(self):
        if len(self.matrix) != self.source.rank or any(len(r) != self.target.rank for r in self.matrix):
            raise ValueError("matrix shape does not match the groups")
        for d, row in zip(self.source.invariants, self.matrix):
            if any(x for x in self.target.scale(d, row)):
                raise ValueError("matrix does not define a homomorphism")

    def __call__(self, v):
        out = [0] * self.target.rank
        for a, row in zip(v, self.matrix):
            if a:
                for j, x in enumerate(row):
                    out[j] += a * x
        return self.target.reduce(out)

    def image(self):
        return self.target.closure([tuple(r) for r in self.matrix])

    def is_surjective(self):
        return len(self.image()) == self.target.order

    def kernel_size(self):
        return self.source.order // len(self.image())

    def then(self, other):
        """other o self."""
        rows = tuple(tuple(other(r)) for r in self.matrix)
        return GroupMap(self.source, other.target, rows)


def group_from_action(identity, generators, mul):
    """Structure of the finite abelian group generated by ``generators`` under ``mul``.

    Returns (group, coords) with coords mapping each element to its exponent tuple.
    """
    k = len(generators)
    words = {identity: (0,) * k}
    queue = deque([identity])
    relations = []
    while queue:
        x = queue.popleft()
        for j, g in enumerate(generators):
            y = mul(x, g)
            step = tuple(w + (1 if i == j else 0) for i, w in enumerate(words[x]))
            if y in words:
                relations.append([a - b for a, b in zip(step, words[y])])
            else:
                words[y] = step
                queue.append(y)
    if k == 0 or not any(any(r) for r in relations):
        return FiniteAbelianGroup([]), {identity: ()}
    diag, _, V = smith_form(relations)
    keep = [i for i, s in enumerate(diag) if s != 1]
    group = FiniteAbelianGroup([diag[i] for i in keep])
    coords = {}
    for x, w in words.items():
        img = [sum(w[r] * V[r][c] for r in range(k)) for c in range(k)]
        coords[x] = group.reduce([img[i] for i in keep])
    if len(set(coords.values())) != len(coords) or group.order != len(coords):
        raise AssertionError("relation module does not present the group")
    return group, coords


# ------------------------------------------------------------------ class-number ratios


def ratio_min_overorder(R, l, T, unit_index, splitting=None):
    """#Cl(R) / #Cl(T) for T the unique minimal l-overorder of R."""
    if unit_index is None:
        raise UnknownUnitIndex("[T^x : R^x] is required outside the imaginary quadratic case")
    split = splitting or classify_splitting(R, l)
    base = Fraction(R.index_in(T), unit_index)
    size = Fraction(l.residue_size)
    if split.variant == INERT:
        return base * (1 - size ** -split.f) / (1 - 1 / size)
    if split.variant == SPLIT:
        return base * (1 - 1 / size)
    return base


def ladder_ratios(ladder, unit_indices=None, check_bass=True):
    """[#Cl(O_i) / #Cl(O_{i-1}) for i = 1..d]."""
    d = ladder.d
    if unit_indices is None:
        unit_indices = imquad_unit_indices(ladder)
    if len(unit_indices) < d or any(u is None for u in unit_indices[:d]):
        raise UnknownUnitIndex("unit indices are needed for every ladder step")
    if d and check_bass and not is_bass_at(ladder.base, ladder.base_prime):
        raise NotBass("the surface ratio formula needs R Bass at l")
    size = ladder.residue_size
    out = []
    for i in range(1, d + 1):
        num = size - ladder.delta if i == 1 else size
        out.append(Fraction(num, unit_indices[i - 1]))
    return out


# ------------------------------------------------------------------ binary quadratic forms


def form_discriminant(f):
    a, b, c = f
    return b * b - 4 * a * c


def reduce_form(f):
    """Reduced representative of a positive definite form."""
    a, b, c = f
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            continue
        break
    if a == c and b < 0:
        b = -b
    return a, b, c


def reduced_forms(D):
    """All primitive reduced forms of negative discriminant D, sorted."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return sorted(out)


def principal_form(D):
    b = D % 2
    return 1, b, (b * b - D) // 4


def compose_forms(f1, f2):
    """Gauss composition of primitive forms of the same discriminant (reduced result)."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form((a3, b3, c3))


def inverse_form(f):
    a, b, c = f
    return reduce_form((a, -b, c))


def represents_one(f):
    """Exhaustive search for f(x, y) = 1; a reduced form does so iff it is principal."""
    a, b, c = f
    D = -form_discriminant(f)
    ymax = isqrt(4 * a // D) + 1 if D else 1
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + c y^2 - 1 = 0
        disc = (b * y) ** 2 - 4 * a * (c * y * y - 1)
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for num in (-b * y + r, -b * y - r):
            if num % (2 * a) == 0:
                return True
    return False


def form_class_group(D):
    """(group, coords) for the form class group of discriminant D."""
    forms = reduced_forms(D)
    ident = principal_form(D)
    gens = []
    span = {ident}
    for f in forms:
        if f in span:
            continue
        gens.append(f)
        _, coords = group_from_action(ident, gens, compose_forms)
        span = set(coords)
        if len(span) == len(forms):
            break
    group, coords = group_from_action(ident, gens, compose_forms)
    return group, coords


def unit_count(D):
    return {-3: 6, -4: 4}.get(D, 2)


# ------------------------------------------------------------------ quadratic orders


def _quadratic_data(algebra):
    h = algebra.h
    if algebra.degree != 2:
        raise NotImaginaryQuadratic("native class groups need a degree-2 algebra")
    t, nrm = -h[1], h[0]
    Dh = t * t - 4 * nrm
    if Dh >= 0:
        raise NotImaginaryQuadratic("the quadratic algebra is not imaginary")
    return t, nrm, Dh


def order_discriminant(order):
    t, nrm, Dh = _quadratic_data(order.algebra)
    D = Dh * order.lattice.volume ** 2
    assert D.denominator == 1
    return int(D)


def _norm(t, nrm, u, v):
    # N(u + v pi) = u^2 + t u v + n v^2
    return u * u + t * u * v + nrm * v * v


def _trace_conj(t, nrm, a, b):
    # Tr(alpha * conj(beta)) for alpha = a0 + a1 pi, beta = b0 + b1 pi
    return 2 * a[0] * b[0] + t * (a[0] * b[1] + a[1] * b[0]) + 2 * nrm * a[1] * b[1]


def ideal_to_form(lattice, order):
    """Reduced form of the invertible ideal ``lattice`` of the quadratic ``order``."""
    t, nrm, _ = _quadratic_data(order.algebra)
    (a0, a1), (b0, b1) = lattice.rows
    den = lattice.den
    if a0 * b1 - a1 * b0 < 0:
        b0, b1 = -b0, -b1
    norm_ideal = lattice.volume / order.lattice.volume
    scale = norm_ideal * den * den
    A = Fraction(_norm(t, nrm, a0, a1)) / scale
    B = -Fraction(_trace_conj(t, nrm, (a0, a1), (b0, b1))) / scale
    C = Fraction(_norm(t, nrm, b0, b1)) / scale
    if any(x.denominator != 1 for x in (A, B, C)):
        raise AssertionError("ideal norm does not divide the norm form")
    f = (int(A), int(B), int(C))
    if form_discriminant(f) != order_discriminant(order):
        raise AssertionError("form discriminant does not match the order")
    return reduce_form(f)


def form_to_ideal(form, order):
    """The O-ideal [a, (-b + sqrt(D))/2] with sqrt(D) = vol(O) * (2 pi - t)."""
    t, _, _ = _quadratic_data(order.algebra)
    a, b, _ = form
    vol = order.lattice.volume
    # (-b + vol*(2 pi - t)) / 2 written over the common denominator 2*den(vol)
    den = 2 * vol.denominator
    second = [-b * vol.denominator - vol.numerator * t, 2 * vol.numerator]
    rows = [[a * den, 0], second]
    return ZLattice.from_rows(order.algebra, rows, den)


@dataclass
class ClassChainData:
    """Class groups Cl(O_0), ..., Cl(O_k) with connecting maps and the l-data of a ladder."""

    groups: list
    surjections: list
    primes_above_l: list
    l_extension_class: list
    unit_indices: list
    delta_l: int
    residue_size: int = None
    d: int = None
    d_min: int = None
    N: int = None
    extra: dict = field(default_factory=dict)

    @property
    def levels(self):
        return len(self.groups)

    def to_top(self, i):
        """Composite map Cl(O_i) -> Cl(O_0)."""
        G = self.groups[i]
        cur = GroupMap(G, G, tuple(tuple(1 if a == b else 0 for b in range(G.rank))
                                   for a in range(G.rank)))
        for j in range(i, 0, -1):
            cur = cur.then(self.surjections[j - 1])
        return cur

    def surface_subgroup(self):
        """Cl_l(O_0): the subgroup generated by the primes above l."""
        return self.groups[0].closure(self.primes_above_l)

    def expected_ratio(self, i):
        """Class-number ratio #Cl(O_i)/#Cl(O_{i-1}) predicted from residue size and units."""
        if self.residue_size is None or i > len(self.unit_indices):
            return None
        u = self.unit_indices[i - 1]
        if u is None:
            return None
        num = self.residue_size - self.delta_l if i == 1 else self.residue_size
        return Fraction(num, u)

    def validate(self, ladder=None):
        if not self.groups:
            raise SchemaError("at least one level is required")
        if len(self.surjections) != self.levels - 1:
            raise SchemaError("need one surjection per level below the top")
        if self.delta_l not in (-1, 0, 1):
            raise SchemaError("delta_l must be -1, 0 or 1")
        if len(self.primes_above_l) not in (1, 2):
            raise SchemaError("primes_above_l needs one or two classes")
        if (len(self.primes_above_l) == 2) != (self.delta_l == 1):
            raise SchemaError("two primes above l exactly in the split case")
        if len(self.l_extension_class) != self.levels:
            raise SchemaError("l_extension_class needs one entry per level")
        if ladder is not None:
            if ladder.d and ladder.delta != self.delta_l:
                raise InconsistentRatios("delta_l disagrees with the ladder top", level=0)
            if self.residue_size is not None and self.residue_size != ladder.residue_size:
                raise InconsistentRatios("residue size disagrees with the ladder", level=0)
            if self.levels > ladder.d + 1:
                raise SchemaError("more levels than ladder rungs")
        for i, phi in enumerate(self.surjections, start=1):
            if phi.source != self.groups[i] or phi.target != self.groups[i - 1]:
                raise SchemaError(f"surjection {i} has mismatched groups")
            if not phi.is_surjective():
                raise InconsistentRatios(f"map from level {i} is not surjective", level=i)
            want = self.expected_ratio(i)
            if want is not None and want != phi.kernel_size():
                raise InconsistentRatios(
                    f"level {i}: kernel size {phi.kernel_size()} but the ratio formula gives {want}",
                    level=i, kernel=phi.kernel_size(), expected=str(want))
            lo, hi = self.l_extension_class[i], self.l_extension_class[i - 1]
            if lo is not None and hi is not None and phi(lo) != hi:
                raise InconsistentRatios(f"extension class at level {i} does not map to level {i - 1}",
                                         level=i)
        top = self.l_extension_class[0]
        G0 = self.groups[0]
        if top is not None and (self.d is None or self.d > 0):
            P = self.primes_above_l
            if self.delta_l == 1:
                want = G0.add(P[0], P[1])
            elif self.delta_l == 0:
                want = G0.scale(2, P[0])
            else:
                want = P[0]
            if want != top:
                raise InconsistentRatios("l*O_0 is not the product of the primes above l", level=0)
        return self

    def to_json(self):
        out = {
            "schema": SCHEMA_VERSION,
            "levels": [{"invariant_factors": list(G.invariants),
                        "l_extension_class": None if c is None else list(c)}
                       for G, c in zip(self.groups, self.l_extension_class)],
            "surjections": [[list(r) for r in phi.matrix] for phi in self.surjections],
            "primes_above_l": [list(p) for p in self.primes_above_l],
            "unit_indices": list(self.unit_indices),
            "delta_l": self.delta_l,
        }
        for key in ("residue_size", "d", "d_min", "N"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out

    @classmethod
    def from_json(cls, data):
        try:
            groups = [FiniteAbelianGroup(_ints(lv["invariant_factors"])) for lv in data["levels"]]
            ext = [None if lv.get("l_extension_class") is None else
                   groups[i].reduce(_ints(lv["l_extension_class"]))
                   for i, lv in enumerate(data["levels"])]
            maps = []
            for i, M in enumerate(data["surjections"], start=1):
                rows = tuple(tuple(_ints(r)) for r in M)
                if groups[i].rank == 0:
                    rows = ()
                maps.append(GroupMap(groups[i], groups[i - 1], rows))
            primes = [groups[0].reduce(_ints(p)) for p in data["primes_above_l"]]
            units = [None if u is None else int(u) for u in data.get("unit_indices", [])]
            delta = int(data["delta_l"])
            opt = {k: int(data[k]) for k in ("residue_size", "d", "d_min", "N") if data.get(k) is not None}
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"malformed class data: {exc}") from None
        if data.get("schema") != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema {data.get('schema')!r}")
        return cls(groups, maps, primes, ext, units, delta, **opt).validate()


def _ints(xs):
    return [int(x) for x in xs]


def load_external_chains(path):
    """All chains in a class-data file (a single chain or {"schema":1,"chains":[...]})."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read class data {path}: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("class data must be a JSON object")
    if "chains" in data:
        if data.get("schema") != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema {data.get('schema')!r}")
        return [ClassChainData.from_json({"schema": SCHEMA_VERSION, **c}) for c in data["chains"]]
    return [ClassChainData.from_json(data)]


def load_external_chain(path):
    chains = load_external_chains(path)
    if len(chains) != 1:
        raise SchemaError(f"expected one chain, found {len(chains)}")
    return chains[0]


# ------------------------------------------------------------------ imaginary quadratic backend


def imquad_unit_indices(ladder):
    discs = [order_discriminant(O) for O in ladder.orders]
    return [unit_count(discs[i - 1]) // unit_count(discs[i]) for i in range(1, len(discs))]


def _class_of(lattice, order, coords):
    return coords[ideal_to_form(lattice, order)]


def imquad_class_data(ladder):
    """ClassChainData for a ladder in an imaginary quadratic field, from reduced forms."""
    orders = ladder.orders
    discs = [order_discriminant(O) for O in orders]
    data = [form_class_group(D) for D in discs]
    groups = [g for g, _ in data]
    maps = []
    for i in range(1, len(orders)):
        G, coords = data[i]
        by_vec = {v: f for f, v in coords.items()}
        rows = []
        for j in range(G.rank):
            e = tuple(1 if k == j else 0 for k in range(G.rank))
            I = form_to_ideal(by_vec[e], orders[i])
            ext = lat_product(I, orders[i - 1].lattice)
            rows.append(_class_of(ext, orders[i - 1], data[i - 1][1]))
        maps.append(GroupMap(G, groups[i - 1], tuple(rows)))
    l = ladder.base_prime
    ext_classes = []
    for i, O in enumerate(orders):
        lat = lat_product(l.lattice, O.lattice)
        if i == ladder.d and ladder.d > 0:
            ext_classes.append(None)
        else:
            ext_classes.append(_class_of(lat, O, data[i][1]))
    top = orders[0]
    if ladder.d:
        above = [M for M in maximal_ideals_above(top, l.residue_char) if l.lattice.issubset(M.lattice)]
        delta = ladder.delta
    else:
        above = [l]
        delta = 0
    primes = [_class_of(M.lattice, top, data[0][1]) for M in above]
    chain = ClassChainData(groups, maps, primes, ext_classes, imquad_unit_indices(ladder), delta,
                           residue_size=ladder.residue_size, d=ladder.d)
    return chain.validate(ladder)


def is_principal_ideal(lattice, order):
    """Norm-equation test: the ideal is principal iff its norm form represents 1."""
    return represents_one(ideal_to_form(lattice, order))
