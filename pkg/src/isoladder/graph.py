"""Leveled (R, l)-isogeny graphs built from a multiplicator ladder and class-group data.

Vertices are ideal-class labels: a surface vertex is a class of Cl(O_0) inside one coset
of Cl_l(O_0), a level-i vertex is a class of Cl(O_i) lying over that coset.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .classgroup import imquad_class_data
from .errors import GraphInputError, LadderDisjoint, NeedUserN, NotBass
from .ladders import build_ladder, enumerate_overorders, ideals_above
from .lattices import colon, lat_product
from .maximalization import maximal_order
from .orders import is_bass_at, maximal_ideals_above, multiplicator_ring, order_from_generators

HORIZONTAL, ASCENDING, DESCENDING = "Horizontal", "Ascending", "Descending"
ORDINARY, ALMOST_ORDINARY, PRIME_FIELD, OTHER = "Ordinary", "AlmostOrdinary", "PrimeField", "Other"


# ------------------------------------------------------------------ isogeny class context


def _valuation(n, p):
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def newton_slopes(h, p, q=None):
    """Slopes of the p-adic Newton polygon of h, scaled so that v(q) = 1, ascending."""
    n = len(h) - 1
    pts = [(i, _valuation(c, p)) for i, c in enumerate(h) if c]
    scale = _valuation(q, p) if q else 1
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, (x2 - x1) * scale)
        slopes.extend([s] * (x2 - x1))
    assert len(slopes) == n
    return sorted(slopes)


@dataclass
class IsogenyClassContext:
    algebra: object
    slopes: list
    kind: str
    O_min: object = None
    N: int = None
    N_rule: str = None

    def describe(self):
        return {"kind": self.kind, "slopes": [str(s) for s in self.slopes], "N": self.N,
                "N_rule": self.N_rule}


def _frobenius_prime_order(R0, p):
    """Saturate R0 only at the maximal ideal containing pi and q/pi."""
    alg = R0.algebra
    pi, qpi = alg.pi, alg.q_over_pi()
    cur = R0
    while True:
        P = [M for M in maximal_ideals_above(cur, p) if M.lattice.contains(pi) and M.lattice.contains(qpi)]
        if not P or not P[0].is_singular:
            return cur, (P[0] if P else None)
        cur = multiplicator_ring(P[0])


def _ramification_index(P, O, p):
    """Largest e with p*O inside P^e, for a prime P of the maximal order O."""
    pO = O.lattice.scale(p)
    e, power = 0, O.lattice
    while True:
        nxt = lat_product(power, P.lattice)
        if not pO.issubset(nxt):
            return e
        e += 1
        power = nxt


def classify_isogeny_class(algebra, N=None):
    """Slopes, kind, O_min and orbit count N for the isogeny class of a Weil polynomial."""
    if algebra.q is None:
        raise GraphInputError("a Weil polynomial needs q")
    q, p = algebra.q, algebra.p
    slopes = newton_slopes(list(algebra.h), p, q)
    g = len(slopes) // 2
    zero, one, half = Fraction(0), Fraction(1), Fraction(1, 2)
    base = order_from_generators(algebra, [algebra.pi, algebra.q_over_pi()])
    if slopes == [zero] * g + [one] * g:
        kind = ORDINARY
    elif q == p:
        kind = PRIME_FIELD
    elif g >= 1 and slopes == [zero] * (g - 1) + [half, half] + [one] * (g - 1):
        kind = ALMOST_ORDINARY
    else:
        kind = OTHER
    ctx = IsogenyClassContext(algebra, slopes, kind)
    if kind in (ORDINARY, PRIME_FIELD):
        ctx.O_min, ctx.N, ctx.N_rule = base, 1, "one"
    elif kind == ALMOST_ORDINARY:
        ctx.O_min, _ = _frobenius_prime_order(base, p)
        O = maximal_order(algebra)
        P = [M for M in maximal_ideals_above(O, p)
             if M.lattice.contains(algebra.pi) and M.lattice.contains(algebra.q_over_pi())]
        ctx.N = 1 if P and _ramification_index(P[0], O, p) >= 2 else 2
        ctx.N_rule = "almost-ordinary"
    else:
        # no sharper bound is known; Z[pi, q/pi] lies in every endomorphism ring
        ctx.O_min = base
    if N is not None:
        ctx.N, ctx.N_rule = int(N), "user"
    if ctx.N is None:
        raise NeedUserN(f"no rule gives N for an isogeny class of kind {kind}; supply it", kind=kind)
    return ctx


def compute_d_min(ladder, O_min):
    """Deepest level i whose rung O_i contains O_min."""
    for i in range(ladder.d, -1, -1):
        if O_min.lattice.issubset(ladder.orders[i].lattice):
            return i
    raise LadderDisjoint("no rung of the ladder contains O_min")


# ------------------------------------------------------------------ specs


@dataclass
class GraphSpec:
    """One ladder together with its class chain."""

    chain: object
    d: int
    d_min: int
    N: int = 1
    ladder: object = None
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.d_min <= self.d:
            raise GraphInputError(f"d_min = {self.d_min} must lie in [0, d = {self.d}]")
        if self.chain.levels < self.d_min + 1:
            raise GraphInputError(f"class data covers {self.chain.levels} levels, need {self.d_min + 1}")
        if self.N < 1:
            raise GraphInputError("N must be positive")
        for i in range(1, min(self.d_min, self.d - 1) + 1):
            if self.chain.l_extension_class[i] is None:
                raise GraphInputError(f"class of l*O_{i} is needed for descending edges")


def ladders_over(R, l):
    """Every l-multiplicator ladder among the overorders of R, R's own ladder first."""
    out = []
    for S in enumerate_overorders(R):
        if colon(R.lattice, S.lattice).issubset(l.lattice):
            continue
        above = ideals_above(S, l)
        if len(above) != 1:
            raise GraphInputError("l does not have a unique prime in a base order")
        out.append(build_ladder(S, above[0], verify=False))
    out.sort(key=lambda lad: (lad.base != R, lad.base.sort_key()))
    return out


def assemble_specs(R, l, chains=None, N=None, context=None):
    """GraphSpecs for all ladders of R that carry abelian varieties."""
    if not is_bass_at(R, l):
        raise NotBass("the graph structure needs R Bass at l")
    ctx = context or classify_isogeny_class(R.algebra, N)
    specs = []
    for lad in ladders_over(R, l):
        try:
            d_min = compute_d_min(lad, ctx.O_min)
        except LadderDisjoint:
            continue
        specs.append((lad, d_min))
    if not specs:
        raise LadderDisjoint("no ladder over R contains an overorder of O_min")
    if chains is None:
        chains = [imquad_class_data(lad) for lad, _ in specs]
    if len(chains) != len(specs):
        raise GraphInputError(f"class data has {len(chains)} chains for {len(specs)} ladders")
    out = []
    for k, ((lad, d_min), chain) in enumerate(zip(specs, chains)):
        chain.validate(lad)
        if chain.d is not None and chain.d != lad.d:
            raise GraphInputError(f"chain {k} is for d = {chain.d}, ladder has d = {lad.d}")
        if chain.d_min is not None and chain.d_min != d_min:
            raise GraphInputError(f"chain {k} declares d_min = {chain.d_min}, computed {d_min}")
        n_val = chain.N if (N is None and chain.N is not None and ctx.N_rule == "user") else ctx.N
        out.append(GraphSpec(chain, lad.d, d_min, n_val, lad, label=f"ladder{k}"))
    return out


# ------------------------------------------------------------------ the graph


@dataclass(frozen=True, order=True)
class Vertex:
    component: int
    level: int
    cls: tuple
    orbit: int

    @property
    def id(self):
        cls = ".".join(str(a) for a in self.cls) or "e"
        return f"c{self.component}_l{self.level}_{cls}_o{self.orbit}"


@dataclass(frozen=True, order=True)
class Edge:
    src: Vertex
    dst: Vertex
    kind: str
    label: str = ""


@dataclass
class IsogenyGraph:
    vertices: list
    edges: list
    specs: list
    component_spec: dict
    warnings: list = field(default_factory=list)

    def components(self):
        return sorted(self.component_spec)

    def component_vertices(self, comp):
        return [v for v in self.vertices if v.component == comp]

    def component_edges(self, comp):
        return [e for e in self.edges if e.src.component == comp]

    def level_sizes(self, comp):
        sizes = {}
        for v in self.component_vertices(comp):
            sizes[v.level] = sizes.get(v.level, 0) + 1
        return [sizes[i] for i in sorted(sizes)]

    def to_networkx(self, comp=None):
        G = nx.MultiDiGraph()
        for v in self.vertices:
            if comp is None or v.component == comp:
                G.add_node(v, level=v.level)
        for e in self.edges:
            if comp is None or e.src.component == comp:
                G.add_edge(e.src, e.dst, kind=e.kind, label=e.label)
        return G

    def to_json(self):
        return {
            "schema": 1,
            "vertices": [{"id": v.id, "component": v.component, "level": v.level,
                          "class": list(v.cls), "orbit": v.orbit} for v in self.vertices],
            "edges": [{"src": e.src.id, "dst": e.dst.id, "type": e.kind, "label": e.label}
                      for e in self.edges],
            "warnings": list(self.warnings),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    def to_dot(self):
        lines = ["digraph isogeny_graph {", "  rankdir=TB;", "  node [shape=circle, label=\"\"];"]
        for comp in self.components():
            lines.append(f"  subgraph cluster_{comp} {{")
            lines.append(f"    label=\"component {comp}\";")
            levels = sorted({v.level for v in self.component_vertices(comp)})
            for lev in levels:
                ids = " ".join(f"\"{v.id}\";" for v in self.component_vertices(comp) if v.level == lev)
                lines.append(f"    {{ rank=same; {ids} }}")
            lines.append("  }")
        style = {HORIZONTAL: "style=solid", ASCENDING: "style=bold, color=blue",
                 DESCENDING: "style=dashed"}
        for e in self.edges:
            lab = f", label=\"{e.label}\"" if e.label else ""
            lines.append(f"  \"{e.src.id}\" -> \"{e.dst.id}\" [{style[e.kind]}{lab}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _cosets(G0, sub):
    seen = set()
    reps = []
    for x in G0.elements():
        if x in seen:
            continue
        coset = {G0.add(x, s) for s in sub}
        seen |= coset
        reps.append(sorted(coset))
    return reps


def build_graph(specs):
    """Vertices and typed edges for one spec or a list of specs (one per ladder)."""
    if isinstance(specs, GraphSpec):
        specs = [specs]
    vertices, edges = [], []
    component_spec = {}
    warnings = []
    comp = 0
    for spec in specs:
        chain = spec.chain
        G0 = chain.groups[0]
        sub = chain.surface_subgroup()
        maps = [chain.to_top(i) for i in range(spec.d_min + 1)]
        horizontal = chain.delta_l != -1 or spec.d == 0
        if spec.d_min == spec.d and spec.d > 0:
            warnings.append(f"{spec.label or 'ladder'}: d_min = d, so the bottom level has no "
                            "descending edges; a deeper base order can be found with find_base_order")
        for coset in _cosets(G0, sub):
            cset = set(coset)
            for orbit in range(1, spec.N + 1):
                component_spec[comp] = spec
                levels = []
                for i in range(spec.d_min + 1):
                    members = [x for x in chain.groups[i].elements() if maps[i](x) in cset]
                    levels.append({x: Vertex(comp, i, x, orbit) for x in members})
                    vertices.extend(levels[i].values())
                if horizontal:
                    for x, v in levels[0].items():
                        for j, P in enumerate(chain.primes_above_l, start=1):
                            edges.append(Edge(v, levels[0][G0.add(x, P)], HORIZONTAL, f"L{j}"))
                for i in range(1, spec.d_min + 1):
                    phi = chain.surjections[i - 1]
                    Gi = chain.groups[i]
                    ext = chain.l_extension_class[i] if i <= spec.d - 1 else None
                    for x, v in levels[i].items():
                        top = levels[i - 1][phi(x)]
                        edges.append(Edge(v, top, ASCENDING))
                        if i <= spec.d - 1:
                            edges.append(Edge(top, levels[i][Gi.add(x, ext)], DESCENDING))
                comp += 1
    vertices.sort()
    edges.sort()
    return IsogenyGraph(vertices, edges, list(specs), component_spec, warnings)


def component_count(specs):
    """Sum over ladders of N * [Cl(O_0) : Cl_l(O_0)]."""
    if isinstance(specs, GraphSpec):
        specs = [specs]
    return sum(s.N * (s.chain.groups[0].order // len(s.chain.surface_subgroup())) for s in specs)


def strong_connectivity_check(G):
    """Each component, minus its bottom level when d_min = d > 0, is strongly connected."""
    report = {"ok": True, "components": []}
    for comp in G.components():
        spec = G.component_spec[comp]
        H = G.to_networkx(comp)
        dropped = spec.d_min == spec.d and spec.d > 0
        if dropped:
            bottom = [v for v in H if v.level == spec.d_min]
            reach = all(H.out_degree(v) == 1 and H.in_degree(v) == 0 for v in bottom)
            H = H.subgraph([v for v in H if v.level != spec.d_min])
        else:
            reach = True
        strong = H.number_of_nodes() == 0 or nx.is_strongly_connected(H)
        entry = {"component": comp, "strongly_connected": strong, "bottom_dropped": dropped,
                 "bottom_out_only": reach}
        report["components"].append(entry)
        if not (strong and reach):
            report["ok"] = False
    return report


def fiber_sizes(G, comp):
    """For each level i >= 1, the multiset of ascending in-degrees of level i-1 vertices."""
    out = {}
    for e in G.component_edges(comp):
        if e.kind == ASCENDING:
            out.setdefault(e.dst.level + 1, {}).setdefault(e.dst, 0)
            out[e.dst.level + 1][e.dst] += 1
    return {i: sorted(set(c.values())) for i, c in out.items()}
