"""Undirected ascending/descending graphs, the r-volcano test, and the closed-form volcano criteria.

Loops add exactly one to the degree of their vertex.  Graph libraries usually count two,
so degrees are computed here rather than through networkx.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .errors import MissingPrincipalityData
from .graph import ASCENDING, DESCENDING, HORIZONTAL

NOT_COVERED = "not covered by theorem"


@dataclass
class UndirectedLeveledGraph:
    vertices: list
    edges: list  # (u, v) with u <= v; u == v is a loop

    def level(self, v):
        return v.level

    def degree(self, v):
        return sum((a == v) + (b == v and a != b) for a, b in self.edges)

    def levels(self):
        return sorted({v.level for v in self.vertices})

    def is_connected(self, vertices=None):
        vs = list(self.vertices if vertices is None else vertices)
        if not vs:
            return True
        G = nx.Graph()
        G.add_nodes_from(vs)
        keep = set(vs)
        G.add_edges_from((a, b) for a, b in self.edges if a in keep and b in keep)
        return nx.is_connected(G)

    def edge_multiset(self):
        return Counter(self.edges)

    def __eq__(self, other):
        return sorted(self.vertices) == sorted(other.vertices) and self.edge_multiset() == other.edge_multiset()


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def undirect(G, which, component=None):
    """The undirected ascending (which='asc') or descending ('desc') graph."""
    kind = {"asc": ASCENDING, "desc": DESCENDING}[which]
    if component is None:
        vertices, directed = list(G.vertices), list(G.edges)
    else:
        vertices, directed = G.component_vertices(component), G.component_edges(component)
    edges = [_pair(e.src, e.dst) for e in directed if e.kind == kind]
    horiz = Counter((e.src, e.dst) for e in directed if e.kind == HORIZONTAL)
    for (a, b), k in horiz.items():
        if a == b:
            edges.extend([(a, a)] * k)
        elif a < b:
            edges.extend([(a, b)] * min(k, horiz.get((b, a), 0)))
    return UndirectedLeveledGraph(sorted(vertices), sorted(edges))


@dataclass
class VolcanoCheck:
    ok: bool
    r: int = None
    failed: str = None

    def to_json(self):
        return {"ok": self.ok, "r": self.r, "failed": self.failed}


def is_r_volcano(U):
    """Test the three conditions defining an r-volcano; r is None when only one level exists."""
    if not U.vertices:
        return VolcanoCheck(False, failed="Empty")
    if not U.is_connected():
        return VolcanoCheck(False, failed="NotConnected")
    levels = U.levels()
    if levels != list(range(len(levels))):
        return VolcanoCheck(False, failed="LevelGap")
    bottom = levels[-1]
    surface = [v for v in U.vertices if v.level == 0]
    surf_deg = Counter()
    for a, b in U.edges:
        if a.level == 0 and b.level == 0:
            surf_deg[a] += 1
            if a != b:
                surf_deg[b] += 1
    degs = {surf_deg[v] for v in surface}
    if len(degs) != 1 or max(degs) > 2:
        return VolcanoCheck(False, failed="SurfaceNotRegular")
    up = Counter()
    for a, b in U.edges:
        if a.level == 0 and b.level == 0:
            continue
        lo, hi = (a, b) if a.level > b.level else (b, a)
        if lo.level != hi.level + 1:
            return VolcanoCheck(False, failed="EdgeNotBetweenConsecutiveLevels")
        up[lo] += 1
    if any(up[v] != 1 for v in U.vertices if v.level > 0):
        return VolcanoCheck(False, failed="NotOneEdgeUp")
    if bottom == 0:
        return VolcanoCheck(True, None)
    upper = {U.degree(v) for v in U.vertices if v.level != bottom}
    if len(upper) != 1:
        return VolcanoCheck(False, failed="DegreeNotConstant")
    r = upper.pop() - 1
    if r < 1:
        return VolcanoCheck(False, failed="DegreeTooSmall")
    return VolcanoCheck(True, r)


def _principal(chain, i):
    cls = chain.l_extension_class[i]
    if cls is None:
        raise MissingPrincipalityData(f"class of l*O_{i} is not known", level=i)
    return cls == chain.groups[i].zero()


def _unit(chain, i):
    if i >= len(chain.unit_indices) or chain.unit_indices[i] is None:
        raise MissingPrincipalityData(f"unit index [O_{i}^x : O_{i + 1}^x] is not known", level=i)
    return chain.unit_indices[i]


def predicted_verdict(spec):
    """Volcano prediction from principality and the class-number ratio formulas."""
    chain, d, d_min = spec.chain, spec.d, spec.d_min
    delta, res = chain.delta_l, chain.residue_size
    out = {"covered": True, "is_volcano": None, "r": None, "reasons": [], "surface": NOT_COVERED}
    if d == 0:
        out.update(covered=False, reasons=["l is regular, so the ladder is trivial and no criterion applies"])
        return out
    principal0 = _principal(chain, 0)
    if delta in (-1, 0):
        out["surface"] = f"connected, {delta + 1}-regular" if principal0 else "disconnected"
    elif principal0:
        out["surface"] = "connected, 2-regular"
    if d_min == 0:
        if delta == 1 and not principal0:
            out.update(covered=False, reasons=["split, d_min = 0 and l*O_0 not principal"])
            return out
        out["is_volcano"] = principal0
        out["reasons"].append("l*O_0 principal" if principal0 else "l*O_0 not principal")
        return out
    ok = True
    if d_min >= d:
        ok = False
        out["reasons"].append("d_min = d, so the bottom level has no descending edges")
    if not _principal(chain, d_min - 1):
        ok = False
        out["reasons"].append(f"l*O_{d_min - 1} not principal")
    r0 = 2 if delta == 1 else delta + 1
    top = Fraction(res - delta, _unit(chain, 0)) + r0
    values = [top] + [Fraction(res, _unit(chain, i)) + 1 for i in range(1, d_min)]
    if len(set(values)) != 1 or top.denominator != 1 or top < 2:
        ok = False
        out["reasons"].append("degree formulas disagree: " + ", ".join(str(v) for v in values))
    out["is_volcano"] = ok
    if ok:
        out["r"] = int(top) - 1
        out["reasons"].append(f"all criteria hold with r + 1 = {top}")
    return out


def lemma_checks(G, comp, asc=None, desc=None):
    """Cross-checks that hold on every graph: connectivity via the surface, asc = desc criterion."""
    spec = G.component_spec[comp]
    asc = asc or undirect(G, "asc", comp)
    desc = desc or undirect(G, "desc", comp)
    surface = [v for v in asc.vertices if v.level == 0]
    out = {"connected_iff_surface": asc.is_connected() == asc.is_connected(surface)}
    if spec.d_min == 0:
        want = True
    else:
        want = spec.d_min < spec.d and _principal(spec.chain, spec.d_min - 1)
    out["asc_eq_desc_criterion"] = (asc == desc) == want
    if spec.d and spec.chain.delta_l in (-1, 0):
        out["surface_connected_iff_principal"] = asc.is_connected(surface) == _principal(spec.chain, 0)
    elif spec.d and spec.chain.delta_l == 1 and _principal(spec.chain, 0):
        deg = Counter()
        for a, b in asc.edges:
            if a.level == 0 and b.level == 0:
                deg[a] += 1
                deg[b] += a != b
        out["split_principal_surface_2_regular"] = (asc.is_connected(surface)
                                                    and all(deg[v] == 2 for v in surface))
    return out


@dataclass
class VolcanoVerdict:
    component: int
    is_volcano: bool
    r: int = None
    reason: str = ""
    predicted: dict = field(default_factory=dict)
    lemmas: dict = field(default_factory=dict)
    disagreement: bool = False

    def to_json(self):
        return {"component": self.component, "structural": {"is_volcano": self.is_volcano, "r": self.r,
                                                            "reason": self.reason},
                "predicted": self.predicted, "lemmas": self.lemmas, "disagreement": self.disagreement}


def volcano_verdict(G, component=None):
    """Structural and predicted verdicts, per component."""
    comps = G.components() if component is None else [component]
    out = []
    for comp in comps:
        spec = G.component_spec[comp]
        asc, desc = undirect(G, "asc", comp), undirect(G, "desc", comp)
        check = is_r_volcano(asc)
        if asc != desc:
            verdict = VolcanoVerdict(comp, False, reason="ascending and descending graphs differ")
        elif not check.ok:
            verdict = VolcanoVerdict(comp, False, reason=f"ascending graph fails: {check.failed}")
        else:
            verdict = VolcanoVerdict(comp, True, check.r,
                                     reason="single level, every r works" if check.r is None
                                     else f"{check.r}-volcano")
        verdict.predicted = predicted_verdict(spec)
        verdict.lemmas = lemma_checks(G, comp, asc, desc)
        pred = verdict.predicted
        if pred["covered"]:
            same = pred["is_volcano"] == verdict.is_volcano
            if same and verdict.is_volcano and pred["r"] is not None and check.r is not None:
                same = pred["r"] == check.r
            verdict.disagreement = not same
        verdict.disagreement = verdict.disagreement or not all(verdict.lemmas.values())
        out.append(verdict)
    return out
