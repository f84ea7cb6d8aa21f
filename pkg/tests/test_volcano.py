import pytest
from hypothesis import given, settings

from conftest import classdata_path, frobenius_order, prime_above
from synthetic import specs
from isoladder.algebra_core import make_algebra
from isoladder.classgroup import ClassChainData, FiniteAbelianGroup, GroupMap, load_external_chains
from isoladder.errors import MissingPrincipalityData
from isoladder.graph import GraphSpec, Vertex, assemble_specs, build_graph
from isoladder.ladders import find_base_order
from isoladder.orders import maximal_ideals_above, order_from_generators
from isoladder.volcano import (NOT_COVERED, UndirectedLeveledGraph, is_r_volcano, lemma_checks, predicted_verdict,
                               undirect, volcano_verdict)


def V(level, k):
    return Vertex(0, level, (k,), 1)


def cyclic_chain(n, primes, ext0, delta, d=1):
    G = FiniteAbelianGroup([n])
    return ClassChainData([G], [], [G.reduce(p) for p in primes], [G.reduce(ext0)], [1] * d, delta, d=d)


def test_path_with_surface_loop_is_1_volcano():
    a, b = V(0, 0), V(1, 0)
    U = UndirectedLeveledGraph([a, b], [(a, a), (a, b)])
    assert U.degree(a) == 2
    check = is_r_volcano(U)
    assert check.ok and check.r == 1


def test_disconnected_and_empty():
    a, b = V(0, 0), V(0, 1)
    assert is_r_volcano(UndirectedLeveledGraph([a, b], [])).failed == "NotConnected"
    assert is_r_volcano(UndirectedLeveledGraph([], [])).failed == "Empty"


def test_structural_failures():
    s, c1, c2, g = V(0, 0), V(1, 0), V(1, 1), V(2, 0)
    # a level-2 vertex attached to the surface skips a level
    U = UndirectedLeveledGraph([s, c1, g], [(s, c1), (s, g)])
    assert is_r_volcano(U).failed == "EdgeNotBetweenConsecutiveLevels"
    # a child with two parents
    t = V(0, 1)
    U = UndirectedLeveledGraph([s, t, c1], [(s, t), (s, c1), (t, c1)])
    assert is_r_volcano(U).failed == "NotOneEdgeUp"
    # degrees differ above the bottom
    U = UndirectedLeveledGraph([s, c1, c2, g], [(s, c1), (s, c2), (c1, g)])
    assert is_r_volcano(U).failed == "DegreeNotConstant"


def test_ramified_three_cycle_has_no_undirected_edges():
    chain = cyclic_chain(3, [[1]], [2], 0)
    G = build_graph(GraphSpec(chain, 1, 0))
    assert len(G.edges) == 3
    assert undirect(G, "asc").edges == []
    assert undirect(G, "desc").edges == []


def test_empty_edge_set():
    chain = ClassChainData([FiniteAbelianGroup([])], [], [()], [()], [1], -1, d=1)
    G = build_graph(GraphSpec(chain, 1, 0))
    assert undirect(G, "asc").edges == []


def test_split_surface_pairing():
    # L1 trivial gives a loop per vertex, L2 of order 2 gives a 2-cycle, paired into one undirected edge
    chain = cyclic_chain(2, [[0], [1]], [1], 1)
    G = build_graph(GraphSpec(chain, 1, 0))
    U = undirect(G, "asc")
    a, b = sorted(G.vertices)
    assert sorted(U.edges) == sorted([(a, a), (b, b), (a, b)])
    assert U.degree(a) == U.degree(b) == 2


def test_missing_principality_data():
    G0, G1 = FiniteAbelianGroup([2]), FiniteAbelianGroup([4])
    chain = ClassChainData([G0, G1], [GroupMap(G1, G0, ((1,),))], [(1,)], [None, (0,)], [1, 1], -1, d=2)
    spec = GraphSpec(chain, 2, 1)
    with pytest.raises(MissingPrincipalityData):
        predicted_verdict(spec)


def test_different_units_ratios_is_3_volcano():
    A, R0, O = frobenius_order("2.101.o_dl")
    R, l = find_base_order(R0, prime_above(R0, 3))
    G = build_graph(assemble_specs(R, l, chains=load_external_chains(classdata_path("2.101.o_dl"))))
    for comp in G.components():
        assert is_r_volcano(undirect(G, "asc", comp)).r == 3
    verdicts = volcano_verdict(G)
    assert [(v.is_volcano, v.r, v.predicted["r"], v.disagreement) for v in verdicts] == [(True, 3, 3, False)] * 2
    assert verdicts[0].predicted["surface"] == "connected, 2-regular"


@pytest.mark.parametrize("p,levels", [(7, [1, 1]), (11, [1, 3]), (19, [1, 3]), (23, [3, 3])])
def test_supersingular_two_volcanoes(p, levels):
    A = make_algebra([p, 0, 1], p)
    R = order_from_generators(A, [A.pi * 2])
    l = maximal_ideals_above(R, 2)[0]
    G = build_graph(assemble_specs(R, l))
    assert sorted(G.level_sizes(c) for c in G.components())[0] == levels
    for v in volcano_verdict(G):
        assert v.is_volcano and v.predicted["is_volcano"] and not v.disagreement


def test_disc_minus_36_is_not_a_volcano():
    A = make_algebra([13, -4, 1], 13)
    R = order_from_generators(A, [A.pi])
    G = build_graph(assemble_specs(R, maximal_ideals_above(R, 3)[0]))
    (v,) = volcano_verdict(G)
    assert not v.is_volcano and v.predicted["is_volcano"] is False and not v.disagreement
    assert v.to_json()["structural"]["is_volcano"] is False


def test_regular_prime_not_covered():
    chain = cyclic_chain(3, [[1]], [1], 0, d=0)
    G = build_graph(GraphSpec(chain, 0, 0))
    (v,) = volcano_verdict(G)
    assert v.predicted["covered"] is False
    assert v.predicted["surface"] == NOT_COVERED


# ------------------------------------------------------------------ properties (criterion 12)


@pytest.mark.criterion(12)
@settings(max_examples=200, deadline=None)
@given(specs())
def test_structural_and_predicted_agree(spec):
    G = build_graph(spec)
    for v in volcano_verdict(G):
        assert all(v.lemmas.values()), v.lemmas
        assert not v.disagreement, v.to_json()


@pytest.mark.criterion(12)
@settings(max_examples=150, deadline=None)
@given(specs())
def test_lemmas_hold(spec):
    G = build_graph(spec)
    for comp in G.components():
        asc, desc = undirect(G, "asc", comp), undirect(G, "desc", comp)
        surface = [u for u in asc.vertices if u.level == 0]
        # the ascending graph is connected exactly when its surface is
        assert asc.is_connected() == asc.is_connected(surface)
        principal = spec.chain.l_extension_class[0] == spec.chain.groups[0].zero()
        if spec.d and spec.chain.delta_l in (-1, 0):
            assert asc.is_connected(surface) == principal
        checks = lemma_checks(G, comp, asc, desc)
        assert all(checks.values()), checks


@pytest.mark.criterion(12)
@settings(max_examples=100, deadline=None)
@given(specs())
def test_asc_eq_desc_biconditional(spec):
    G = build_graph(spec)
    chain = spec.chain
    if spec.d_min == 0:
        want = True
    else:
        want = spec.d_min < spec.d and chain.l_extension_class[spec.d_min - 1] == chain.groups[spec.d_min - 1].zero()
    for comp in G.components():
        assert (undirect(G, "asc", comp) == undirect(G, "desc", comp)) == want
