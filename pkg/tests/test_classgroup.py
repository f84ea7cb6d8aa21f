import copy
import json
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import classdata_path, frobenius_order
from isoladder.algebra_core import make_algebra
from isoladder.classgroup import (ClassChainData, FiniteAbelianGroup, GroupMap, compose_forms, form_class_group,
                                  imquad_class_data, inverse_form, is_principal_ideal, ladder_ratios,
                                  load_external_chains, principal_form, ratio_min_overorder, reduce_form,
                                  reduced_forms, unit_count)
from isoladder.errors import InconsistentRatios, NotBass, SchemaError, UnknownUnitIndex
from isoladder.ladders import build_ladder, singular_primes
from isoladder.orders import maximal_ideals_above, multiplicator_ring, order_from_generators

DISCS = [-3, -4, -7, -19, -23, -28, -36, -44, -76, -100, -112, -971, -1540]


def oracle_class_number(D):
    """Count primitive reduced forms (a, b, c), |b| <= a <= c, b >= 0 on the boundary."""
    n, a = 0, 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a) == 0:
                c = (b * b - D) // (4 * a)
                if c >= a and not (c == a and b < 0) and gcd(gcd(a, abs(b)), c) == 1:
                    n += 1
        a += 1
    return n


@pytest.mark.parametrize("D", DISCS)
def test_class_numbers_against_oracle(D):
    G, coords = form_class_group(D)
    assert G.order == len(reduced_forms(D)) == oracle_class_number(D)
    assert len(coords) == G.order


def test_known_structures():
    assert form_class_group(-1540)[0] == FiniteAbelianGroup([2, 2, 2])
    assert form_class_group(-971)[0].order == 15
    assert form_class_group(-4)[0].order == 1 and unit_count(-4) == 4
    assert sorted(reduced_forms(-100)) == sorted([(1, 0, 25), (2, 2, 13)])


@pytest.mark.parametrize("D", [-23, -44, -971, -1540])
def test_form_group_axioms(D):
    forms = reduced_forms(D)
    e = principal_form(D)
    for f in forms:
        assert compose_forms(f, e) == f
        assert compose_forms(f, inverse_form(f)) == e
        for g in forms[:5]:
            assert compose_forms(f, g) == compose_forms(g, f)
            for h in forms[:3]:
                assert compose_forms(compose_forms(f, g), h) == compose_forms(f, compose_forms(g, h))


def test_reduce_form():
    assert reduce_form((13, 12, 4)) == reduce_form((4, -12, 13)) == (4, 4, 5)
    assert reduce_form((2, 2, 13)) == (2, 2, 13)


def test_ratio_examples():
    # inert, disc -76 over -19
    A = make_algebra([5, -1, 1], 5)
    R = order_from_generators(A, [A.pi * 2])
    l = maximal_ideals_above(R, 2)[0]
    assert ratio_min_overorder(R, l, multiplicator_ring(l), 1) == 3
    # split, disc -100 over -4
    A = make_algebra([1, 0, 1])
    R = order_from_generators(A, [A.pi * 5])
    l = maximal_ideals_above(R, 5)[0]
    assert ratio_min_overorder(R, l, multiplicator_ring(l), 2) == 2
    with pytest.raises(UnknownUnitIndex):
        ratio_min_overorder(R, l, multiplicator_ring(l), None)


def test_ratio_ramified_is_index_over_units():
    A = make_algebra([2, 0, 1], 2)  # Q(sqrt(-2)), 2 ramified
    R = order_from_generators(A, [A.pi * 2])
    l = maximal_ideals_above(R, 2)[0]
    T = multiplicator_ring(l)
    assert ratio_min_overorder(R, l, T, 1) == R.index_in(T)


def test_ladder_ratios_disc_minus_36():
    A = make_algebra([13, -4, 1], 13)
    R = order_from_generators(A, [A.pi])
    ladder = build_ladder(R, maximal_ideals_above(R, 3)[0])
    assert ladder_ratios(ladder) == [2]
    assert ladder_ratios(ladder, [2]) == [Fraction(4, 2)]


def test_ladder_ratios_need_bass():
    A, R, O = frobenius_order("3.4.ab_d_ah")
    ladder = build_ladder(R, singular_primes(R)[0])
    with pytest.raises(NotBass):
        ladder_ratios(ladder, [1, 1])
    with pytest.raises(UnknownUnitIndex):
        ladder_ratios(ladder, [1])


def test_different_units_ratios():
    chain = load_external_chains(classdata_path("2.101.o_dl"))[0]
    assert [chain.expected_ratio(i) for i in (1, 2)] == [Fraction(9 - 1, 4), Fraction(9, 3)]
    assert [phi.kernel_size() for phi in chain.surjections] == [2, 3]


def test_imquad_minus_36():
    A = make_algebra([13, -4, 1], 13)
    R = order_from_generators(A, [A.pi])
    l = maximal_ideals_above(R, 3)[0]
    chain = imquad_class_data(build_ladder(R, l))
    assert [G.order for G in chain.groups] == [1, 2]
    assert chain.surjections[0].is_surjective()
    assert chain.delta_l == -1
    assert chain.l_extension_class[0] == chain.groups[0].zero()
    O = build_ladder(R, l).orders[0]
    assert is_principal_ideal(O.lattice.scale(3), O)


@pytest.mark.parametrize("h,q,ell,mult,discs", [
    ([2, -1, 1], 2, 2, 4, [-7, -28, -112]),
    ([5, -1, 1], 5, 2, 2, [-19, -76]),
    ([1, 0, 1], None, 5, 5, [-4, -100]),
    ([11, 0, 1], 11, 2, 2, [-11, -44, -176]),
])
def test_imquad_chains(h, q, ell, mult, discs):
    A = make_algebra(h, q)
    R = order_from_generators(A, [A.pi * mult])
    ladder = build_ladder(R, maximal_ideals_above(R, ell)[0])
    chain = imquad_class_data(ladder)
    assert [G.order for G in chain.groups] == [oracle_class_number(D) for D in discs]
    ratios = ladder_ratios(ladder)
    assert [Fraction(b.order, a.order) for a, b in zip(chain.groups, chain.groups[1:])] == ratios


def test_external_round_trip():
    for label in ("2.101.o_dl", "4.5.e_f_ax_adi", "6.2.b_e_d_l_l_be"):
        for chain in load_external_chains(classdata_path(label)):
            again = ClassChainData.from_json(json.loads(json.dumps(chain.to_json())))
            assert again.to_json() == chain.to_json()


def test_gasc0_orders_of_primes():
    chains = load_external_chains(classdata_path("6.2.b_e_d_l_l_be"))
    assert len(chains) == 2
    for chain in chains:
        G0 = chain.groups[0]
        assert sorted(G0.element_order(P) for P in chain.primes_above_l) == [1, 2]


def corrupt(label, fn):
    data = json.loads(open(classdata_path(label)).read())
    data = copy.deepcopy(data)
    fn(data)
    return data


def test_kernel_size_mismatch_is_rejected():
    data = corrupt("2.101.o_dl", lambda d: d.__setitem__("unit_indices", [2, 3]))
    with pytest.raises(InconsistentRatios):
        ClassChainData.from_json(data)


@pytest.mark.parametrize("fn", [
    lambda d: d.__setitem__("schema", 2),
    lambda d: d.pop("levels"),
    lambda d: d.__setitem__("delta_l", 5),
    lambda d: d.__setitem__("primes_above_l", [[2]]),
    lambda d: d["levels"][0].__setitem__("invariant_factors", [4, 6]),
])
def test_schema_errors(fn):
    with pytest.raises(SchemaError):
        ClassChainData.from_json(corrupt("2.101.o_dl", fn))


def test_non_surjective_map_rejected():
    data = corrupt("2.101.o_dl", lambda d: d.__setitem__("surjections", [[[2]], [[1]]]))
    with pytest.raises((InconsistentRatios, SchemaError)):
        ClassChainData.from_json(data)


def test_unreadable_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(SchemaError):
        load_external_chains(p)


# ------------------------------------------------------------------ properties


@st.composite
def groups_and_elements(draw):
    a = draw(st.integers(2, 6))
    b = a * draw(st.integers(1, 4))
    G = FiniteAbelianGroup([a, b])
    elem = st.tuples(st.integers(0, 30), st.integers(0, 30)).map(G.reduce)
    return G, draw(elem), draw(elem), draw(elem)


@settings(max_examples=80, deadline=None)
@given(groups_and_elements())
def test_abelian_group_laws(data):
    G, u, v, w = data
    assert G.add(G.add(u, v), w) == G.add(u, G.add(v, w))
    assert G.add(u, v) == G.add(v, u)
    assert G.add(u, G.neg(u)) == G.zero()
    assert G.scale(G.element_order(u), u) == G.zero()
    assert len(G.closure([u])) == G.element_order(u)


@settings(max_examples=40, deadline=None)
@given(groups_and_elements())
def test_translation_is_bijection(data):
    G, u, _, _ = data
    elems = list(G.elements())
    assert sorted(G.add(x, u) for x in elems) == sorted(elems)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4))
def test_group_map_kernel(a, k):
    G = FiniteAbelianGroup([a * k])
    H = FiniteAbelianGroup([a])
    phi = GroupMap(G, H, ((1,),)) if a > 1 else None
    if phi is None:
        return
    assert phi.is_surjective()
    assert phi.kernel_size() * H.order == G.order
