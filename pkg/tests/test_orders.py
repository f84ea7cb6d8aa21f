import pytest
import sympy

from conftest import frobenius_order, prime_above
from isoladder.algebra_core import make_algebra
from isoladder.errors import NotAnOrder, NotIntegral, RankDeficient
from isoladder.ladders import build_ladder, enumerate_overorders, l_overorders, singular_primes
from isoladder.lattices import ZLattice, colon, lat_product, quotient_invariants
from isoladder.maximalization import maximal_order
from isoladder.orders import (Order, cm_type, is_bass, is_bass_at, is_gorenstein_at, maximal_ideals_above,
                              multiplicator_ring, order_from_generators)

A36 = make_algebra([13, -4, 1], 13)


def test_index_of_frobenius_order():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    assert R.index_in(O) == 2 ** 4 * 3 * 7


def test_z_pi_is_index_three():
    O = maximal_order(A36)
    Z = order_from_generators(A36, [A36.pi])
    assert Z.index_in(O) == 3


def test_generators_must_span_and_be_integral():
    with pytest.raises(RankDeficient):
        order_from_generators(A36, [])
    with pytest.raises(NotIntegral):
        order_from_generators(A36, [A36.pi / 2])


def test_not_an_order():
    with pytest.raises(NotAnOrder):
        Order(ZLattice.from_rows(A36, [[2, 0], [0, 1]]))
    with pytest.raises(NotAnOrder):
        Order(ZLattice.from_rows(A36, [[1, 0], [1, 2]], 2))


def test_order_invariants():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    for T in (R, O):
        assert T.contains(A.one)
        assert lat_product(T.lattice, T.lattice) == T.lattice
        assert all(b.is_integral() for b in T.lattice.basis())


def test_inert_three_in_gaussian_type_order():
    O = maximal_order(A36)
    ms = maximal_ideals_above(O, 3)
    assert [m.residue_size for m in ms] == [9]
    assert not ms[0].is_singular


def test_all_behaviours_residue_sizes():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    assert sorted(m.residue_size for m in singular_primes(R)) == [2, 3, 4, 7]


@pytest.mark.filterwarnings("ignore::DeprecationWarning")
@pytest.mark.parametrize("ell", [11, 13, 17, 19, 23])
def test_regular_prime_splitting_matches_factorization(ell):
    A, R, O = frobenius_order("3.25.g_cg_ji")
    x = sympy.symbols("x")
    h = sum(c * x ** i for i, c in enumerate(A.h))
    _, facs = sympy.factor_list(h, x, modulus=ell)
    ms = maximal_ideals_above(R, ell)
    assert len(ms) == len(facs)
    assert sorted(m.residue_size for m in ms) == sorted(ell ** sympy.degree(f, x) for f, _ in facs)
    assert not any(m.is_singular for m in ms)


def test_maximal_ideal_invariants():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    for m in singular_primes(R):
        inv = quotient_invariants(R.lattice, m.lattice)
        assert all(d == m.residue_char for d in inv)
        assert m.residue_char ** len(inv) == m.residue_size


def test_maximal_order_primes_are_regular():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    for ell in (2, 3, 7):
        for m in maximal_ideals_above(O, ell):
            assert not m.is_singular
            assert cm_type(O, m) == 1


def test_l7_multiplicator_ring_is_next_rung():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    l7 = prime_above(R, 7)
    assert l7.is_singular
    assert multiplicator_ring(l7) == build_ladder(R, l7).orders[-2]


def test_singular_ideal_times_colon():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    for l in singular_primes(R):
        assert lat_product(l.lattice, colon(R.lattice, l.lattice)) == l.lattice
        assert not l.is_invertible(R)


def test_cm_types_in_jumps():
    A, R, O = frobenius_order("3.5.c_ab_ae")
    types = {S.index_in(O): cm_type(S, m) for S in enumerate_overorders(R)
             for m in maximal_ideals_above(S, 2)}
    assert {k for k, t in types.items() if t == 2} == {4, 16, 32}


def test_cm_type_two_in_non_bass():
    A, R, O = frobenius_order("3.11.b_e_cv")
    m = prime_above(R, 2)
    T = next(S for S in l_overorders(R, m) if S.index_in(O) == 80)
    assert [cm_type(T, M) for M in maximal_ideals_above(T, 2)] == [2]


def test_bass_examples():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    assert all(is_bass_at(R, l) for l in singular_primes(R))
    A, R2, O2 = frobenius_order("3.4.ab_d_ah")
    assert not any(is_bass_at(R2, l) for l in singular_primes(R2))
    # some intermediate l-overorder fails to be Gorenstein
    assert not all(is_gorenstein_at(S, 2) for S in l_overorders(R2, singular_primes(R2)[0]))
    assert is_bass(O2)


def test_global_bass_agrees_with_local():
    A, R, O = frobenius_order("3.25.g_cg_ji")
    assert is_bass(R) == all(is_bass_at(R, l) for l in singular_primes(R))
