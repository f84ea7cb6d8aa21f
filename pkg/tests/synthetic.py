"""Random class-chain data satisfying the chain invariants, for property tests."""

from hypothesis import strategies as st

from isoladder.classgroup import ClassChainData, FiniteAbelianGroup, GroupMap
from isoladder.graph import GraphSpec

RESIDUE_SIZES = [2, 3, 4, 5, 7, 8, 9]


def divisors(n):
    return [k for k in range(1, n + 1) if n % k == 0]


@st.composite
def chains(draw, max_top=6):
    """(ClassChainData, d, d_min): cyclic groups with reduction maps and consistent ratios."""
    delta = draw(st.sampled_from([-1, 0, 1]))
    s = draw(st.sampled_from(RESIDUE_SIZES))
    d = draw(st.integers(1, 3))
    d_min = draw(st.integers(0, d))
    levels = d_min + 1
    units = [draw(st.sampled_from(divisors(s - delta)))]
    units += [draw(st.sampled_from(divisors(s))) for _ in range(1, d)]
    kernels = [(s - delta) // units[0]] + [s // u for u in units[1:]]
    sizes = [draw(st.integers(1, max_top))]
    for i in range(1, levels):
        sizes.append(sizes[-1] * kernels[i - 1])
    groups = [FiniteAbelianGroup([n]) for n in sizes]
    maps = [GroupMap(groups[i], groups[i - 1], ((1,),) if groups[i - 1].rank else ((),))
            if groups[i].rank else GroupMap(groups[i], groups[i - 1], ())
            for i in range(1, levels)]

    def elem(i, a):
        return groups[i].reduce([a] * groups[i].rank)

    n0 = sizes[0]
    if delta == 1:
        primes = [elem(0, draw(st.integers(0, n0))), elem(0, draw(st.integers(0, n0)))]
        top = groups[0].add(*primes)
    elif delta == 0:
        primes = [elem(0, draw(st.integers(0, n0)))]
        top = groups[0].scale(2, primes[0])
    else:
        primes = [elem(0, draw(st.integers(0, n0)))]
        top = primes[0]
    ext = [top]
    for i in range(1, levels):
        prev = ext[-1][0] if ext[-1] else 0
        ext.append(elem(i, prev + sizes[i - 1] * draw(st.integers(0, kernels[i - 1]))))
    chain = ClassChainData(groups, maps, primes, ext, units, delta, residue_size=s, d=d)
    chain.validate()
    return chain, d, d_min


@st.composite
def specs(draw, max_top=6):
    chain, d, d_min = draw(chains(max_top))
    N = draw(st.integers(1, 2))
    return GraphSpec(chain, d, d_min, N)
