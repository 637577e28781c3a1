import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapdisc.core import CapExceededError, Coloring, SetSystem, eval_discrepancy, hap_disc_stream
from hapdisc.exact import disc_exact
from hapdisc.generators import gen_characters, gen_hap, gen_subcubes
from hapdisc.heuristics import beck_fiala, greedy_improve, random_coloring, ternary_coloring
from oracles import ternary_rule


def _degree(system):
    return max((sum(s >> i & 1 for _, s in system.sets) for i in range(system.n)), default=0)


def test_beck_fiala_examples():
    singles = SetSystem(tuple(range(5)), tuple((f"s{i}", 1 << i) for i in range(5)))
    out = beck_fiala(singles)
    assert out.guarantee == 1 and out.achieved <= 1
    one = beck_fiala(SetSystem((1, 2, 3, 4), (("a", 0b1111),)))
    assert one.guarantee == 1 and one.achieved == 0
    hap = gen_hap(12, "multiples")
    out = beck_fiala(hap)
    assert _degree(hap) == 6 and out.guarantee == 11 and out.achieved <= 11
    assert disc_exact(hap).value <= out.achieved


@st.composite
def random_systems(draw):
    n = draw(st.integers(1, 24))
    m = draw(st.integers(1, 30))
    sets = tuple((f"s{i}", draw(st.integers(0, (1 << n) - 1))) for i in range(m))
    return SetSystem(tuple(range(n)), sets)


@settings(max_examples=80, deadline=None)
@given(random_systems())
def test_beck_fiala_guarantee_random(system):
    out = beck_fiala(system)
    t = _degree(system)
    assert out.guarantee == max(2 * t - 1, 0)
    assert out.achieved == eval_discrepancy(system, out.coloring).value <= out.guarantee


@pytest.mark.parametrize("d", [2, 4, 6])
def test_beck_fiala_subcubes(d):
    out = beck_fiala(gen_subcubes(d))
    assert out.achieved <= 2 * 2**d - 1


def test_beck_fiala_caps():
    with pytest.raises(CapExceededError):
        beck_fiala(SetSystem(tuple(range(2001)), ()))


def test_ternary_examples():
    assert ternary_coloring(9).values.tolist() == [1, -1, 1, 1, -1, -1, 1, -1, 1]
    f = ternary_coloring(3**10)
    assert all(f.values[3**j - 1] == 1 for j in range(11))
    assert hap_disc_stream(9, "prefix", ternary_coloring(9)).value == 2
    with pytest.raises(ValueError):
        ternary_coloring(0)


def test_ternary_against_digit_rule():
    f = ternary_coloring(5000).values.tolist()
    assert f == [ternary_rule(i) for i in range(1, 5001)]


def test_ternary_completely_multiplicative():
    f = np.concatenate([[0], ternary_coloring(10**4).values.astype(int)])
    for a in range(1, 101):
        b = np.arange(1, 10**4 // a + 1)
        assert (f[a * b] == f[a] * f[b]).all()


def test_ternary_log_bound():
    for j in range(1, 11):
        n = 3**j
        assert hap_disc_stream(n, "prefix", ternary_coloring(n)).value <= j + 1


def test_random_coloring_examples():
    assert random_coloring(50, 7) == random_coloring(50, 7)
    assert random_coloring(8, 0) != random_coloring(8, 1)
    big = random_coloring(10**6, 0)
    assert abs(int(big.values.astype(np.int64).sum())) <= 5 * math.sqrt(10**6)
    with pytest.raises(ValueError):
        random_coloring(0)


def test_greedy_examples():
    g = gen_characters(2, 1)
    out = greedy_improve(g, Coloring.ones(4))
    assert out.achieved == 0 and out.coloring == Coloring.ones(4) and out.iterations == 0
    s2 = gen_subcubes(2)
    assert greedy_improve(s2, Coloring.ones(4)).achieved == 1
    start = random_coloring(4, 3)
    frozen = greedy_improve(s2, start, max_passes=0)
    assert frozen.coloring == start and frozen.achieved == eval_discrepancy(s2, start).value


@settings(max_examples=50, deadline=None)
@given(random_systems(), st.integers(0, 2**63))
def test_greedy_never_increases(system, seed):
    start = random_coloring(system.n, seed)
    out = greedy_improve(system, start)
    assert out.achieved == eval_discrepancy(system, out.coloring).value
    assert out.achieved <= eval_discrepancy(system, start).value
