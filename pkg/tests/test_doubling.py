import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collapsim.doubling import (ChainAbsorbedError, DoublingChainState, Status,
                                doubling_step, exact_hit_probability, hit_frequency,
                                run_doubling_chain)
from collapsim.stats import wilson_interval


def test_step_examples():
    s = doubling_step(DoublingChainState(0.25), 1)
    assert s.running and s.position == 0.5
    assert doubling_step(DoublingChainState(0.75), 1).status is Status.ABSORBED_AT_1
    for coin in (0, 1):
        assert doubling_step(DoublingChainState(0.0), coin).status is Status.ABSORBED_AT_0
        assert doubling_step(DoublingChainState(1.0), coin).status is Status.ABSORBED_AT_1


def test_half_absorbs_on_either_coin():
    assert doubling_step(DoublingChainState(0.5), 1).status is Status.ABSORBED_AT_1
    assert doubling_step(DoublingChainState(0.5), 0).status is Status.ABSORBED_AT_0


def test_step_on_absorbed_chain_raises():
    s = doubling_step(DoublingChainState(0.75), 1)
    with pytest.raises(ChainAbsorbedError):
        doubling_step(s, 0)


@given(st.floats(0, 1), st.integers(0, 1))
def test_running_position_follows_doubling_map(x, coin):
    s = doubling_step(DoublingChainState(x), coin)
    if s.running:
        assert s.position == (2 * x) % 1.0
        assert s.step_count == 1
    else:
        # absorbed states never run again
        with pytest.raises(ChainAbsorbedError):
            doubling_step(s, coin)


def enumerate_hit_probability(x0, depth):
    """Run the chain under every coin sequence of length ``depth``."""
    hit = Fraction(0)
    for coins in itertools.product((0, 1), repeat=depth):
        s = DoublingChainState(x0)
        for c in coins:
            if not s.running:
                break
            s = doubling_step(s, c)
        assert not s.running, "dyadic start must absorb within its digit count"
        if s.status is Status.ABSORBED_AT_1:
            hit += Fraction(1, 2 ** depth)
    return hit


@pytest.mark.parametrize("depth", range(1, 8))
def test_branch_sum_identity_by_brute_force(depth):
    for m in range(2 ** depth + 1):
        x0 = m / 2 ** depth
        assert enumerate_hit_probability(x0, depth) == Fraction(m, 2 ** depth)


def test_exact_examples():
    assert exact_hit_probability(0.5) == 0.5
    assert exact_hit_probability(0.625) == 0.625
    assert exact_hit_probability(0.0) == 0.0
    assert exact_hit_probability(1.0) == 1.0
    assert float(enumerate_hit_probability(0.625, 3)) == 0.625


def test_exact_one_third_against_geometric_series():
    # 1/3 = 0.010101..._2: hit mass 1/4 + 1/16 + ... , partial sums in exact arithmetic
    partial = sum(Fraction(1, 4 ** k) for k in range(1, 30))
    assert abs(Fraction(1, 3) - partial) < Fraction(1, 2 ** 52)
    assert abs(exact_hit_probability(1 / 3) - 1 / 3) <= 2.0 ** -52


@given(st.floats(0, 1))
def test_exact_equals_input(x):
    assert exact_hit_probability(x) == x


@given(st.floats(0, 1), st.floats(0, 1))
def test_exact_monotone(a, b):
    lo, hi = sorted((a, b))
    assert exact_hit_probability(lo) <= exact_hit_probability(hi)


def test_exact_vectorized():
    x = np.linspace(0, 1, 1001)
    np.testing.assert_array_equal(exact_hit_probability(x), x)


def test_exact_rejects_out_of_range():
    with pytest.raises(ValueError):
        exact_hit_probability(1.01)


def test_run_chain_boundaries():
    rng = np.random.default_rng(0)
    assert all(run_doubling_chain(0.0, rng) == 0 for _ in range(50))
    assert all(run_doubling_chain(1.0, rng) == 1 for _ in range(50))


def test_run_chain_scalar_frequency():
    rng = np.random.default_rng(11)
    n = 20_000
    hits = sum(run_doubling_chain(0.3, rng) for _ in range(n))
    lo, hi = wilson_interval(hits, n, 0.997)
    assert lo <= 0.3 <= hi


def test_run_chain_max_steps_fallback():
    # one step from 0.3 never absorbs at 1, so any hit comes from the Bernoulli fallback
    rng = np.random.default_rng(2)
    results = [run_doubling_chain(0.3, rng, max_steps=1) for _ in range(4000)]
    assert 0 < sum(results) < 4000


def test_frequency_one_million_at_0625():
    n = 1_000_000
    hits = hit_frequency(0.625, n, np.random.default_rng(7))
    se = math.sqrt(0.625 * 0.375 / n)
    lo, hi = wilson_interval(hits, n, 0.997)
    assert abs(hits / n - 0.625) < 3 * se
    assert lo <= 0.625 <= hi


@pytest.mark.parametrize("x0", [0.05, 1 / 3, 0.5, 0.7, 0.999])
def test_frequency_four_sigma(x0):
    n = 100_000
    hits = hit_frequency(x0, n, np.random.default_rng(int(x0 * 1e6)))
    assert abs(hits / n - x0) < 4 * math.sqrt(x0 * (1 - x0) / n)
