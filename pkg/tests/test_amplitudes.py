import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collapsim.amplitudes import (DiffusionCoordinates, EntangledAmplitudes,
                                  NormalizationError, UnsupportedDimensionError,
                                  binary_expansion, from_diffusion, to_diffusion)


def test_stuck_state_maps_to_half():
    s = EntangledAmplitudes((1 / math.sqrt(2), 1 / math.sqrt(2)))
    assert to_diffusion(s).positions == pytest.approx((0.5,), abs=1e-15)


def test_eigenstate_maps_to_one():
    assert to_diffusion(EntangledAmplitudes((1, 0))).positions == (1.0,)


def test_three_amplitudes_cumulative():
    s = EntangledAmplitudes((math.sqrt(0.2), math.sqrt(0.5), math.sqrt(0.3)))
    assert to_diffusion(s).positions == pytest.approx((0.2, 0.7), abs=1e-12)


def test_phases_are_dropped():
    s = EntangledAmplitudes((0.6j, -0.8))
    assert to_diffusion(s).positions == pytest.approx((0.36,), abs=1e-12)


def test_from_diffusion_examples():
    np.testing.assert_allclose(
        from_diffusion(DiffusionCoordinates((0.5,))).amplitudes,
        (math.sqrt(0.5), math.sqrt(0.5)), atol=1e-15)
    np.testing.assert_allclose(
        from_diffusion(DiffusionCoordinates((0.2, 0.7))).amplitudes,
        (math.sqrt(0.2), math.sqrt(0.5), math.sqrt(0.3)), atol=1e-12)
    assert from_diffusion(DiffusionCoordinates((1.0,))).amplitudes == (1, 0)


def test_errors():
    with pytest.raises(NormalizationError):
        EntangledAmplitudes((0.5, 0.5))
    with pytest.raises(UnsupportedDimensionError):
        EntangledAmplitudes((1.0,))
    with pytest.raises(UnsupportedDimensionError):
        to_diffusion(EntangledAmplitudes((0.5, 0.5, 0.5, 0.5)))
    with pytest.raises(ValueError):
        DiffusionCoordinates((0.7, 0.2))
    with pytest.raises(ValueError):
        DiffusionCoordinates((1.2,))
    with pytest.raises(ValueError):
        EntangledAmplitudes((1, 0), ("A", "A"))


def _random_state(rng, n):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


@pytest.mark.parametrize("n", [2, 3])
def test_interval_lengths_match_probabilities(n):
    rng = np.random.default_rng(5)
    for _ in range(1000):
        z = _random_state(rng, n)
        coords = to_diffusion(EntangledAmplitudes(tuple(z)))
        np.testing.assert_allclose(coords.interval_lengths(), np.abs(z) ** 2, atol=1e-12)


def _resolvable(v):
    # positions are cumulative, so an interval of length w is known only to
    # one ulp near 1; its amplitude sqrt(w) then carries ~1e-16 / (2 sqrt(w))
    w = np.asarray(v) / sum(v)
    return bool(np.all((w == 0) | (w >= 1e-8)))


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=3)
       .filter(lambda v: sum(v) > 1e-3).filter(_resolvable))
def test_round_trip_nonnegative_real(weights):
    w = np.asarray(weights) / sum(weights)
    s = EntangledAmplitudes(tuple(np.sqrt(w)))
    back = from_diffusion(to_diffusion(s))
    np.testing.assert_allclose(np.real(back.amplitudes), np.real(s.amplitudes), atol=1e-12)
    assert back.basis_labels == s.basis_labels


def test_round_trip_tiny_amplitude_floor():
    s = EntangledAmplitudes((math.sqrt(1 - 1e-14), 1e-7))
    back = from_diffusion(to_diffusion(s))
    np.testing.assert_allclose(np.abs(back.amplitudes) ** 2, np.abs(s.amplitudes) ** 2,
                               rtol=0, atol=2.3e-16)
    assert abs(back.amplitudes[1] - 1e-7) <= 2.3e-16 / (2 * 1e-7)


def greedy_bits(x, n):
    # subtract powers of two from the top down
    bits, rest = [], x
    for k in range(1, n + 1):
        p = 2.0 ** -k
        if rest >= p:
            bits.append(1)
            rest -= p
        else:
            bits.append(0)
    return tuple(bits)


def test_binary_expansion_examples():
    assert binary_expansion(0.625, 3) == (1, 0, 1)
    assert binary_expansion(0.0, 7) == (0,) * 7
    assert binary_expansion(1 / 3, 4) == greedy_bits(1 / 3, 4) == (0, 1, 0, 1)
    assert binary_expansion(1.0, 5) == (1,) * 5


def test_binary_expansion_rejects_out_of_range():
    with pytest.raises(ValueError):
        binary_expansion(1.5, 3)
    with pytest.raises(ValueError):
        binary_expansion(-0.1, 3)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 52))
def test_binary_expansion_bounds(x, n):
    bits = binary_expansion(x, n)
    assert bits == greedy_bits(x, n)
    partial = [sum(c * 2.0 ** -(k + 1) for k, c in enumerate(bits[:m])) for m in range(1, n + 1)]
    assert all(a <= b for a, b in zip(partial, partial[1:]))
    assert partial[-1] <= x < partial[-1] + 2.0 ** -n
