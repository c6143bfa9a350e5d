"""Amplitude states and their diffusion coordinates.

A stuck n-atom state ``sum_i C_i |i>`` is represented on the unit interval by
the cumulative squared moduli of its amplitudes: for two atoms a single point
``x = |C_1|^2``, for three atoms an ordered pair ``x_1 = |C_1|^2``,
``x_2 = |C_1|^2 + |C_2|^2``.  Phases are discarded.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12


class NormalizationError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


def _default_labels(n: int) -> tuple[str, ...]:
    names = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return tuple(f"{names[i]} excited" for i in range(n))


@dataclass(frozen=True)
class EntangledAmplitudes:
    amplitudes: tuple[complex, ...]
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        amps = tuple(complex(c) for c in self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if len(amps) < 2:
            raise UnsupportedDimensionError("need at least two amplitudes")
        labels = tuple(self.basis_labels) or _default_labels(len(amps))
        if len(labels) != len(amps):
            raise ValueError("one label per amplitude required")
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be distinct")
        object.__setattr__(self, "basis_labels", labels)
        norm = sum(abs(c) ** 2 for c in amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"sum |C_i|^2 = {norm!r}, expected 1")

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(np.asarray(self.amplitudes)) ** 2


@dataclass(frozen=True)
class DiffusionCoordinates:
    positions: tuple[float, ...]

    def __post_init__(self):
        pos = tuple(float(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if not pos:
            raise ValueError("at least one coordinate required")
        for p in pos:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"coordinate {p!r} outside [0, 1]")
        if any(b < a for a, b in zip(pos, pos[1:])):
            raise ValueError(f"coordinates {pos!r} are not nondecreasing")

    def interval_lengths(self) -> np.ndarray:
        edges = np.concatenate(([0.0], self.positions, [1.0]))
        return np.diff(edges)


@dataclass(frozen=True)
class AbsorptionOutcome:
    label: str
    absorption_time: float
    steps: int


def to_diffusion(state: EntangledAmplitudes) -> DiffusionCoordinates:
    if state.n > 3:
        raise UnsupportedDimensionError(
            f"{state.n} amplitudes; only 2- and 3-atom states are supported")
    probs = state.probabilities
    # renormalize away the <=1e-12 slack so the last edge cannot exceed 1
    probs = probs / probs.sum()
    cum = np.cumsum(probs[:-1])
    return DiffusionCoordinates(tuple(float(min(c, 1.0)) for c in cum))


def from_diffusion(coords: DiffusionCoordinates,
                   labels: Sequence[str] = ()) -> EntangledAmplitudes:
    lengths = np.clip(coords.interval_lengths(), 0.0, None)
    return EntangledAmplitudes(tuple(np.sqrt(lengths)), tuple(labels))


def binary_expansion(x: float, n_digits: int) -> tuple[int, ...]:
    """First ``n_digits`` bits of ``x`` in base 2 (truncated, not rounded).

    ``x = 1`` is written as 0.111..., which keeps the doubling chain defined
    at the upper boundary.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = {x!r} outside [0, 1]")
    if n_digits < 1:
        raise ValueError("n_digits must be >= 1")
    if x == 1.0:
        return (1,) * n_digits
    bits = []
    frac = x
    for _ in range(n_digits):
        frac *= 2.0  # exact in binary floating point
        bit = 1 if frac >= 1.0 else 0
        frac -= bit
        bits.append(bit)
    return tuple(bits)
