"""Hydrogen 1s / 2p(m=+1) superposition and its rotating density.

Atomic units throughout (hbar = 1, Bohr radius 1, energies in hartree).
Y_11 is taken without the Condon-Shortley sign, so the equal-weight density
reads ``f1 + f2 cos(phi - omega t)`` with ``f2 >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SUPPORTED = {(1, 0, 0), (2, 1, 1)}

_Y00 = 1.0 / math.sqrt(4.0 * math.pi)
_Y11 = math.sqrt(3.0 / (8.0 * math.pi))


def bohr_energy(n: int) -> float:
    return -1.0 / (2.0 * n * n)


@dataclass(frozen=True)
class HydrogenEigenstate:
    n: int
    l: int
    m: int

    def __post_init__(self):
        if not (0 <= self.l < self.n and abs(self.m) <= self.l):
            raise ValueError(f"invalid quantum numbers {(self.n, self.l, self.m)}")
        if (self.n, self.l, self.m) not in SUPPORTED:
            raise ValueError(f"unsupported state {(self.n, self.l, self.m)}; "
                             "only (1,0,0) and (2,1,1) are implemented")

    @property
    def energy(self) -> float:
        return bohr_energy(self.n)


GROUND = HydrogenEigenstate(1, 0, 0)
EXCITED = HydrogenEigenstate(2, 1, 1)


def transition_frequency() -> float:
    return EXCITED.energy - GROUND.energy


def radial(state: HydrogenEigenstate, r):
    r = np.asarray(r, dtype=float)
    if state.n == 1:
        return 2.0 * np.exp(-r)
    return r * np.exp(-r / 2.0) / (2.0 * math.sqrt(6.0))


def angular(state: HydrogenEigenstate, theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if state.l == 0:
        return np.full(np.broadcast(theta, phi).shape, _Y00, dtype=complex)
    return _Y11 * np.sin(theta) * np.exp(1j * phi)


def eigenstate_amplitude(state: HydrogenEigenstate, r, theta, phi, t=0.0):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    psi = radial(state, r) * angular(state, theta, phi) * np.exp(-1j * state.energy * np.asarray(t))
    return psi[()] if psi.ndim == 0 else psi


@dataclass(frozen=True)
class SuperpositionState:
    a0: complex = 1 / math.sqrt(2)
    a1: complex = 1 / math.sqrt(2)

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|a0|^2 + |a1|^2 = {norm!r}, expected 1")

    @property
    def omega(self) -> float:
        return transition_frequency()


def superposition_density(sp: SuperpositionState, r, theta, phi, t=0.0):
    psi = (sp.a0 * eigenstate_amplitude(GROUND, r, theta, phi, t)
           + sp.a1 * eigenstate_amplitude(EXCITED, r, theta, phi, t))
    d = np.abs(psi) ** 2
    return float(d) if np.ndim(d) == 0 else d


class Harmonics(NamedTuple):
    f1: float
    f2: float
    phase: float  # nan where f2 vanishes


def phi_spectrum(sp: SuperpositionState, r, theta, t, n_phi_samples: int = 64):
    """One-sided amplitude spectrum of the density over a uniform phi grid."""
    if n_phi_samples < 8:
        raise ValueError("n_phi_samples must be >= 8")
    phi = 2.0 * np.pi * np.arange(n_phi_samples) / n_phi_samples
    c = np.fft.rfft(superposition_density(sp, r, theta, phi, t)) / n_phi_samples
    amp = 2.0 * np.abs(c)
    amp[0] = c[0].real
    if n_phi_samples % 2 == 0:
        amp[-1] = np.abs(c[-1])
    return amp, c


def extract_f1_f2(sp: SuperpositionState, r, theta, t, n_phi_samples: int = 64,
                  zero_tol: float = 1e-14) -> Harmonics:
    amp, c = phi_spectrum(sp, r, theta, t, n_phi_samples)
    f1, f2 = float(amp[0]), float(amp[1])
    # density = f1 + f2 cos(phi - phase) puts the phase in c_1 = f2/2 e^{-i phase}
    phase = float(np.mod(-np.angle(c[1]), 2 * np.pi)) if f2 > zero_tol * max(f1, 1e-300) else math.nan
    return Harmonics(f1, f2, phase)


def density_grid(sp: SuperpositionState, r, theta, phi, t):
    """Rows ``(r, theta, phi, t, density)`` over the outer product of the axes."""
    R, TH, PH, T = np.meshgrid(np.atleast_1d(r), np.atleast_1d(theta),
                               np.atleast_1d(phi), np.atleast_1d(t), indexing="ij")
    dens = superposition_density(sp, R, TH, PH, T)
    return np.column_stack([a.ravel() for a in (R, TH, PH, T, np.asarray(dens))])


def _quadrature(n_r: int, r_max: float, n_theta: int, n_phi: int):
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * r_max * (xr + 1.0)
    wr = 0.5 * r_max * wr * r * r
    xt, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(xt)  # weight sin(theta) d(theta) absorbed by d(cos theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wp = np.full(n_phi, 2.0 * np.pi / n_phi)
    return (r, theta, phi), (wr, wt, wp)


def overlap(a: HydrogenEigenstate, b: HydrogenEigenstate, r_max: float = 50.0,
            n_r: int = 2000, n_theta: int = 32, n_phi: int = 16) -> complex:
    """<a|b> by Gauss-Legendre in r and cos(theta), periodic rule in phi."""
    (r, th, ph), (wr, wt, wp) = _quadrature(n_r, r_max, n_theta, n_phi)
    R, TH, PH = np.meshgrid(r, th, ph, indexing="ij")
    W = wr[:, None, None] * wt[None, :, None] * wp[None, None, :]
    integrand = np.conj(eigenstate_amplitude(a, R, TH, PH)) * eigenstate_amplitude(b, R, TH, PH)
    return complex(np.sum(W * integrand))
