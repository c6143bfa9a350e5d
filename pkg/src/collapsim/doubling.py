"""Discrete doubling chain: the halving argument for hit-1 probability.

From a position xi < 1/2 the particle is equally likely to reach 0 or 2*xi;
from xi > 1/2 it is equally likely to reach 1 or 2*xi - 1.  Each
non-absorbing step therefore applies the doubling map and consumes one
binary digit of the start position, and the total hit-1 mass is
``sum_k c_k 2**-k`` = the start position.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_MAX_STEPS = 64


class Status(enum.Enum):
    RUNNING = "running"
    ABSORBED_AT_0 = "absorbed_at_0"
    ABSORBED_AT_1 = "absorbed_at_1"


class ChainAbsorbedError(RuntimeError):
    pass


@dataclass(frozen=True)
class DoublingChainState:
    position: float
    step_count: int = 0
    status: Status = Status.RUNNING

    def __post_init__(self):
        if self.status is Status.RUNNING and not 0.0 <= self.position <= 1.0:
            raise ValueError(f"position {self.position!r} outside [0, 1]")

    @property
    def running(self) -> bool:
        return self.status is Status.RUNNING


def doubling_step(state: DoublingChainState, coin: int) -> DoublingChainState:
    if not state.running:
        raise ChainAbsorbedError(f"chain already {state.status.value}")
    xi = state.position
    n = state.step_count + 1
    if xi == 0.0:
        return replace(state, step_count=n, status=Status.ABSORBED_AT_0)
    if xi == 1.0:
        return replace(state, step_count=n, status=Status.ABSORBED_AT_1)
    if xi == 0.5:
        # 2*xi == 1 and 2*xi - 1 == 0: either branch lands on an endpoint
        status = Status.ABSORBED_AT_1 if coin else Status.ABSORBED_AT_0
        return replace(state, position=float(coin), step_count=n, status=status)
    if xi < 0.5:
        if coin:
            return replace(state, position=2.0 * xi, step_count=n)
        return replace(state, position=0.0, step_count=n,
                       status=Status.ABSORBED_AT_0)
    if coin:
        return replace(state, position=1.0, step_count=n,
                       status=Status.ABSORBED_AT_1)
    return replace(state, position=2.0 * xi - 1.0, step_count=n)


def run_doubling_chain(x0: float, rng: np.random.Generator,
                       max_steps: int = DEFAULT_MAX_STEPS) -> int:
    """Run one chain from ``x0`` and return the endpoint it reaches.

    A chain still running after ``max_steps`` is resolved by a single
    Bernoulli(position) draw.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    state = DoublingChainState(x0)
    while state.running and state.step_count < max_steps:
        state = doubling_step(state, int(rng.integers(2)))
    if state.running:
        return int(rng.random() < state.position)
    return 1 if state.status is Status.ABSORBED_AT_1 else 0


def hit_frequency(x0: float, n_trials: int, rng: np.random.Generator,
                  max_steps: int = DEFAULT_MAX_STEPS) -> int:
    """Number of chains out of ``n_trials`` that end at 1 (vectorized)."""
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0 = {x0!r} outside [0, 1]")
    pos = np.full(n_trials, float(x0))
    hits = 0
    for _ in range(max_steps):
        if pos.size == 0:
            break
        coin = rng.integers(2, size=pos.size).astype(bool)
        at0 = pos == 0.0
        at1 = pos == 1.0
        low = pos < 0.5
        half = pos == 0.5
        up = ~low & ~half
        hit1 = at1 | (coin & (half | (up & ~at1)))
        hit0 = at0 | (~coin & (half | (low & ~at0)))
        hits += int(hit1.sum())
        keep = ~(hit1 | hit0)
        pos = pos[keep]
        pos = np.where(pos < 0.5, 2.0 * pos, 2.0 * pos - 1.0)
    if pos.size:
        hits += int((rng.random(pos.size) < pos).sum())
    return hits


def exact_hit_probability(x0):
    """Hit-1 probability obtained by summing the chain's absorption branches.

    At step k the running chain sits at ``frac(2**(k-1) * x0)`` with
    probability ``2**-(k-1)``; if that position is >= 1/2 the coin sends
    half of the mass to 1.  The branch masses are accumulated until the
    position reaches 0, which happens after at most 1074 steps for any
    double.  Accepts scalars or arrays.
    """
    x = np.asarray(x0, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise ValueError("x0 outside [0, 1]")
    total = np.where(x == 1.0, 1.0, 0.0)
    pos = np.where(x == 1.0, 0.0, x)
    mass = 1.0
    while np.any(pos > 0.0):
        mass *= 0.5
        upper = pos >= 0.5
        total = total + np.where(upper, mass, 0.0)
        pos = np.where(upper, 2.0 * pos - 1.0, 2.0 * pos)
    return float(total) if total.ndim == 0 else total
