"""Three-atom disentanglement as two merging particles on [0, 1].

The particles start at ``x1 = |C_1|^2`` and ``x2 = |C_1|^2 + |C_2|^2`` and
diffuse independently with the single-particle coefficient.  When they touch
or cross they merge and move on as one.  Terminal configurations map to
outcomes: both at 1 -> A, one at each end -> B, both at 0 -> C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .diffusion import DiffusionParams
from .parallel import concat, map_blocks

LABELS = ("A_excited", "B_excited", "C_excited")
UNABSORBED_LABEL = "unabsorbed"

MERGE_RULES = {
    "midpoint": _kernels.MERGE_MIDPOINT,
    "lower": _kernels.MERGE_LOWER,
    "upper": _kernels.MERGE_UPPER,
}


@dataclass(frozen=True)
class PairState:
    x1: float
    x2: float
    merged: bool = False
    t: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x1 <= self.x2 <= 1.0:
            raise ValueError(f"need 0 <= x1 <= x2 <= 1, got ({self.x1}, {self.x2})")
        if self.merged and self.x1 != self.x2:
            raise ValueError("merged pair must share one position")

    @classmethod
    def start(cls, x1: float, x2: float, epsilon: float = 0.0) -> "PairState":
        x1 = _kernels.snap(float(x1), epsilon)
        x2 = _kernels.snap(float(x2), epsilon)
        return cls(x1, x2, merged=x1 == x2)

    @property
    def absorbed(self) -> bool:
        return self.x1 in (0.0, 1.0) and self.x2 in (0.0, 1.0)


@dataclass(frozen=True)
class ThreeAtomOutcome:
    label: str
    absorption_time: float


def resolve_collision(x1: float, x2: float, rule: str = "midpoint"):
    """Return ``(x1, x2, merged)`` after checking for a crossing."""
    if x1 >= x2:
        m = _kernels.merge_position(x1, x2, MERGE_RULES[rule])
        return m, m, True
    return x1, x2, False


def pair_step(state: PairState, params: DiffusionParams, rng: np.random.Generator,
              rule: str = "midpoint", noise=None) -> PairState:
    """Advance the pair by one step of length ``params.dt``.

    Live particles (strictly inside (0, 1)) each take an independent
    Euler-Maruyama step, lower particle first; a merged pair takes a single
    step.  ``noise`` optionally supplies the normal draws in that order.
    """
    if state.absorbed:
        raise ValueError("both particles already absorbed")
    draws = iter(noise) if noise is not None else None

    def step(x):
        g = next(draws) if draws is not None else rng.standard_normal()
        return _kernels._clamp(x + params.noise_scale * math.sqrt(x * (1.0 - x)) * g)

    eps = params.epsilon
    t = state.t + params.dt
    if state.merged:
        x = _kernels.snap(step(state.x1), eps)
        return PairState(x, x, True, t)
    x1, x2 = state.x1, state.x2
    if 0.0 < x1 < 1.0:
        x1 = step(x1)
    if 0.0 < x2 < 1.0:
        x2 = step(x2)
    x1, x2, merged = resolve_collision(x1, x2, rule)
    return PairState(_kernels.snap(x1, eps), _kernels.snap(x2, eps), merged, t)


def classify(state: PairState) -> str:
    if not state.absorbed:
        return UNABSORBED_LABEL
    if state.x1 == 1.0:
        return LABELS[0]
    if state.x2 == 0.0:
        return LABELS[2]
    return LABELS[1]


def _check(x1, x2):
    if not 0.0 <= x1 <= x2 <= 1.0:
        raise ValueError(f"need 0 <= x1 <= x2 <= 1, got ({x1}, {x2})")


def run_three_atom(x1: float, x2: float, params: DiffusionParams,
                   rng: np.random.Generator, rule: str = "midpoint") -> ThreeAtomOutcome:
    _check(x1, x2)
    codes, steps = _kernels.pair_batch(float(x1), float(x2), 1, params.noise_scale,
                                       params.epsilon, params.max_steps,
                                       MERGE_RULES[rule], rng)
    code = int(codes[0])
    label = UNABSORBED_LABEL if code == _kernels.UNABSORBED else LABELS[code]
    return ThreeAtomOutcome(label, int(steps[0]) * params.dt)


def simulate_pairs(x1: float, x2: float, n_trials: int, params: DiffusionParams,
                   master_seed: int, rule: str = "midpoint",
                   workers: int | None = None):
    """Outcome codes (index into ``LABELS``, -1 unabsorbed) and times."""
    _check(x1, x2)
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    code = MERGE_RULES[rule]

    def block(size, rng):
        return _kernels.pair_batch(float(x1), float(x2), size, params.noise_scale,
                                   params.epsilon, params.max_steps, code, rng)

    out, steps = concat(map_blocks(block, n_trials, master_seed, workers))
    return out, steps * params.dt


def outcome_distribution_mc(x1: float, x2: float, n_trials: int,
                            params: DiffusionParams | None = None,
                            master_seed: int = 0, rule: str = "midpoint"):
    from .experiments import build_report

    params = params or DiffusionParams()
    codes, times = simulate_pairs(x1, x2, n_trials, params, master_seed, rule)
    config = {"scenario": "three_atom", "x1": x1, "x2": x2, "merge_rule": rule,
              "n_trials": n_trials, "params": params}
    return build_report("three_atom", LABELS, codes, times, config, master_seed,
                        {"x1": x1, "x2": x2, "merge_rule": rule})
