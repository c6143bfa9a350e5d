"""Single-particle amplitude diffusion on [0, 1].

The squared amplitude ``x`` follows the zero-drift diffusion

    dX = sqrt(2 I X (1 - X)) dW

integrated by Euler-Maruyama with clamping to [0, 1].  The coefficient
vanishes at both ends, so the walk is absorbed once it comes within
``epsilon`` of an endpoint.  Two finite-difference solvers give independent
checks of the hit-1 probability (p(x) = x) and the mean absorption time
(t(x) = -(x ln x + (1 - x) ln(1 - x)) / I).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import _kernels
from .parallel import concat, map_blocks

UNABSORBED = _kernels.UNABSORBED


@dataclass(frozen=True)
class DiffusionParams:
    intensity: float = 1.0
    dt: float = 1e-4
    epsilon: float = 1e-6
    max_time: Optional[float] = None  # None -> 100 / intensity

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"intensity must be > 0, got {self.intensity!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not 0 < self.epsilon < 0.01:
            raise ValueError(f"epsilon must lie in (0, 0.01), got {self.epsilon!r}")
        if self.max_time is None:
            object.__setattr__(self, "max_time", 100.0 / self.intensity)
        elif not self.max_time > 0:
            raise ValueError(f"max_time must be > 0, got {self.max_time!r}")
        # largest step, taken at x = 1/2
        if math.sqrt(0.5 * self.intensity * self.dt) > 0.05:
            warnings.warn(f"coarse step: intensity*dt = {self.intensity * self.dt:g}"
                          " gives steps above 0.05 near x = 1/2", stacklevel=3)

    @property
    def max_steps(self) -> int:
        return int(math.ceil(self.max_time / self.dt - 1e-9))

    @property
    def noise_scale(self) -> float:
        return math.sqrt(2.0 * self.intensity * self.dt)


@dataclass
class TrajectoryRecord:
    x0: float
    endpoint: Optional[int]  # None when not absorbed by max_time
    absorption_time: float
    steps: int
    path_samples: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def absorbed(self) -> bool:
        return self.endpoint is not None


def diffusion_coefficient(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise ValueError("x outside [0, 1]")
    d = x * (1.0 - x)
    return float(d) if d.ndim == 0 else d


def em_step(x, params: DiffusionParams, rng: np.random.Generator | None = None,
            noise=None, drift: float = 0.0):
    """One Euler-Maruyama step, vectorized over ``x``.

    Positions within ``epsilon`` of an endpoint count as absorbed and are
    returned unchanged.  Pass ``noise`` to supply the standard normal
    draw(s) instead of sampling from ``rng``.  ``drift`` adds the logistic
    term ``drift * x (1 - x) dt``.
    """
    x = np.asarray(x, dtype=float)
    if noise is None:
        if rng is None:
            raise ValueError("need rng or noise")
        noise = rng.standard_normal(x.shape) if x.ndim else rng.standard_normal()
    g = np.asarray(noise, dtype=float)
    eps = params.epsilon
    live = (x >= eps) & (x <= 1.0 - eps)
    d = x * (1.0 - x)
    stepped = x + drift * params.dt * d + params.noise_scale * np.sqrt(d) * g
    out = np.where(live, np.clip(stepped, 0.0, 1.0), x)
    return float(out) if out.ndim == 0 else out


def _check_x0(x0):
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0 = {x0!r} outside [0, 1]")


def run_to_absorption(x0: float, params: DiffusionParams,
                      rng: np.random.Generator, record_every: int = 0,
                      drift: float = 0.0) -> TrajectoryRecord:
    """Integrate one trajectory from ``x0`` until it is absorbed.

    With ``record_every > 0`` the path is sampled every that many steps and
    returned as an ``(m, 2)`` array of ``(t, x)`` rows.
    """
    _check_x0(x0)
    scale, ddt = params.noise_scale, drift * params.dt
    if record_every > 0:
        end, n, ts, xs = _kernels.single_path(
            float(x0), scale, ddt, params.epsilon, params.max_steps,
            int(record_every), rng)
        path = np.column_stack((ts * params.dt, xs))
    else:
        ends, steps = _kernels.single_batch(
            float(x0), 1, scale, ddt, params.epsilon, params.max_steps, rng)
        end, n, path = int(ends[0]), int(steps[0]), None
    return TrajectoryRecord(float(x0), None if end == UNABSORBED else int(end),
                            n * params.dt, int(n), path)


def simulate(x0: float, n_trials: int, params: DiffusionParams, master_seed: int,
             drift: float = 0.0, workers: int | None = None):
    """Run ``n_trials`` independent trajectories from ``x0``.

    Returns ``(endpoints, times)``: int8 endpoints (``UNABSORBED`` = -1 for
    walks still running at ``max_time``) and absorption times.  Trial ``i``
    depends only on ``(master_seed, i)`` and the arguments.
    """
    _check_x0(x0)
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    scale, ddt = params.noise_scale, drift * params.dt

    def block(size, rng):
        return _kernels.single_batch(float(x0), size, scale, ddt,
                                     params.epsilon, params.max_steps, rng)

    ends, steps = concat(map_blocks(block, n_trials, master_seed, workers))
    return ends, steps * params.dt


def _uniform_grid(grid_size: int) -> np.ndarray:
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    return np.linspace(0.0, 1.0, grid_size)


def _solve_second_difference(x: np.ndarray, b: np.ndarray, left: float,
                             right: float) -> np.ndarray:
    """Solve u[i-1] - 2 u[i] + u[i+1] = b[i] on the interior of a uniform grid."""
    m = len(x) - 2
    ab = np.zeros((3, m))
    ab[0, 1:] = 1.0
    ab[1, :] = -2.0
    ab[2, :-1] = 1.0
    b = np.array(b, dtype=float)
    b[0] -= left
    b[-1] -= right
    try:
        inner = solve_banded((1, 1), ab, b)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise np.linalg.LinAlgError(f"singular exit-problem system: {err}") from err
    if not np.all(np.isfinite(inner)):
        raise np.linalg.LinAlgError("singular exit-problem system")
    return np.concatenate(([left], inner, [right]))


def bvp_hitting_probability(grid_size: int) -> np.ndarray:
    """Exit probability through 1 from the finite-difference exit problem.

    ``D(x) p'' = 0`` with ``p(0) = 0, p(1) = 1``; D is positive on the
    interior so it divides out.  Returns ``(grid_size, 2)`` rows ``(x, p)``
    including both boundary nodes.
    """
    x = _uniform_grid(grid_size)
    p = _solve_second_difference(x, np.zeros(grid_size - 2), 0.0, 1.0)
    return np.column_stack((x, p))


def _hat_load_inverse_x(i: np.ndarray) -> np.ndarray:
    """Integral of the unit-grid hat function at node i against 1/x.

    (i+1) ln((i+1)/i) - (i-1) ln(i/(i-1)), the second term absent for i = 1.
    """
    i = i.astype(float)
    right = (i + 1.0) * np.log1p(1.0 / i)
    left = np.where(i > 1, (i - 1.0) * np.log1p(1.0 / np.maximum(i - 1.0, 1.0)), 0.0)
    return right - left


def bvp_mean_absorption_time(grid_size: int, intensity: float = 1.0) -> np.ndarray:
    """Mean exit time from ``I x (1 - x) t'' = -1``, ``t(0) = t(1) = 0``.

    The source ``1 / (x (1 - x)) = 1/x + 1/(1 - x)`` blows up at both ends,
    so sampling it at the nodes only gives first-order accuracy.  Each node's
    right-hand side is instead the source integrated exactly against that
    node's hat function, which keeps nodal values accurate right up to the
    boundaries.
    """
    if not intensity > 0:
        raise ValueError("intensity must be > 0")
    x = _uniform_grid(grid_size)
    n = grid_size - 1
    h = 1.0 / n
    i = np.arange(1, n)
    load = _hat_load_inverse_x(i) + _hat_load_inverse_x(n - i)
    t = _solve_second_difference(x, -h * load / intensity, 0.0, 0.0)
    return np.column_stack((x, t))


def mean_absorption_time_exact(x, intensity: float = 1.0):
    """Closed-form mean exit time -(x ln x + (1-x) ln(1-x)) / I."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -(np.where(x > 0, x * np.log(x), 0.0)
                + np.where(x < 1, (1 - x) * np.log1p(-x), 0.0))
    t = ent / intensity
    return float(t) if t.ndim == 0 else t
