"""Compiled trajectory loops.

The per-step arithmetic here must stay identical to ``diffusion.em_step``
and ``multi_particle.pair_step``; the test suite replays both paths on the
same generator and compares trajectories.
"""
import math

import numba
import numpy as np

UNABSORBED = -1

MERGE_MIDPOINT = 0
MERGE_LOWER = 1
MERGE_UPPER = 2


@numba.njit(nogil=True, cache=True)
def _clamp(x):
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


@numba.njit(nogil=True, cache=True)
def single_batch(x0, n, scale, drift_dt, eps, max_steps, gen):
    """``n`` trajectories of dX = drift X(1-X) dt + sqrt(2 I X(1-X)) dW.

    ``scale`` is sqrt(2 I dt), ``drift_dt`` is drift * dt.  Returns the
    endpoint (0, 1 or UNABSORBED) and the number of steps taken.
    """
    ends = np.empty(n, np.int8)
    steps = np.empty(n, np.int64)
    for k in range(n):
        x = x0
        j = 0
        while True:
            if x < eps:
                ends[k] = 0
                break
            if x > 1.0 - eps:
                ends[k] = 1
                break
            if j >= max_steps:
                ends[k] = UNABSORBED
                break
            d = x * (1.0 - x)
            x = _clamp(x + drift_dt * d + scale * math.sqrt(d) * gen.standard_normal())
            j += 1
        steps[k] = j
    return ends, steps


@numba.njit(nogil=True, cache=True)
def single_path(x0, scale, drift_dt, eps, max_steps, every, gen):
    """One trajectory, recording the position every ``every`` steps."""
    cap = max_steps // every + 2
    ts = np.empty(cap, np.int64)
    xs = np.empty(cap)
    m = 0
    x = x0
    j = 0
    end = UNABSORBED
    while True:
        if j % every == 0:
            ts[m] = j
            xs[m] = x
            m += 1
        if x < eps:
            end = 0
            break
        if x > 1.0 - eps:
            end = 1
            break
        if j >= max_steps:
            break
        d = x * (1.0 - x)
        x = _clamp(x + drift_dt * d + scale * math.sqrt(d) * gen.standard_normal())
        j += 1
    if ts[m - 1] != j:
        ts[m] = j
        xs[m] = x
        m += 1
    return end, j, ts[:m], xs[:m]


@numba.njit(nogil=True, cache=True)
def merge_position(a, b, rule):
    if rule == MERGE_LOWER:
        return a
    if rule == MERGE_UPPER:
        return b
    return 0.5 * (a + b)


@numba.njit(nogil=True, cache=True)
def snap(x, eps):
    if x < eps:
        return 0.0
    if x > 1.0 - eps:
        return 1.0
    return x


@numba.njit(nogil=True, cache=True)
def pair_batch(x1_0, x2_0, n, scale, eps, max_steps, rule, gen):
    """``n`` two-particle merging trajectories.

    Returns the outcome code (0: both at 1, 1: split, 2: both at 0, or
    UNABSORBED) and the number of steps until both particles were absorbed.
    """
    out = np.empty(n, np.int8)
    steps = np.empty(n, np.int64)
    for k in range(n):
        x1 = snap(x1_0, eps)
        x2 = snap(x2_0, eps)
        merged = x1 == x2
        j = 0
        while True:
            live1 = 0.0 < x1 < 1.0
            live2 = 0.0 < x2 < 1.0
            if not live1 and not live2:
                break
            if j >= max_steps:
                break
            if merged:
                d = x1 * (1.0 - x1)
                x1 = _clamp(x1 + scale * math.sqrt(d) * gen.standard_normal())
                x1 = snap(x1, eps)
                x2 = x1
            else:
                if live1:
                    d = x1 * (1.0 - x1)
                    x1 = _clamp(x1 + scale * math.sqrt(d) * gen.standard_normal())
                if live2:
                    d = x2 * (1.0 - x2)
                    x2 = _clamp(x2 + scale * math.sqrt(d) * gen.standard_normal())
                if x1 >= x2:
                    x1 = merge_position(x1, x2, rule)
                    x2 = x1
                    merged = True
                x1 = snap(x1, eps)
                x2 = snap(x2, eps)
            j += 1
        if 0.0 < x1 < 1.0 or 0.0 < x2 < 1.0:
            out[k] = UNABSORBED
        elif x1 == 1.0:
            out[k] = 0
        elif x2 == 0.0:
            out[k] = 2
        else:
            out[k] = 1
        steps[k] = j
    return out, steps
