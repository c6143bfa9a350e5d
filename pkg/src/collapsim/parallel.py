"""Deterministic trial-level parallelism.

Trials are grouped into fixed blocks of ``BLOCK_SIZE``; block ``b`` draws
from its own PCG64 stream seeded with ``(master_seed, b)``.  Because the
partition never depends on the worker count, serial and threaded runs
produce identical per-trial results, and an ``n``-trial run is a prefix of
any longer run with the same seed.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

BLOCK_SIZE = 1024
THREADS_ENV = "COLLAPSIM_THREADS"

T = TypeVar("T")


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative")
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([int(master_seed), int(block)])))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


def blocks(n_trials: int) -> list[tuple[int, int]]:
    """``(block_index, size)`` for each block covering ``n_trials``."""
    return [(b, min(BLOCK_SIZE, n_trials - start))
            for b, start in enumerate(range(0, n_trials, BLOCK_SIZE))]


def map_blocks(fn: Callable[[int, np.random.Generator], T], n_trials: int,
               master_seed: int, workers: int | None = None) -> list[T]:
    """Apply ``fn(size, rng)`` to every block, results in block order.

    ``fn`` should release the GIL (numba ``nogil`` kernels do) for threads to
    help.
    """
    jobs = blocks(n_trials)
    workers = worker_count() if workers is None else workers

    def run(job):
        b, size = job
        return fn(size, block_rng(master_seed, b))

    if workers <= 1 or len(jobs) <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(run, jobs))


def concat(parts: Sequence[Sequence[np.ndarray]]) -> tuple[np.ndarray, ...]:
    if not parts:
        return ()
    return tuple(np.concatenate(cols) for cols in zip(*parts))
