"""Scenario runners and statistical reports.

One-atom: photon free vs excited, with an optional logistic pump.
Two-atom: the stuck entangled state, endpoint 1 = A excited.
Three-atom: two merging particles (see ``multi_particle``).
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import _kernels, multi_particle
from .amplitudes import EntangledAmplitudes, to_diffusion
from .diffusion import UNABSORBED, DiffusionParams, simulate
from .parallel import concat, map_blocks
from .stats import wilson_interval

SCENARIOS = ("one_atom", "two_atom", "three_atom")
TWO_ATOM_LABELS = ("A excited", "B excited")
ONE_ATOM_LABELS = ("photon free", "excited")
ONE_ATOM_OUTCOMES = ("absorbed", "escaped")
THREE_ATOM_LABELS = ("A excited", "B excited", "C excited")
CONFIDENCE = 0.95


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    initial_amplitudes: EntangledAmplitudes
    params: DiffusionParams = field(default_factory=DiffusionParams)
    pump_rate: float = 0.0
    n_trials: int = 10_000
    master_seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        want = 3 if self.scenario == "three_atom" else 2
        if self.initial_amplitudes.n != want:
            raise ValueError(f"{self.scenario} needs {want} amplitudes, "
                             f"got {self.initial_amplitudes.n}")
        if self.pump_rate < 0:
            raise ValueError("pump_rate must be >= 0")
        if self.pump_rate and self.scenario != "one_atom":
            raise ValueError("pump_rate applies to the one_atom scenario only")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def echo(self) -> dict:
        amps = self.initial_amplitudes
        return {
            "scenario": self.scenario,
            "initial_amplitudes": [_fmt_complex(c) for c in amps.amplitudes],
            "basis_labels": list(amps.basis_labels),
            "params": dataclasses.asdict(self.params),
            "pump_rate": self.pump_rate,
            "n_trials": self.n_trials,
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class EscapeEvent:
    direction: tuple[float, float, float]
    time: float

    def __post_init__(self):
        if abs(math.fsum(c * c for c in self.direction) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")


@dataclass
class ExperimentReport:
    scenario: str
    labels: tuple[str, ...]
    counts: dict[str, int]
    frequencies: dict[str, float]
    intervals: dict[str, tuple[float, float]]
    n_trials: int
    unabsorbed: int
    mean_time: float
    median_time: float
    time_stderr: float
    seed: int
    config: dict[str, Any]
    extra: dict[str, Any] = field(default_factory=dict)
    events: Optional[list] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "scenario", "n_trials", "unabsorbed", "mean_time", "median_time",
            "time_stderr", "seed", "config", "extra")}
        d["labels"] = list(self.labels)
        d["counts"] = dict(self.counts)
        d["frequencies"] = dict(self.frequencies)
        d["intervals"] = {k: list(v) for k, v in self.intervals.items()}
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = [f"scenario  {self.scenario}", f"trials    {self.n_trials}",
                 f"seed      {self.seed}", ""]
        w = max(len(s) for s in self.labels + ("label",))
        lines.append(f"{'label':<{w}}  {'count':>9}  {'freq':>9}  {'ci_low':>9}  {'ci_high':>9}")
        for lab in self.labels:
            lo, hi = self.intervals[lab]
            lines.append(f"{lab:<{w}}  {self.counts[lab]:>9d}  {self.frequencies[lab]:>9.6f}"
                         f"  {lo:>9.6f}  {hi:>9.6f}")
        lines += ["", f"unabsorbed   {self.unabsorbed}",
                  f"mean time    {self.mean_time:.6g} +/- {self.time_stderr:.2g}",
                  f"median time  {self.median_time:.6g}"]
        for k in sorted(self.extra):
            lines.append(f"{k}  {self.extra[k]}")
        return "\n".join(lines) + "\n"

    def hit_frequency(self, label: str) -> float:
        return self.frequencies[label]


def _fmt_complex(c: complex):
    return c.real if c.imag == 0 else [c.real, c.imag]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def build_report(scenario: str, labels: Sequence[str], codes: np.ndarray,
                 times: np.ndarray, config: dict, seed: int,
                 extra: dict | None = None) -> ExperimentReport:
    """Summarize per-trial outcome codes (index into ``labels``, -1 unabsorbed).

    Times are summarized over absorbed trials only.
    """
    n = int(codes.size)
    counts = {lab: int(np.count_nonzero(codes == i)) for i, lab in enumerate(labels)}
    unabsorbed = int(np.count_nonzero(codes == UNABSORBED))
    assert sum(counts.values()) + unabsorbed == n
    freqs = {lab: c / n for lab, c in counts.items()}
    intervals = {lab: wilson_interval(c, n, CONFIDENCE) for lab, c in counts.items()}
    done = times[codes != UNABSORBED]
    if done.size:
        mean, median = float(done.mean()), float(np.median(done))
        stderr = float(done.std(ddof=1) / math.sqrt(done.size)) if done.size > 1 else 0.0
    else:
        mean = median = stderr = math.nan
    return ExperimentReport(scenario, tuple(labels), counts, freqs, intervals, n,
                            unabsorbed, mean, median, stderr, int(seed),
                            _jsonable(config), dict(extra or {}))


def run_two_atom(config: ScenarioConfig, workers: int | None = None) -> ExperimentReport:
    if config.scenario != "two_atom":
        raise ValueError("run_two_atom needs a two_atom config")
    (x,) = to_diffusion(config.initial_amplitudes).positions
    ends, times = simulate(x, config.n_trials, config.params, config.master_seed,
                           workers=workers)
    # endpoint 1 -> first label (A excited), endpoint 0 -> second
    codes = np.where(ends == 1, 0, np.where(ends == 0, 1, UNABSORBED))
    labels = config.initial_amplitudes.basis_labels
    return build_report("two_atom", labels, codes, times, config.echo(),
                        config.master_seed, {"x0": x})


def random_direction(rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """``n`` directions uniform on the unit sphere."""
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def run_one_atom(config: ScenarioConfig, keep_events: bool = False,
                 workers: int | None = None) -> ExperimentReport:
    """Photon absorption by a single atom with an optional pump.

    The excited-state probability ``x = |C_2|^2`` diffuses as in the two-atom
    case plus a logistic drift ``pump_rate * x (1 - x)``.  Endpoint 1 means
    the photon was absorbed; endpoint 0 means it escaped, in a direction
    drawn uniformly on the sphere.
    """
    if config.scenario != "one_atom":
        raise ValueError("run_one_atom needs a one_atom config")
    (p_free,) = to_diffusion(config.initial_amplitudes).positions
    x = 1.0 - p_free
    params, lam = config.params, config.pump_rate

    def block(size, rng):
        ends, steps = _kernels.single_batch(x, size, params.noise_scale, lam * params.dt,
                                            params.epsilon, params.max_steps, rng)
        dirs = random_direction(rng, int(np.count_nonzero(ends == 0)))
        return ends, steps, dirs

    parts = map_blocks(block, config.n_trials, config.master_seed, workers)
    ends, steps, dirs = concat(parts)
    times = steps * params.dt
    codes = np.where(ends == 1, 0, np.where(ends == 0, 1, UNABSORBED))
    mean_dir = dirs.mean(axis=0) if len(dirs) else np.zeros(3)
    extra = {"x0": x, "escape_mean_direction": mean_dir.tolist(),
             "escape_mean_direction_norm": float(np.linalg.norm(mean_dir))}
    report = build_report("one_atom", ONE_ATOM_OUTCOMES, codes, times, config.echo(),
                          config.master_seed, extra)
    if keep_events:
        esc_times = times[ends == 0]
        report.events = [EscapeEvent(tuple(d), float(t)) for d, t in zip(dirs, esc_times)]
    return report


def run_three_atom(config: ScenarioConfig, rule: str = "midpoint",
                   workers: int | None = None) -> ExperimentReport:
    if config.scenario != "three_atom":
        raise ValueError("run_three_atom needs a three_atom config")
    x1, x2 = to_diffusion(config.initial_amplitudes).positions
    codes, times = multi_particle.simulate_pairs(x1, x2, config.n_trials, config.params,
                                                 config.master_seed, rule, workers)
    labels = config.initial_amplitudes.basis_labels
    return build_report("three_atom", labels, codes, times, config.echo(),
                        config.master_seed, {"x1": x1, "x2": x2, "merge_rule": rule})


def run_scenario(config: ScenarioConfig, workers: int | None = None) -> ExperimentReport:
    runner = {"one_atom": run_one_atom, "two_atom": run_two_atom,
              "three_atom": run_three_atom}[config.scenario]
    return runner(config, workers=workers)


def run_casimir_sweep(base_config: ScenarioConfig, intensities: Sequence[float],
                      workers: int | None = None) -> list[ExperimentReport]:
    """Two-atom runs at each fluctuation intensity, same seed throughout.

    ``max_time`` is rescaled to ``100 / I`` unless the base config fixed a
    value other than the default for its own intensity.
    """
    if not intensities:
        raise ValueError("need at least one intensity")
    if any(not i > 0 for i in intensities):
        raise ValueError("intensities must all be > 0")
    base = base_config.params
    default_tmax = math.isclose(base.max_time, 100.0 / base.intensity)
    reports = []
    for inten in intensities:
        params = dataclasses.replace(base, intensity=float(inten),
                                     max_time=None if default_tmax else base.max_time)
        cfg = dataclasses.replace(base_config, scenario="two_atom", params=params,
                                  pump_rate=0.0)
        rep = run_two_atom(cfg, workers=workers)
        rep.extra["intensity"] = float(inten)
        reports.append(rep)
    return reports


def sweep_rows(reports: Sequence[ExperimentReport]) -> list[dict]:
    """Per-intensity summary rows for the sweep CSV."""
    rows = []
    for rep in reports:
        first = rep.labels[0]
        lo, hi = rep.intervals[first]
        rows.append({"intensity": rep.extra["intensity"], "mean_time": rep.mean_time,
                     "stderr": rep.time_stderr, "hit1_freq": rep.frequencies[first],
                     "ci_low": lo, "ci_high": hi})
    return rows


def check_intensity_scaling(reports: Sequence[ExperimentReport], rtol: float = 0.05) -> dict:
    """Monotone decrease of mean time with I, and ``t * I`` constant to ``rtol``."""
    rows = sorted(sweep_rows(reports), key=lambda r: r["intensity"])
    times = [r["mean_time"] for r in rows]
    scaled = np.array([r["mean_time"] * r["intensity"] for r in rows])
    return {
        "monotone": all(a > b for a, b in zip(times, times[1:])),
        "inverse_scaling": bool(np.all(np.abs(scaled / scaled.mean() - 1.0) <= rtol)),
        "time_times_intensity": scaled.tolist(),
    }


# -- configuration files ---------------------------------------------------

CONFIG_KEYS = ("scenario", "initial_amplitudes", "basis_labels", "params.intensity",
               "params.dt", "params.epsilon", "params.max_time", "pump_rate",
               "n_trials", "master_seed")


def parse_config(text: str) -> ScenarioConfig:
    """Read a flat ``key = value`` config.

    Blank lines and ``#`` comments are ignored.  ``initial_amplitudes`` is a
    comma-separated list of Python complex literals (``0.6``, ``0.8j``,
    ``0.6+0.1j``); ``basis_labels`` is comma-separated text.
    """
    raw: dict[str, str] = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {num}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {num}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"line {num}: duplicate key {key!r}")
        raw[key] = value
    for key in ("scenario", "initial_amplitudes"):
        if key not in raw:
            raise ValueError(f"missing required key {key!r}")
    amps = tuple(complex(s.strip().replace(" ", "")) for s in raw["initial_amplitudes"].split(","))
    labels = tuple(s.strip() for s in raw["basis_labels"].split(",")) if "basis_labels" in raw else ()
    scenario = raw["scenario"]
    if not labels:
        labels = {"one_atom": ONE_ATOM_LABELS, "two_atom": TWO_ATOM_LABELS,
                  "three_atom": THREE_ATOM_LABELS}.get(scenario, ())
    pkw = {k.split(".", 1)[1]: float(v) for k, v in raw.items()
           if k.startswith("params.") and v.lower() != "none"}
    kw: dict[str, Any] = {}
    if "pump_rate" in raw:
        kw["pump_rate"] = float(raw["pump_rate"])
    if "n_trials" in raw:
        kw["n_trials"] = int(raw["n_trials"])
    if "master_seed" in raw:
        kw["master_seed"] = int(raw["master_seed"])
    return ScenarioConfig(scenario, EntangledAmplitudes(amps, labels),
                          DiffusionParams(**pkw), **kw)


def format_config(config: ScenarioConfig) -> str:
    amps = ", ".join(repr(c.real) if c.imag == 0 else repr(c)
                     for c in config.initial_amplitudes.amplitudes)
    p = config.params
    lines = [
        f"scenario = {config.scenario}",
        f"initial_amplitudes = {amps}",
        f"basis_labels = {', '.join(config.initial_amplitudes.basis_labels)}",
        f"params.intensity = {p.intensity!r}",
        f"params.dt = {p.dt!r}",
        f"params.epsilon = {p.epsilon!r}",
        f"params.max_time = {p.max_time!r}",
        f"pump_rate = {config.pump_rate!r}",
        f"n_trials = {config.n_trials}",
        f"master_seed = {config.master_seed}",
    ]
    return "\n".join(lines) + "\n"


def two_atom_config(x0: float, **kw) -> ScenarioConfig:
    amps = EntangledAmplitudes((math.sqrt(x0), math.sqrt(1.0 - x0)), TWO_ATOM_LABELS)
    return ScenarioConfig("two_atom", amps, **kw)


def one_atom_config(x0: float, **kw) -> ScenarioConfig:
    """``x0`` is the initial excited-state probability ``|C_2|^2``."""
    amps = EntangledAmplitudes((math.sqrt(1.0 - x0), math.sqrt(x0)), ONE_ATOM_LABELS)
    return ScenarioConfig("one_atom", amps, **kw)


def three_atom_config(x1: float, x2: float, **kw) -> ScenarioConfig:
    lengths = (x1, x2 - x1, 1.0 - x2)
    amps = EntangledAmplitudes(tuple(math.sqrt(max(v, 0.0)) for v in lengths),
                               THREE_ATOM_LABELS)
    return ScenarioConfig("three_atom", amps, **kw)
