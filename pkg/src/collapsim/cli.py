"""``collapsim`` command line.

Exit status: 0 on success, 2 on a usage or validation error, 1 when the run
itself fails (including an unwritable ``--output``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import diffusion, doubling, experiments, hydrogen, kick, multi_particle
from .amplitudes import binary_expansion
from .diffusion import DiffusionParams
from .stats import chi_square_test, wilson_interval

SWEEP_COLUMNS = ("intensity", "mean_time", "stderr", "hit1_freq", "ci_low", "ci_high")
HYDROGEN_COLUMNS = ("r", "theta", "phi", "t", "density")
REPORT_COLUMNS = ("label", "count", "frequency", "ci_low", "ci_high")


class UsageError(ValueError):
    pass


@dataclass
class Result:
    data: dict
    columns: Sequence[str] = ()
    rows: list = field(default_factory=list)
    text: Optional[str] = None

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(experiments._jsonable(self.data), sort_keys=True,
                              indent=2, allow_nan=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            emit_csv(self.columns, self.rows, buf)
            return buf.getvalue()
        return self.text if self.text is not None else _kv_text(self.data)


def _fmt_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def emit_csv(columns: Sequence[str], rows, out) -> None:
    """Write a header plus one row per record.

    ``rows`` holds sequences in column order or dicts keyed by column; floats
    carry 17 significant digits.  ``out`` is a path or a text stream.
    """
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            emit_csv(columns, rows, fh)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        w.writerow([_fmt_cell(v) for v in row])


def _kv_text(data: dict, indent: str = "") -> str:
    lines = []
    width = max((len(k) for k in data), default=0)
    for k in sorted(data):
        v = data[k]
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_kv_text(v, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{k:<{width}}  {v}")
    return "\n".join(lines) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _check_unit(name, v):
    if not 0.0 <= v <= 1.0 or math.isnan(v):
        raise UsageError(f"--{name} must lie in [0, 1], got {v!r}")


def _check_trials(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")


def _params(args) -> DiffusionParams:
    try:
        return DiffusionParams(args.intensity, args.dt, args.epsilon, args.max_time)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _report_result(rep: experiments.ExperimentReport) -> Result:
    rows = [(lab, rep.counts[lab], rep.frequencies[lab], *rep.intervals[lab])
            for lab in rep.labels]
    return Result(rep.to_dict(), REPORT_COLUMNS, rows, rep.to_text())


# -- subcommands: each validates and returns a zero-argument job ------------

def prep_born_exact(args) -> Callable[[], Result]:
    _check_unit("x0", args.x0)
    _check_trials(args)
    if args.max_steps < 1:
        raise UsageError("--max-steps must be >= 1")

    def job():
        exact = doubling.exact_hit_probability(args.x0)
        rng = np.random.default_rng(args.seed)
        hits = doubling.hit_frequency(args.x0, args.trials, rng, args.max_steps)
        lo, hi = wilson_interval(hits, args.trials, 0.997)
        data = {"x0": args.x0, "exact": exact, "trials": args.trials, "hits": hits,
                "frequency": hits / args.trials, "ci_low": lo, "ci_high": hi,
                "confidence": 0.997, "exact_within_interval": lo <= exact <= hi,
                "binary_digits": "".join(map(str, binary_expansion(args.x0, 24))),
                "seed": args.seed, "max_steps": args.max_steps}
        return Result(data, ("x0", "exact", "trials", "hits", "frequency", "ci_low", "ci_high"),
                      [(args.x0, exact, args.trials, hits, hits / args.trials, lo, hi)])
    return job


def prep_diffuse(args):
    _check_unit("x0", args.x0)
    _check_trials(args)
    params = _params(args)

    def job():
        ends, times = diffusion.simulate(args.x0, args.trials, params, args.seed)
        codes = np.where(ends == 1, 0, np.where(ends == 0, 1, diffusion.UNABSORBED))
        config = {"x0": args.x0, "params": params, "n_trials": args.trials}
        extra = {"x0": args.x0,
                 "exact_hit_probability": doubling.exact_hit_probability(args.x0),
                 "exact_mean_time": diffusion.mean_absorption_time_exact(args.x0, params.intensity)}
        rep = experiments.build_report("diffuse", ("endpoint 1", "endpoint 0"), codes,
                                       times, config, args.seed, extra)
        return _report_result(rep)
    return job


def prep_three_atom(args):
    _check_trials(args)
    if args.amplitudes:
        try:
            amps = experiments.EntangledAmplitudes(
                tuple(complex(s.strip()) for s in args.amplitudes.split(",")),
                experiments.THREE_ATOM_LABELS)
        except ValueError as err:
            raise UsageError(f"--amplitudes: {err}") from None
        if amps.n != 3:
            raise UsageError("--amplitudes needs three values")
        x1, x2 = experiments.to_diffusion(amps).positions
    else:
        x1, x2 = args.x1, args.x2
    _check_unit("x1", x1)
    _check_unit("x2", x2)
    if x1 > x2:
        raise UsageError(f"need x1 <= x2, got {x1} > {x2}")
    params = _params(args)

    def job():
        rep = multi_particle.outcome_distribution_mc(x1, x2, args.trials, params,
                                                     args.seed, args.merge_rule)
        probs = np.array([x1, x2 - x1, 1.0 - x2])
        observed = [rep.counts[lab] for lab in rep.labels]
        if rep.unabsorbed == 0 and np.all(probs * args.trials >= 5):
            stat, p = chi_square_test(observed, probs)
            rep.extra.update(chi_square=stat, p_value=p)
        rep.extra["expected"] = probs.tolist()
        return _report_result(rep)
    return job


def prep_one_atom(args):
    _check_unit("x0", args.x0)
    _check_trials(args)
    if not args.pump_rate >= 0:
        raise UsageError("--pump-rate must be >= 0")
    cfg = experiments.one_atom_config(args.x0, params=_params(args),
                                      pump_rate=args.pump_rate, n_trials=args.trials,
                                      master_seed=args.seed)
    return lambda: _report_result(experiments.run_one_atom(cfg))


def prep_run(args):
    try:
        with open(args.config) as fh:
            cfg = experiments.parse_config(fh.read())
    except OSError as err:
        raise UsageError(f"cannot read config: {err}") from None
    except ValueError as err:
        raise UsageError(f"{args.config}: {err}") from None
    return lambda: _report_result(experiments.run_scenario(cfg))


def prep_casimir_sweep(args):
    _check_unit("x0", args.x0)
    _check_trials(args)
    if not args.intensities or any(not i > 0 for i in args.intensities):
        raise UsageError("--intensities must be positive")
    base = experiments.two_atom_config(args.x0, params=_params(args),
                                       n_trials=args.trials, master_seed=args.seed)
    for inten in args.intensities:  # validate every params set up front
        try:
            DiffusionParams(inten, args.dt, args.epsilon, args.max_time)
        except ValueError as err:
            raise UsageError(str(err)) from None

    def job():
        reports = experiments.run_casimir_sweep(base, args.intensities)
        rows = experiments.sweep_rows(reports)
        x = reports[0].extra["x0"]
        for row in rows:
            row["exact_mean_time"] = diffusion.mean_absorption_time_exact(x, row["intensity"])
        data = {"x0": x, "trials": args.trials, "seed": args.seed, "rows": rows,
                "scaling": experiments.check_intensity_scaling(reports)}
        return Result(data, SWEEP_COLUMNS, rows)
    return job


def prep_hydrogen(args):
    if any(r < 0 for r in args.r):
        raise UsageError("--r values must be >= 0")
    if args.nphi < 8:
        raise UsageError("--nphi must be >= 8")
    try:
        sp = hydrogen.SuperpositionState(args.a0, args.a1)
    except ValueError as err:
        raise UsageError(str(err)) from None

    def job():
        phi = 2.0 * np.pi * np.arange(args.nphi) / args.nphi
        grid = hydrogen.density_grid(sp, args.r, args.theta, phi, args.t)
        harmonics = []
        for r in args.r:
            for th in args.theta:
                for t in args.t:
                    h = hydrogen.extract_f1_f2(sp, r, th, t, max(args.nphi, 8))
                    harmonics.append({"r": r, "theta": th, "t": t, "f1": h.f1, "f2": h.f2,
                                      "phase": None if math.isnan(h.phase) else h.phase})
        data = {"omega": hydrogen.transition_frequency(), "a0": args.a0, "a1": args.a1,
                "columns": list(HYDROGEN_COLUMNS), "rows": grid.tolist(),
                "harmonics": harmonics}
        return Result(data, HYDROGEN_COLUMNS, grid.tolist())
    return job


def prep_kick_demo(args):
    if args.kicks < 1:
        raise UsageError("--kicks must be >= 1")
    if not 0 < args.width < math.pi / 4:
        raise UsageError("--width must lie in (0, pi/4)")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")

    def job():
        rng = np.random.default_rng(args.seed)
        phis, xs = kick.kick_chain(args.kicks, rng, args.width)
        single = [kick.joint_state_after_kick(p) for p in phis]
        energies = [kick.total_energy(s) for s in single]
        first_dx = np.array([s.x for s in single]) - 0.5
        rows = [(0, math.nan, xs[0])] + [(k + 1, phis[k], xs[k + 1]) for k in range(args.kicks)]
        data = {"kicks": args.kicks, "width": args.width, "seed": args.seed,
                "single_kick_mean_dx": float(first_dx.mean()),
                "single_kick_dx_stderr": float(first_dx.std(ddof=1) / math.sqrt(len(first_dx)))
                if len(first_dx) > 1 else 0.0,
                "energy_min": min(energies), "energy_max": max(energies),
                "max_projection_residual": max(kick.projection_consistency(p) for p in phis),
                "final_x": float(xs[-1]),
                "path": [{"step": int(s), "phi": None if math.isnan(p) else float(p), "x": float(x)}
                         for s, p, x in rows]}
        return Result(data, ("step", "phi", "x"), rows)
    return job


def _add_common(p, trials=100_000):
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="write here instead of standard output")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")


def _add_diffusion(p):
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--max-time", type=float, default=None,
                   help="default 100 / intensity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collapsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("born-exact", help="doubling chain: exact vs Monte Carlo")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--max-steps", type=int, default=doubling.DEFAULT_MAX_STEPS)
    _add_common(p)
    p.set_defaults(prepare=prep_born_exact)

    p = sub.add_parser("diffuse", help="single-particle absorption runs")
    p.add_argument("--x0", type=float, required=True)
    _add_common(p)
    _add_diffusion(p)
    p.set_defaults(prepare=prep_diffuse)

    p = sub.add_parser("three-atom", help="two merging particles, three outcomes")
    p.add_argument("--x1", type=float, default=0.2)
    p.add_argument("--x2", type=float, default=0.7)
    p.add_argument("--amplitudes", help="three comma-separated amplitudes (overrides x1/x2)")
    p.add_argument("--merge-rule", choices=tuple(multi_particle.MERGE_RULES), default="midpoint")
    _add_common(p)
    _add_diffusion(p)
    p.set_defaults(prepare=prep_three_atom)

    p = sub.add_parser("one-atom", help="single atom with escape channel and pump")
    p.add_argument("--x0", type=float, required=True, help="initial excited probability")
    p.add_argument("--pump-rate", type=float, default=0.0)
    _add_common(p)
    _add_diffusion(p)
    p.set_defaults(prepare=prep_one_atom)

    p = sub.add_parser("casimir-sweep", help="two-atom runs across intensities")
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--intensities", type=_floats, default=[0.25, 0.5, 1.0, 2.0, 4.0])
    _add_common(p, trials=20_000)
    _add_diffusion(p)
    p.set_defaults(prepare=prep_casimir_sweep)

    p = sub.add_parser("hydrogen-density", help="1s/2p superposition density grid")
    p.add_argument("--r", type=_floats, default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--theta", type=_floats, default=[math.pi / 4, math.pi / 2])
    p.add_argument("--t", type=_floats, default=[0.0])
    p.add_argument("--nphi", type=int, default=16)
    p.add_argument("--a0", type=float, default=1 / math.sqrt(2))
    p.add_argument("--a1", type=float, default=1 / math.sqrt(2))
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv", "text"), default="csv")
    p.set_defaults(prepare=prep_hydrogen)

    p = sub.add_parser("kick-demo", help="chain of random fluctuation kicks")
    p.add_argument("--kicks", type=int, default=200)
    p.add_argument("--width", type=float, default=0.05, help="phi half-width around pi/4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(prepare=prep_kick_demo)

    p = sub.add_parser("run", help="run a scenario from a key = value config file")
    p.add_argument("config")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(prepare=prep_run)
    return parser


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path) or not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path!r}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"cannot write to {path!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    prog = f"collapsim {args.command}"
    try:
        job = args.prepare(args)
    except (UsageError, ValueError) as err:
        print(f"{prog}: error: {err}", file=sys.stderr)
        return 2
    try:
        if args.output:
            _check_writable(args.output)
        text = job().render(args.format)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception as err:  # noqa: BLE001
        print(f"{prog}: failed: {err}", file=sys.stderr)
        return 1
    return 0
