"""Two-atom hit frequencies against x0, with the exact and finite-difference oracles."""
import argparse
import csv
import sys

import numpy as np

from collapsim import diffusion, doubling
from collapsim.diffusion import DiffusionParams, simulate
from collapsim.stats import wilson_interval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()

    grid = np.linspace(0, 1, args.points + 2)[1:-1]
    bvp = diffusion.bvp_hitting_probability(1001)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["x0", "mc_freq", "ci_low", "ci_high", "exact", "finite_difference"])
    for k, x0 in enumerate(grid):
        ends, _ = simulate(float(x0), args.trials, DiffusionParams(), args.seed + k)
        hits = int(np.count_nonzero(ends == 1))
        lo, hi = wilson_interval(hits, args.trials)
        out.writerow([f"{x0:.4f}", f"{hits / args.trials:.5f}", f"{lo:.5f}", f"{hi:.5f}",
                      f"{doubling.exact_hit_probability(float(x0)):.10f}",
                      f"{np.interp(x0, bvp[:, 0], bvp[:, 1]):.10f}"])


if __name__ == "__main__":
    main()
