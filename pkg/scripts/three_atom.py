"""Three-atom outcome frequencies from two merging particles, one row per merge rule."""
import argparse

from collapsim.multi_particle import MERGE_RULES, outcome_distribution_mc
from collapsim.stats import chi_square_test


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x1", type=float, default=0.2)
    ap.add_argument("--x2", type=float, default=0.7)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    expected = (args.x1, args.x2 - args.x1, 1 - args.x2)
    print("rule      " + "  ".join(f"{e:>8.4f}" for e in expected) + "   chi2 p")
    for rule in MERGE_RULES:
        rep = outcome_distribution_mc(args.x1, args.x2, args.trials,
                                      master_seed=args.seed, rule=rule)
        freqs = "  ".join(f"{rep.frequencies[k]:>8.4f}" for k in rep.labels)
        _, p = chi_square_test([rep.counts[k] for k in rep.labels], expected)
        print(f"{rule:<9} {freqs}   {p:.3f}")


if __name__ == "__main__":
    main()
