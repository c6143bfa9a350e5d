"""Mean absorption time against fluctuation intensity; t * I should stay flat."""
import argparse

from collapsim.experiments import check_intensity_scaling, run_casimir_sweep, sweep_rows, two_atom_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x0", type=float, default=0.5)
    ap.add_argument("--intensities", default="0.25,0.5,1,2,4")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = two_atom_config(args.x0, n_trials=args.trials, master_seed=args.seed)
    reports = run_casimir_sweep(base, [float(s) for s in args.intensities.split(",")])
    print(f"{'I':>6} {'mean t':>9} {'stderr':>8} {'t*I':>7} {'hit1':>7}")
    for row in sweep_rows(reports):
        print(f"{row['intensity']:>6g} {row['mean_time']:>9.4f} {row['stderr']:>8.4f} "
              f"{row['mean_time'] * row['intensity']:>7.4f} {row['hit1_freq']:>7.4f}")
    check = check_intensity_scaling(reports)
    print(f"monotone: {check['monotone']}  inverse scaling within 5%: {check['inverse_scaling']}")


if __name__ == "__main__":
    main()
