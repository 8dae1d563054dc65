"""Mean EA and LE over Haar-random states as the measured register grows."""

import argparse
import csv
import sys

from entloc.localization import OptimizerConfig, haar_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--na", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6, 7, 8])
    ap.add_argument("--nb", type=int, default=2)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-le", action="store_true")
    ap.add_argument("--restarts", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = OptimizerConfig(restarts=args.restarts)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n_a", "n_b", "mean_ea", "std_ea", "mean_le", "std_le", "K", "ea_reference"])
    for n_a in args.na:
        r = haar_scan(n_a, args.nb, args.samples, args.seed, not args.no_le, cfg, args.workers)
        le_cols = ["", ""] if r.mean_le is None else [f"{r.mean_le:.4f}", f"{r.std_le:.4f}"]
        w.writerow([n_a, args.nb, f"{r.mean_ea:.4f}", f"{r.std_ea:.4f}", *le_cols, f"{r.k:.4f}", f"{r.ea_reference:.4f}"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
