"""Solution probability over the uniform graph ensemble against the (d_A+1)/(d_A+d_B-1) curve."""

import argparse
import csv
import sys

from entloc.graphs import EnsembleSpec
from entloc.graphtest import ps_approx, ps_montecarlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[10, 15, 20, 25])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "n_a", "p_hat", "stderr", "approx"])
    for n in args.n:
        for n_a in range(1, n):
            if (n - n_a) % 2:
                continue
            r = ps_montecarlo(EnsembleSpec("uniform", n, n_a), args.trials, args.seed)
            w.writerow([n, n_a, f"{r.estimate:.4f}", f"{r.stderr:.4f}", f"{ps_approx(2**n_a, 2**(n - n_a)):.4f}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
