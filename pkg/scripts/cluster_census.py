"""Exhaustive S_N / T_N census for linear cluster states, with the counting checks."""

import argparse
import csv
import sys
import time

from entloc.cluster import census, fib_f, g_count, g_series, growth_constants


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=18)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    phi, r, a = growth_constants()
    print(f"# phi={phi:.6f} R={r:.6f} a={a:.6f}", file=sys.stderr)
    series = g_series(args.n_max + 1)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "configs", "s_count", "t_count", "ratio", "f_n", "g_n", "g_series_ok", "consistent", "seconds"])
    for n in range(4, args.n_max + 1):
        t0 = time.perf_counter()
        c = census(n, workers=args.workers)
        w.writerow([n, c.configs, c.s_count, c.t_count, f"{c.ratio:.4f}", fib_f(n), g_count(n),
                    int(series[n] == g_count(n)), int(c.consistent), f"{time.perf_counter() - t0:.1f}"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
