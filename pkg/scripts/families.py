"""Solution probability for graph families and for the isomorphism-class ensemble.

Families are sampled with a uniformly random bipartition of the requested
size.  The isomorphism-class rows enumerate nonisomorphic graphs on n <= 6
vertices by brute-force canonical keys and count bipartition classes exactly.
"""

import argparse
import csv
import sys

from entloc.graphs import Bipartition, EnsembleSpec, all_graphs, canonical_bipartition_key
from entloc.graphtest import ps_approx, ps_isomorphism_exact, ps_montecarlo


def nonisomorphic(n):
    seen = {}
    for g in all_graphs(n):
        seen.setdefault(canonical_bipartition_key(g, Bipartition(n, 0)), g)
    return list(seen.values())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iso-n", type=int, nargs="*", default=[4, 5, 6])
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["ensemble", "n", "n_a", "p", "stderr", "approx"])
    families = [("path", None), ("cycle", None), ("complete", None), ("regular", 4)]
    for fam, k in families:
        for n_a in range(2, args.n, 2):
            spec = EnsembleSpec("family", args.n, n_a, family=fam, k=k)
            r = ps_montecarlo(spec, args.trials, args.seed)
            name = fam + (str(k) if k else "")
            w.writerow([name, args.n, n_a, f"{r.estimate:.4f}", f"{r.stderr:.4f}",
                        f"{ps_approx(2**n_a, 2**(args.n - n_a)):.4f}"])
            sys.stdout.flush()
    for n in args.iso_n:
        graphs = nonisomorphic(n)
        for n_a in range(1, n - 1):
            if (n - n_a) % 2:
                continue
            p = ps_isomorphism_exact(graphs, n_a, connected_only=True)
            w.writerow(["isomorphism-class", n, n_a, f"{float(p):.4f}", "0", f"{ps_approx(2**n_a, 2**(n - n_a)):.4f}"])


if __name__ == "__main__":
    main()
