"""Command-line experiment runner.

Every subcommand writes a table (CSV by default, JSON with ``--format json``)
to stdout or to ``--out``; with ``--out`` a ``<out>.manifest.json`` run
manifest is written next to it, and ``entloc rerun <manifest>`` repeats the run.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .cluster import census, fib_f, fibonacci, g_count, g_series
from .errors import CapabilityError, ContractError, Graph6ParseError, SourceExhaustedError
from .graphs import Bipartition, EnsembleSpec, parse_graph6
from .graphtest import (
    exact_expectations,
    oracle_sweep,
    ps_approx,
    ps_bounds,
    ps_montecarlo,
    solve_witness,
)
from .localization import OptimizerConfig, haar_scan
from .quantum import build_graph_state, ghz_state, n_tangle, w_state

log = logging.getLogger("entloc")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "ENTLOC_SEED"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    seed: Optional[int]
    version: str = __version__
    duration_s: float = 0.0
    argv: list = field(default_factory=list)


# -- formatting ------------------------------------------------------------------------


def fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def render(rows: list[dict], form: str) -> str:
    if form == "json":
        return json.dumps(rows, indent=2, default=float) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rows[0].keys())
        for r in rows:
            w.writerow(fmt(v) for v in r.values())
    return buf.getvalue()


# -- argument helpers ------------------------------------------------------------------


def int_list(text: str) -> list[int]:
    """'2,4,6' or '8-16' or '2-8:2'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            rng, _, step = part.partition(":")
            lo, hi = rng.split("-")
            out.extend(range(int(lo), int(hi) + 1, int(step or 1)))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def parse_state_spec(spec: str) -> np.ndarray:
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise UsageError(f"state spec {spec!r} must look like kind:arg")
    if kind in ("ghz", "w"):
        try:
            n = int(arg)
        except ValueError:
            raise UsageError(f"bad qubit count in {spec!r}") from None
        if n < 1:
            raise UsageError("need at least one qubit")
        return ghz_state(n) if kind == "ghz" else w_state(n)
    if kind == "graph6":
        return build_graph_state(parse_graph6(arg))
    if kind == "file":
        return read_state_file(arg)
    raise UsageError(f"unknown state kind {kind!r}; use ghz, w, graph6 or file")


def read_state_file(path: str) -> np.ndarray:
    """First line n, then 2**n lines 're im' in basis-index order."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    try:
        n = int(lines[0])
        amps = [complex(float(re_), float(im)) for re_, im in (ln.split() for ln in lines[1:])]
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: malformed state file ({exc})") from None
    if len(amps) != 1 << n:
        raise UsageError(f"{path}: expected {1 << n} amplitudes, found {len(amps)}")
    psi = np.array(amps)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-8:
        raise UsageError(f"{path}: state has norm {norm:.6g}")
    return psi


def parse_ensemble(text: str) -> tuple[str, Optional[str], Optional[int]]:
    """'uniform', 'isomorphism-class', 'family:path', 'family:regular4'."""
    if text in ("uniform", "isomorphism-class"):
        return text, None, None
    kind, _, fam = text.partition(":")
    if kind != "family" or not fam:
        raise UsageError(f"unknown ensemble {text!r}")
    if fam.startswith("regular"):
        digits = fam[len("regular"):]
        if not digits.isdigit():
            raise UsageError("regular family needs a degree, e.g. family:regular4")
        return "family", "regular", int(digits)
    return "family", fam, None


# -- subcommands -----------------------------------------------------------------------


def cmd_tangle(a) -> tuple[list[dict], int]:
    psi = parse_state_spec(a.state)
    return [{"state": a.state, "n": int(psi.size).bit_length() - 1, "tau": n_tangle(psi)}], EXIT_OK


def cmd_test_graph(a) -> tuple[list[dict], int]:
    g = parse_graph6(a.graph6)
    bp = Bipartition(g.n, a.a_mask)
    if bp.n_a == 0 or bp.n_b == 0:
        raise UsageError("A and B must both be nonempty")
    if bp.n_b % 2:
        raise UsageError(
            f"|B| = {bp.n_b} is odd: the n-tangle vanishes identically on an odd number of qubits, "
            "so the test only applies to even |B|"
        )
    outcome, x = solve_witness(g, bp)
    witness = "" if x is None else "".join(str(b) for b in x)
    return [{"graph6": a.graph6, "n": g.n, "a_mask": a.a_mask, "outcome": outcome, "witness": witness}], EXIT_OK


def cmd_ps(a) -> tuple[list[dict], int]:
    kind, family, k = parse_ensemble(a.ensemble)
    rows = []
    for n in a.n:
        for n_a in a.na or [None]:
            spec = EnsembleSpec(kind, n, n_a, family, k, a.graph6_file, a.connected_only)
            res = ps_montecarlo(spec, a.trials, a.seed, workers=a.workers)
            row = {"n": n, "n_a": n_a, "trials": res.trials, "successes": res.successes, "skipped": res.skipped,
                   "p_hat": res.estimate, "stderr": res.stderr, "approx": None, "lower": None, "upper": None}
            if n_a is not None:
                d_a, d_b = 2**n_a, 2 ** (n - n_a)
                row["approx"] = ps_approx(d_a, d_b)
                row["lower"], row["upper"] = ps_bounds(d_a, d_b, a.r)
            rows.append(row)
    return rows, EXIT_OK


def cmd_haar_scan(a) -> tuple[list[dict], int]:
    cfg = OptimizerConfig(restarts=a.restarts, max_evals=a.max_evals)
    rows = []
    for n_a in a.na_range:
        r = haar_scan(n_a, a.nb, a.samples, a.seed, with_le=a.with_le, cfg=cfg, workers=a.workers)
        rows.append({"n_a": r.n_a, "n_b": r.n_b, "samples": r.samples, "mean_ea": r.mean_ea, "std_ea": r.std_ea,
                     "mean_le": r.mean_le, "std_le": r.std_le, "K": r.k, "ea_reference": r.ea_reference})
    return rows, EXIT_OK


def cmd_cluster(a) -> tuple[list[dict], int]:
    rows = []
    status = EXIT_OK
    series = g_series(max(a.n_range) + 1)
    for n in a.n_range:
        c = census(n, workers=a.workers)
        f_ok = fib_f(n) == fibonacci(n + 2)
        g_ok = g_count(n) == series[n]
        rows.append({"n": n, "configs": c.configs, "s_count": c.s_count, "t_count": c.t_count, "ratio": c.ratio,
                     "f_n": fib_f(n), "f_is_fib": f_ok, "g_m": g_count(n), "g_matches_series": g_ok,
                     "t_subset_s": c.consistent})
        if not (f_ok and g_ok and c.consistent):
            status = EXIT_VERIFY
    return rows, status


VERIFY_POINTS = ((3, 1), (4, 2), (5, 1), (5, 3))


def cmd_verify(a) -> tuple[list[dict], int]:
    rows = []
    for n in range(3, a.max_n + 1):
        r = oracle_sweep(n)
        rows.append({"check": "oracle", "params": f"n={n}", "ok": r["ok"],
                     "detail": f"checked={r['checked']} mismatches={r['mismatches']} worst_gap={r['worst_gap']:.3g}"})
    for n, n_a in VERIFY_POINTS:
        e = exact_expectations(n, n_a)
        gap = max(abs(e["mean_cross"] - e["expected_cross"]), abs(e["mean_purity"] - e["expected_purity"]))
        rows.append({"check": "expectation", "params": f"n={n} n_a={n_a}", "ok": gap <= 1e-12, "detail": f"gap={gap:.3g}"})
    return rows, EXIT_OK if all(r["ok"] for r in rows) else EXIT_VERIFY


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write the table here and a manifest to <out>.manifest.json")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker processes (results do not depend on this)")
    common.add_argument("-v", "--verbose", action="store_true")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")

    p = argparse.ArgumentParser(prog="entloc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"entloc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("tangle", parents=[common], help="n-tangle of a state")
    s.add_argument("state", help="ghz:N, w:N, graph6:<code> or file:<path>")
    s.set_defaults(func=cmd_tangle)

    s = sub.add_parser("test-graph", parents=[common], help="GF(2) matrix-equation test with witness")
    s.add_argument("graph6")
    s.add_argument("a_mask", type=lambda t: int(t, 0), help="bit v set means vertex v (0-indexed) is in A")
    s.set_defaults(func=cmd_test_graph)

    s = sub.add_parser("ps", parents=[common, seeded], help="Monte Carlo solution probability")
    s.add_argument("--ensemble", default="uniform", help="uniform, isomorphism-class, family:<path|cycle|complete|regularK>")
    s.add_argument("--n", type=int_list, required=True)
    s.add_argument("--na", type=int_list)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--r", type=float, default=0.5, help="r for the analytic bounds")
    s.add_argument("--connected-only", action="store_true")
    s.add_argument("--graph6-file")
    s.set_defaults(func=cmd_ps)

    s = sub.add_parser("haar-scan", parents=[common, seeded], help="EA and LE over Haar-random states")
    s.add_argument("--na-range", type=int_list, required=True)
    s.add_argument("--nb", type=int, default=2)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--with-le", action="store_true")
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--max-evals", type=int, default=2000)
    s.set_defaults(func=cmd_haar_scan)

    s = sub.add_parser("cluster", parents=[common], help="linear-cluster census and counting checks")
    s.add_argument("--n-range", type=int_list, default=int_list("4-16"))
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("verify", parents=[common], help="oracle equivalence and exact expectations")
    s.add_argument("--max-n", type=int, default=6)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("rerun", help="repeat a run from its manifest")
    s.add_argument("manifest")
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    return p


def _run(argv: list[str], parser: argparse.ArgumentParser) -> int:
    a = parser.parse_args(argv)
    if a.command == "rerun":
        try:
            m = json.loads(Path(a.manifest).read_text())
            replay = list(m["argv"])
        except (OSError, ValueError, KeyError) as exc:
            print(f"entloc: cannot read manifest: {exc}", file=sys.stderr)
            return EXIT_IO
        replay = _strip_opt(replay, "--out")
        if a.out:
            replay += ["--out", a.out]
        if a.workers:
            replay = _strip_opt(replay, "--workers") + ["--workers", str(a.workers)]
        return _run(replay, parser)

    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if a.workers < 1:
        raise UsageError("--workers must be >= 1")
    if hasattr(a, "seed"):
        a.seed = resolve_seed(a.seed)
    t0 = time.perf_counter()
    rows, status = a.func(a)
    text = render(rows, a.format)
    if a.out is None:
        sys.stdout.write(text)
        return status
    params = {k: v for k, v in vars(a).items() if k not in ("func", "out", "verbose")}
    norm_argv = _strip_opt(list(argv), "--seed") + (["--seed", str(a.seed)] if hasattr(a, "seed") else [])
    manifest = RunManifest(a.command, params, getattr(a, "seed", None),
                           duration_s=time.perf_counter() - t0, argv=_strip_opt(norm_argv, "--out"))
    out = Path(a.out)
    out.write_text(text)
    Path(f"{out}.manifest.json").write_text(json.dumps(asdict(manifest), indent=2, default=str) + "\n")
    return status


def _strip_opt(argv: list[str], opt: str) -> list[str]:
    """Drop ``opt VALUE`` and ``opt=VALUE`` occurrences."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == opt:
            skip = True
        elif not tok.startswith(opt + "="):
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv, parser)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for bad flags
        return int(exc.code or 0)
    except (UsageError, ContractError, CapabilityError, Graph6ParseError) as exc:
        print(f"entloc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, SourceExhaustedError) as exc:
        print(f"entloc: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
