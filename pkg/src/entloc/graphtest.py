"""Matrix-equation test and solution-probability estimators for graph-state ensembles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import CapabilityError, ContractError, SourceExhaustedError
from .gf2 import gf2_solve, solve_rows
from .graphs import (
    Bipartition,
    EnsembleSpec,
    Graph,
    all_graphs,
    bipartitions,
    canonical_bipartition_key,
    connected,
    gamma_and_d,
    gamma_d_ints,
    make_family,
    random_bipartition,
    read_graph6,
    sample_uniform,
)
from .quantum import graph_states_from_codes, partial_trace, purity, spin_flip, _tr_prod

PS_EXACT_MAX_N = 6


def ea_graph_test(g: Graph, bp: Bipartition) -> int:
    """1 iff Gamma_BA x = D is solvable over GF(2), i.e. the graph state has EA 1."""
    if bp.n != g.n:
        raise ContractError("bipartition and graph sizes differ")
    bp.require_even_b()
    gamma, d = gamma_and_d(g, bp)
    return int(gf2_solve(gamma, d) is not None)


def solve_witness(g: Graph, bp: Bipartition):
    """(outcome, witness) where witness is the list of x bits or None."""
    bp.require_even_b()
    gamma, d = gamma_and_d(g, bp)
    x = gf2_solve(gamma, d)
    return (0, None) if x is None else (1, x.bits())


def _fast_test(adj, a, b) -> bool:
    rows, d = gamma_d_ints(adj, a, b)
    return solve_rows(rows, d, len(a)) is not None


# -- exact enumeration -------------------------------------------------------------------


def ps_exact(n: int, n_a: int, a: Optional[Iterable[int]] = None) -> Fraction:
    """Exact fraction of all labelled graphs on n vertices that pass the test.

    The uniform edge measure is invariant under relabelling vertices, so the
    answer depends only on (n, n_a); A defaults to the first n_a vertices.
    """
    if n > PS_EXACT_MAX_N:
        raise CapabilityError(f"exact enumeration is capped at n={PS_EXACT_MAX_N}")
    a = tuple(range(n_a)) if a is None else tuple(sorted(a))
    if len(a) != n_a or not 1 <= n_a < n:
        raise ContractError("need 1 <= n_a < n and |a| = n_a")
    if (n - n_a) % 2:
        raise ContractError(f"|B| = {n - n_a} is odd")
    b = tuple(v for v in range(n) if v not in a)
    hits = sum(_fast_test(g.adj, a, b) for g in all_graphs(n))
    return Fraction(hits, 1 << (n * (n - 1) // 2))


def exact_expectations(n: int, n_a: int) -> dict:
    """Means of Tr[G_B flip(G_B)] and Tr[G_B^2] over all graphs, with closed forms."""
    if n > PS_EXACT_MAX_N:
        raise CapabilityError(f"exact enumeration is capped at n={PS_EXACT_MAX_N}")
    bp = Bipartition.from_a(n, range(n_a))
    codes = np.arange(1 << (n * (n - 1) // 2))
    rho = partial_trace(graph_states_from_codes(n, codes), bp)
    cross = _tr_prod(rho, spin_flip(rho)).real
    pur = purity(rho)
    d_a, d_b = 2**n_a, 2 ** (n - n_a)
    return {
        "n": n,
        "n_a": n_a,
        "mean_cross": float(np.mean(cross)),
        "expected_cross": (d_a + 1) / (d_a * d_b),
        "mean_purity": float(np.mean(pur)),
        "expected_purity": (d_a + d_b - 1) / (d_a * d_b),
    }


def ps_family_exact(g: Graph, n_a: int) -> Fraction:
    """Fraction of all bipartitions with |A| = n_a of one fixed graph that pass."""
    if (g.n - n_a) % 2:
        raise ContractError(f"|B| = {g.n - n_a} is odd")
    hits = total = 0
    for bp in bipartitions(g.n, n_a):
        hits += _fast_test(g.adj, bp.a, bp.b)
        total += 1
    return Fraction(hits, total)


def isomorphism_classes(
    graphs: Iterable[Graph], n_a: int, connected_only: bool = True
) -> Iterator[tuple[Graph, Bipartition]]:
    """One representative per bipartition-isomorphism class with |A| = n_a.

    Keys are only compared within a graph: nonisomorphic graphs never share
    bipartition classes, so the input must list each isomorphism class once.
    """
    for g in graphs:
        if connected_only and not connected(g):
            continue
        seen = set()
        for bp in bipartitions(g.n, n_a):
            key = canonical_bipartition_key(g, bp)
            if key not in seen:
                seen.add(key)
                yield g, bp


def ps_isomorphism_exact(graphs: Iterable[Graph], n_a: int, connected_only: bool = True) -> Fraction:
    """Solution probability with every bipartitioned-graph class weighted equally."""
    hits = total = 0
    for g, bp in isomorphism_classes(graphs, n_a, connected_only):
        hits += _fast_test(g.adj, bp.a, bp.b)
        total += 1
    if total == 0:
        raise ContractError("no bipartition classes in the input")
    return Fraction(hits, total)


# -- Monte Carlo ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    trials: int
    stderr: float
    seed: int
    ensemble: EnsembleSpec
    successes: int = 0
    skipped: int = 0

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "trials": self.trials,
            "successes": self.successes,
            "stderr": self.stderr,
            "seed": self.seed,
            "skipped": self.skipped,
            "ensemble": self.ensemble.as_dict(),
        }


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one trial; depends only on (seed, index)."""
    return np.random.default_rng([seed, index])


def _uniform_or_family_trial(spec: EnsembleSpec, seed: int, index: int) -> Optional[bool]:
    rng = trial_rng(seed, index)
    if spec.kind == "uniform":
        g = sample_uniform(spec.n, rng)
        bp = Bipartition.from_a(spec.n, range(spec.n_a))
    else:
        g = make_family(spec.family, spec.n, rng=rng, k=spec.k)
        bp = random_bipartition(spec.n, rng, spec.n_a)
    if spec.connected_only and not connected(g):
        return None
    return _fast_test(g.adj, bp.a, bp.b)


def _run_trials(spec: EnsembleSpec, trials: int, seed: int, workers: int) -> list[Optional[bool]]:
    if workers <= 1:
        return [_uniform_or_family_trial(spec, seed, i) for i in range(trials)]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, trials // (4 * workers))
        return list(
            pool.map(
                _uniform_or_family_trial,
                itertools.repeat(spec, trials),
                itertools.repeat(seed, trials),
                range(trials),
                chunksize=chunk,
            )
        )


def _isomorphism_trials(spec: EnsembleSpec, trials: int, seed: int) -> list[Optional[bool]]:
    """One random bipartition per streamed nonisomorphic graph record."""
    out: list[Optional[bool]] = []
    for index, g in enumerate(read_graph6(spec.graph6_path)):
        if len(out) == trials:
            break
        if g.n != spec.n:
            raise ContractError(f"record {index} has {g.n} vertices, expected {spec.n}")
        rng = trial_rng(seed, index)
        if spec.connected_only and not connected(g):
            out.append(None)
            continue
        bp = random_bipartition(spec.n, rng, spec.n_a)
        out.append(_fast_test(g.adj, bp.a, bp.b))
    if len(out) < trials:
        raise SourceExhaustedError(
            f"{spec.graph6_path} holds {len(out)} records, {trials} trials requested"
        )
    return out


def ps_montecarlo(spec: EnsembleSpec, trials: int, seed: int, workers: int = 1) -> EstimateResult:
    """Fraction of sampled bipartitioned graphs that pass, with binomial standard error.

    Trials filtered out by ``connected_only`` are counted in ``skipped`` and do
    not enter the estimate.
    """
    if trials < 1:
        raise ContractError("need at least one trial")
    if spec.kind == "isomorphism-class":
        outcomes = _isomorphism_trials(spec, trials, seed)
    else:
        outcomes = _run_trials(spec, trials, seed, workers)
    kept = [o for o in outcomes if o is not None]
    used = len(kept)
    hits = sum(kept)
    p = hits / used if used else float("nan")
    se = math.sqrt(p * (1 - p) / used) if used else float("nan")
    return EstimateResult(p, used, se, seed, spec, successes=hits, skipped=len(outcomes) - used)


# -- analytic approximation and bounds -----------------------------------------------------------


def ps_approx(d_a: int, d_b: int) -> float:
    """(d_A + 1) / (d_A + d_B - 1)."""
    return (d_a + 1) / (d_a + d_b - 1)


def ps_bounds_raw(d_a: int, d_b: int, r: float) -> tuple[float, float]:
    """Unclamped lower and upper bounds."""
    if not 0 < r < 1:
        raise ContractError(f"r={r} must lie in (0, 1)")
    s = d_a + d_b - 1
    eps1 = d_a * d_b * (d_a - 1) * (d_b - 1) / (r**2 * (1 + r) * s**3)
    eps2 = (d_a - 1) * (d_b - 1) / (r**2 * s**3)
    lower = (d_a + 1) / ((1 + r) * s) - eps1
    upper = (d_a + 1) / ((1 - r) * s) + eps2
    return lower, upper


def ps_bounds(d_a: int, d_b: int, r: float) -> tuple[float, float]:
    lower, upper = ps_bounds_raw(d_a, d_b, r)
    return max(0.0, lower), min(1.0, upper)


def ps_bounds_contain(value: float, d_a: int, d_b: int, grid=None) -> list[float]:
    """Grid values of r whose (clamped) bounds contain ``value``."""
    grid = [k / 10 for k in range(1, 10)] if grid is None else grid
    hits = []
    for r in grid:
        lo, hi = ps_bounds(d_a, d_b, r)
        if lo <= value <= hi:
            hits.append(r)
    return hits


# -- dense oracle -----------------------------------------------------------------------


def oracle_sweep(n: int, tol: float = 1e-9) -> dict:
    """Compare the GF(2) test with the dense fidelity for every graph and even-B bipartition.

    Returns counts plus the worst distance of a dense value from {0, 1}.
    """
    from .quantum import fidelity

    codes = np.arange(1 << (n * (n - 1) // 2))
    states = graph_states_from_codes(n, codes)
    graphs = list(all_graphs(n))
    checked = mismatches = 0
    worst = 0.0
    for bp in bipartitions(n):
        if bp.n_b < 2:
            continue
        rho = partial_trace(states, bp)
        dense = np.asarray(fidelity(rho, spin_flip(rho)))
        ratio = np.asarray(_tr_prod(rho, spin_flip(rho)).real / purity(rho))
        worst = max(worst, float(np.max(np.minimum(np.abs(dense), np.abs(dense - 1)))))
        a, b = bp.a, bp.b
        gf2 = np.array([_fast_test(g.adj, a, b) for g in graphs])
        mismatches += int(np.sum(gf2 != (dense > 0.5)))
        mismatches += int(np.sum(np.abs(ratio - dense) > tol))
        checked += len(graphs)
    return {"n": n, "checked": checked, "mismatches": mismatches, "worst_gap": worst, "ok": mismatches == 0 and worst <= tol}


__all__ = [
    "EstimateResult",
    "ea_graph_test",
    "exact_expectations",
    "isomorphism_classes",
    "oracle_sweep",
    "ps_approx",
    "ps_bounds",
    "ps_bounds_contain",
    "ps_bounds_raw",
    "ps_exact",
    "ps_family_exact",
    "ps_isomorphism_exact",
    "ps_montecarlo",
    "solve_witness",
]
