"""GHZ extraction from linear cluster states: islands, two classifiers, census, counting.

A k-island is a maximal run of k consecutive B-vertices along the path
0 - 1 - ... - (n-1).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapabilityError, ContractError
from .gf2 import solve_rows
from .graphs import Bipartition, gamma_d_ints, path_graph

CENSUS_MAX_N = 20


@dataclass(frozen=True)
class IslandDecomposition:
    runs: tuple[tuple[int, int], ...]  # (start, length), sorted by start

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(length for _, length in self.runs)

    def signature(self) -> str:
        """Island sizes in path order joined by '-', e.g. '2-1-1-2'."""
        return "-".join(str(s) for s in self.sizes)


@dataclass(frozen=True)
class ClusterCensus:
    n: int
    s_count: int
    t_count: int
    configs: int
    inclusion_violations: int = 0  # in T but not in S
    island_violations: int = 0  # B has a k-island, k >= 3, yet the test passes

    @property
    def consistent(self) -> bool:
        return self.inclusion_violations == 0 and self.island_violations == 0

    @property
    def ratio(self) -> float:
        return self.t_count / self.s_count if self.s_count else float("nan")


def islands(bp: Bipartition) -> IslandDecomposition:
    runs = []
    start = None
    for v in range(bp.n + 1):
        in_b = v < bp.n and not (bp.a_mask >> v) & 1
        if in_b and start is None:
            start = v
        elif not in_b and start is not None:
            runs.append((start, v - start))
            start = None
    return IslandDecomposition(tuple(runs))


# Island-size sequences (path order) for which LC + LPM + CC extracts a GHZ state.
# "..." in the descriptions stands for zero or more 1-islands.
DEJONG_PATTERNS: tuple[tuple[str, str], ...] = (
    ("1-islands only", r"1(-1)*"),
    ("2-...-2, 2-..., or single 2", r"2(-1)*(-2)?"),
    ("...-2", r"1(-1)*-2"),
    ("B is one 3-island", r"3"),
)
_DEJONG_RE = [re.compile(rf"^{pat}$") for _, pat in DEJONG_PATTERNS]


def dejong_extractable(bp: Bipartition) -> bool:
    """Whether the island pattern of B admits GHZ extraction under LC + LPM + CC.

    The reading: 2-islands may appear only as the first and/or last island,
    every other island is a 1-island, or B is exactly one 3-island.  Empty B
    is never extractable.
    """
    sig = islands(bp).signature()
    return bool(sig) and any(r.match(sig) for r in _DEJONG_RE)


def _path_test(n: int, a_mask: int) -> bool:
    a = [v for v in range(n) if (a_mask >> v) & 1]
    b = [v for v in range(n) if not (a_mask >> v) & 1]
    adj = path_graph(n).adj
    rows, d = gamma_d_ints(adj, a, b)
    return solve_rows(rows, d, len(a)) is not None


def matrix_test_line(bp: Bipartition) -> bool:
    """True iff the matrix equation on the n-path is solvable (extraction not excluded)."""
    bp.require_even_b()
    return _path_test(bp.n, bp.a_mask)


def _census_chunk(n: int, start: int, stop: int) -> tuple[int, int, int, int, int]:
    adj = path_graph(n).adj
    s = t = configs = bad = big = 0
    for mask in range(start, stop):
        if (n - mask.bit_count()) % 2 or mask == (1 << n) - 1:
            continue
        configs += 1
        bp = Bipartition(n, mask)
        isl = islands(bp)
        in_s = not dejong_extractable(bp)
        rows, d = gamma_d_ints(adj, bp.a, bp.b)
        in_t = solve_rows(rows, d, bp.n_a) is None
        s += in_s
        t += in_t
        bad += in_t and not in_s
        big += (not in_t) and max(isl.sizes) >= 3
    return s, t, configs, bad, big


def census(n: int, workers: int = 1) -> ClusterCensus:
    """Count S_N (de Jong impossible) and T_N (matrix test impossible).

    Sweeps every configuration with nonempty A and nonempty even B, checking
    T_N within S_N and the k >= 3 island claim on every configuration.
    """
    if n > CENSUS_MAX_N:
        raise CapabilityError(f"census is exhaustive; n={n} > {CENSUS_MAX_N}")
    if n < 3:
        raise ContractError("need n >= 3 for nonempty A and nonempty even B")
    total = 1 << n
    if workers <= 1:
        parts = [_census_chunk(n, 1, total)]
    else:
        from concurrent.futures import ProcessPoolExecutor

        edges = [1 + (total - 1) * k // (4 * workers) for k in range(4 * workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_census_chunk, [n] * (len(edges) - 1), edges[:-1], edges[1:]))
    s, t, configs, bad, big = (sum(col) for col in zip(*parts))
    return ClusterCensus(n, s, t, configs, bad, big)


# -- counting ----------------------------------------------------------------------


def fibonacci(i: int) -> int:
    a, b = 0, 1
    for _ in range(i):
        a, b = b, a + b
    return a


def fib_f(n: int) -> int:
    """Subsets of an n-path with no two adjacent vertices: f(n) = f(n-1) + f(n-2)."""
    if n < 0:
        raise ContractError("n must be non-negative")
    prev, cur = 1, 2  # f(0), f(1)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, prev + cur
    return cur


def g_count(m: int) -> int:
    """g(m) = sum_{i=3}^{m-2} g(m-i) F_{i-2}, with g(2) = 1, g(3) = g(4) = 0."""
    if m < 2:
        raise ContractError("g is defined for m >= 2")
    g = {2: 1, 3: 0, 4: 0}
    for k in range(5, m + 1):
        g[k] = sum(g[k - i] * fibonacci(i - 2) for i in range(3, k - 1))
    return g[m]


def series_coefficients(num: Sequence[int], den: Sequence[int], count: int) -> list[Fraction]:
    """First ``count`` power-series coefficients of num(x)/den(x), exactly.

    Polynomials are coefficient lists, lowest degree first; den[0] != 0.
    """
    if not den or den[0] == 0:
        raise ContractError("denominator must have a nonzero constant term")
    c0 = Fraction(den[0])
    out: list[Fraction] = []
    for k in range(count):
        acc = Fraction(num[k]) if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / c0)
    return out


# x^2 (1 - x - x^2) / (1 - x - x^2 - x^3)
G_NUMERATOR = (0, 0, 1, -1, -1)
G_DENOMINATOR = (1, -1, -1, -1)


def g_series(count: int) -> list[Fraction]:
    return series_coefficients(G_NUMERATOR, G_DENOMINATOR, count)


def growth_constants(tol: float = 1e-12) -> tuple[float, float, float]:
    """(golden ratio, real root R of 1 - x - x^2 - x^3, 1/R)."""
    lo, hi = 0.0, 1.0  # the cubic is +1 at 0 and -2 at 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if 1 - mid - mid**2 - mid**3 > 0:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    return (1 + math.sqrt(5)) / 2, r, 1 / r


__all__ = [
    "ClusterCensus",
    "DEJONG_PATTERNS",
    "IslandDecomposition",
    "census",
    "dejong_extractable",
    "fib_f",
    "fibonacci",
    "g_count",
    "g_series",
    "growth_constants",
    "islands",
    "matrix_test_line",
    "series_coefficients",
]
