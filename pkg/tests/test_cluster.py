import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entloc.cluster import (
    DEJONG_PATTERNS,
    census,
    dejong_extractable,
    fib_f,
    fibonacci,
    g_count,
    g_series,
    growth_constants,
    islands,
    matrix_test_line,
)
from entloc.errors import CapabilityError, ContractError
from entloc.graphs import Bipartition, path_graph
from entloc.localization import ea
from entloc.quantum import build_graph_state


def brute_g(m: int) -> int:
    """Subsets of m path vertices whose islands all have size <= 2, opening and closing with 2-islands."""
    hits = 0
    for mask in range(1 << m):
        bp = Bipartition.from_b(m, [v for v in range(m) if (mask >> v) & 1])
        runs = islands(bp).runs
        if runs and all(ln <= 2 for _, ln in runs) and runs[0] == (0, 2) and runs[-1] == (m - 2, 2):
            hits += 1
    return hits


class TestIslands:
    def test_examples(self):
        assert islands(Bipartition.from_b(5, [1, 2, 4])).runs == ((1, 2), (4, 1))
        assert islands(Bipartition(6, 0)).runs == ((0, 6),)
        assert islands(Bipartition(6, 0b111111)).runs == ()

    @given(st.integers(1, 14), st.data())
    def test_invariants(self, n, data):
        bp = Bipartition(n, data.draw(st.integers(0, (1 << n) - 1)))
        runs = islands(bp).runs
        covered = [v for s, ln in runs for v in range(s, s + ln)]
        assert covered == list(bp.b)
        assert all(s2 > s1 + l1 for (s1, l1), (s2, _) in zip(runs, runs[1:]))


class TestDeJong:
    @pytest.mark.parametrize(
        "n, b, expected",
        [
            (9, [1, 3, 5, 7], True),
            (8, [2, 3, 4, 5], False),
            (7, [2, 3, 4], True),
            (8, [0, 1, 3, 6, 7], True),  # 2-1-2
            (8, [0, 1, 3, 5], True),  # 2-1-1
            (8, [1, 4, 6, 7], True),  # 1-1-2
            (9, [0, 2, 3, 5, 7, 8], False),  # interior 2-island
            (6, [1, 2], True),  # single 2-island
            (8, [0, 2, 3, 4], False),  # 3-island with company
        ],
    )
    def test_patterns(self, n, b, expected):
        assert dejong_extractable(Bipartition.from_b(n, b)) is expected

    def test_empty_b(self):
        assert not dejong_extractable(Bipartition(4, 0b1111))

    def test_table_exposed(self):
        assert len(DEJONG_PATTERNS) == 4


class TestMatrixLine:
    def test_examples(self):
        assert not matrix_test_line(Bipartition.from_a(6, [0, 1]))
        assert matrix_test_line(Bipartition.from_b(4, [1, 2]))
        assert matrix_test_line(Bipartition.from_b(6, [0, 1, 3, 5]))

    def test_odd(self):
        with pytest.raises(ContractError):
            matrix_test_line(Bipartition.from_b(5, [0, 1, 2]))

    def test_against_dense(self):
        for n in (4, 5, 6, 7):
            psi = build_graph_state(path_graph(n))
            for mask in range(1, (1 << n) - 1):
                bp = Bipartition(n, mask)
                if bp.n_b % 2 == 0:
                    assert matrix_test_line(bp) == (ea(psi, bp) > 0.5)


class TestCensus:
    # regression pins from the exhaustive sweep
    PINS = {
        4: (0, 0), 5: (4, 4), 6: (10, 10), 7: (27, 27), 8: (63, 58), 9: (148, 130),
        10: (332, 286), 11: (730, 617), 12: (1566, 1297), 13: (3311, 2724),
        14: (6913, 5696), 15: (14308, 11830), 16: (29400, 24424),
    }

    @pytest.mark.parametrize("n", range(4, 15))
    def test_pins_and_consistency(self, n):
        c = census(n)
        assert (c.s_count, c.t_count) == self.PINS[n]
        assert c.configs == 2 ** (n - 1) - 1 - (n % 2 == 0)
        assert c.consistent

    def test_n4_by_hand(self):
        # |B| = 2 only (|B| = 4 leaves A empty); every 2-subset of a 4-path is extractable
        c = census(4)
        assert (c.configs, c.s_count, c.t_count) == (6, 0, 0)

    def test_parallel_matches_serial(self):
        assert census(12, workers=3) == census(12)

    def test_limits(self):
        with pytest.raises(CapabilityError):
            census(21)
        with pytest.raises(ContractError):
            census(2)


class TestCounting:
    def test_f_examples(self):
        assert (fib_f(0), fib_f(1), fib_f(5)) == (1, 2, 13)

    def test_f_brute_force(self):
        for n in range(16):
            indep = sum(
                1 for m in range(1 << n) if m & (m >> 1) == 0
            )
            assert fib_f(n) == indep == fibonacci(n + 2)

    def test_g_examples(self):
        assert [g_count(m) for m in (2, 3, 4, 5)] == [1, 0, 0, 1]
        with pytest.raises(ContractError):
            g_count(1)

    def test_g_direct_enumeration(self):
        for m in range(2, 15):
            assert g_count(m) == brute_g(m)

    def test_g_series(self):
        coeffs = g_series(31)
        assert all(c.denominator == 1 for c in coeffs)
        assert [int(c) for c in coeffs[2:]] == [g_count(m) for m in range(2, 31)]

    def test_big_integers(self):
        assert fib_f(100) == fibonacci(102) > 2**64

    def test_growth(self):
        phi, r, a = growth_constants()
        assert phi == pytest.approx((1 + 5**0.5) / 2)
        assert abs(1 - r - r**2 - r**3) < 1e-11
        assert r == pytest.approx(0.54369, abs=1e-5) and a == pytest.approx(1.8393, abs=1e-4)
