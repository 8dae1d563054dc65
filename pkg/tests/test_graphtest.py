from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entloc.errors import CapabilityError, ContractError, SourceExhaustedError
from entloc.graphs import Bipartition, EnsembleSpec, Graph, all_graphs, make_family, parse_graph6, write_graph6
from entloc.graphtest import (
    ea_graph_test,
    exact_expectations,
    isomorphism_classes,
    oracle_sweep,
    ps_approx,
    ps_bounds,
    ps_bounds_raw,
    ps_exact,
    ps_family_exact,
    ps_isomorphism_exact,
    ps_montecarlo,
    solve_witness,
)
from entloc.localization import ea
from entloc.quantum import build_graph_state


def atlas(n):
    return [Graph.from_edges(n, h.edges()) for h in nx.graph_atlas_g() if h.number_of_nodes() == n]


class TestMatrixTest:
    def test_path(self):
        assert ea_graph_test(make_family("path", 3), Bipartition.from_a(3, [0])) == 1

    def test_four_island(self):
        assert ea_graph_test(make_family("path", 6), Bipartition.from_a(6, [0, 1])) == 0

    def test_odd_b(self):
        with pytest.raises(ContractError):
            ea_graph_test(make_family("path", 4), Bipartition.from_a(4, [0]))

    def test_witness_solves(self):
        g = parse_graph6("Bw")
        ok, x = solve_witness(g, Bipartition(3, 0b001))
        assert ok == 1 and x == [0]

    def test_edgeless_regression(self):
        assert solve_witness(parse_graph6("D??"), Bipartition(5, 0b00001)) == (0, None)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 8), st.integers(0, 10**6))
    def test_against_dense_ea(self, n, seed):
        from entloc.graphs import random_bipartition, sample_uniform

        g_rng = np.random.default_rng(seed)
        g = sample_uniform(n, g_rng)
        bp = random_bipartition(n, g_rng)
        assert ea_graph_test(g, bp) == round(ea(build_graph_state(g), bp))

    def test_oracle_sweep_small(self):
        for n in (3, 4, 5):
            assert oracle_sweep(n)["ok"]


class TestExact:
    @pytest.mark.parametrize(
        "n, n_a, value",
        [(3, 1, Fraction(5, 8)), (4, 2, Fraction(25, 32)), (5, 1, Fraction(23, 128)),
         (5, 3, Fraction(113, 128)), (6, 2, Fraction(571, 2048)), (6, 4, Fraction(481, 512))],
    )
    def test_regression(self, n, n_a, value):
        assert ps_exact(n, n_a) == value

    def test_label_invariance(self):
        assert ps_exact(5, 3, a=[0, 2, 4]) == ps_exact(5, 3)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            ps_exact(7, 1)

    @pytest.mark.parametrize("n, n_a", [(3, 1), (4, 2), (5, 1), (5, 3)])
    def test_expectations(self, n, n_a):
        e = exact_expectations(n, n_a)
        assert e["mean_cross"] == pytest.approx(e["expected_cross"], abs=1e-12)
        assert e["mean_purity"] == pytest.approx(e["expected_purity"], abs=1e-12)

    def test_families(self):
        assert ps_family_exact(make_family("cycle", 6), 2) == Fraction(1, 5)
        assert ps_family_exact(make_family("path", 6), 2) == Fraction(1, 3)


class TestIsomorphism:
    def test_class_count_against_networkx(self):
        graphs = atlas(4)
        ours = sum(1 for _ in isomorphism_classes(graphs, 2, connected_only=False))
        reps = []
        for g in graphs:
            for a in __import__("itertools").combinations(range(4), 2):
                h = nx.Graph(g.edges())
                h.add_nodes_from(range(4))
                nx.set_node_attributes(h, {v: v in a for v in range(4)}, "a")
                if not any(nx.is_isomorphic(h, r, node_match=lambda x, y: x["a"] == y["a"]) for r in reps):
                    reps.append(h)
        assert ours == len(reps) == 28

    def test_regression(self):
        graphs = atlas(4)
        assert ps_isomorphism_exact(graphs, 2, connected_only=False) == Fraction(11, 14)
        assert ps_isomorphism_exact(graphs, 2, connected_only=True) == 1

    def test_streamed_montecarlo(self, tmp_path):
        p = tmp_path / "g5.g6"
        write_graph6(p, atlas(5))
        spec = EnsembleSpec("isomorphism-class", 5, 1, graph6_path=str(p), connected_only=True)
        res = ps_montecarlo(spec, 34, seed=0)
        assert res.trials + res.skipped == 34 and res.skipped == 34 - 21
        with pytest.raises(SourceExhaustedError):
            ps_montecarlo(spec, 35, seed=0)


class TestMonteCarlo:
    def test_standard_error(self):
        res = ps_montecarlo(EnsembleSpec("uniform", 6, 2), 400, seed=5)
        assert res.stderr == pytest.approx(np.sqrt(res.estimate * (1 - res.estimate) / 400))
        assert 0 <= res.estimate <= 1

    def test_agrees_with_exact(self):
        res = ps_montecarlo(EnsembleSpec("uniform", 6, 4), 4000, seed=1)
        assert abs(res.estimate - float(ps_exact(6, 4))) <= 4 * res.stderr

    def test_small_measured_set_never_succeeds(self):
        assert ps_montecarlo(EnsembleSpec("uniform", 25, 5), 1000, seed=3).estimate == 0.0

    def test_workers_identical(self):
        spec = EnsembleSpec("family", 12, 4, family="regular", k=3)
        assert ps_montecarlo(spec, 300, 2, workers=1) == ps_montecarlo(spec, 300, 2, workers=3)


class TestAnalytic:
    def test_approx(self):
        assert ps_approx(2**6, 2**4) == pytest.approx(65 / 79)
        assert ps_approx(2**20, 2**20) == pytest.approx(0.5, abs=1e-5)
        assert ps_approx(2**30, 4) == pytest.approx(1, abs=1e-8)
        assert ps_approx(4, 2**30) == pytest.approx(0, abs=1e-8)

    def test_degenerate_regression(self):
        lo, hi = ps_bounds_raw(2, 2, 0.5)
        assert lo == pytest.approx(0.2716049382716049, rel=1e-12)
        assert hi == pytest.approx(2.148148148148148, rel=1e-12)
        assert ps_bounds(2, 2, 0.5) == (lo, 1.0)

    @given(st.integers(1, 20), st.integers(1, 20), st.floats(0.01, 0.99))
    def test_ordered(self, ka, kb, r):
        lo, hi = ps_bounds(2**ka, 2**kb, r)
        assert lo <= hi

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.2])
    def test_r_range(self, r):
        with pytest.raises(ContractError):
            ps_bounds(4, 4, r)
