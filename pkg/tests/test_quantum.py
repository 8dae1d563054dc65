import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entloc.errors import CapabilityError, ContractError
from entloc.graphs import Bipartition, Graph, make_family, parse_graph6
from entloc.localization import haar_state
from entloc.quantum import (
    basis_state,
    build_graph_state,
    fidelity,
    ghz_state,
    graph_states_from_codes,
    ket_to_dm,
    n_tangle,
    partial_trace,
    plus_state,
    product_state,
    spin_flip,
    trace_ratio,
    w_state,
)

SY = np.array([[0, -1j], [1j, 0]])
KET0, KET1 = np.array([1, 0], complex), np.array([0, 1], complex)
PLUS = np.array([1, 1], complex) / np.sqrt(2)


def dense_flip(psi):
    """Reference: (sigma_y)^{(x)n} conj(psi) via explicit Kronecker products."""
    n = psi.size.bit_length() - 1
    op = np.ones((1, 1))
    for _ in range(n):
        op = np.kron(op, SY)
    return op @ psi.conj()


def dense_partial_trace(psi, keep, n):
    """Reference built from projections onto computational states of the traced qubits."""
    rest = [q for q in range(n) if q not in keep]
    d = 1 << len(keep)
    rho = np.zeros((d, d), complex)
    for r in range(1 << len(rest)):
        v = np.zeros(d, complex)
        for k in range(d):
            z = sum(((k >> i) & 1) << q for i, q in enumerate(keep))
            z |= sum(((r >> i) & 1) << q for i, q in enumerate(rest))
            v[k] = psi[z]
        rho += np.outer(v, v.conj())
    return rho


class TestGraphStates:
    def test_edgeless(self):
        assert np.allclose(build_graph_state(Graph.empty(2)), 0.5)

    def test_k2(self):
        assert np.allclose(build_graph_state(parse_graph6("A_")), np.array([1, 1, 1, -1]) / 2)

    def test_triangle_signs(self):
        psi = build_graph_state(parse_graph6("Bw"))
        for z in range(8):
            b = [(z >> q) & 1 for q in range(3)]
            sign = (-1) ** (b[0] * b[1] + b[0] * b[2] + b[1] * b[2])
            assert psi[z] == pytest.approx(sign / np.sqrt(8))

    def test_cz_construction(self, rng):
        g = make_family("regular", 6, rng=rng, k=3)
        psi = plus_state(6)
        z = np.arange(64)
        for i, j in g.edges():
            psi = psi * np.where(((z >> i) & (z >> j) & 1) == 1, -1, 1)
        assert np.allclose(build_graph_state(g), psi)

    def test_batched_matches_single(self):
        codes = np.arange(64)
        from entloc.graphs import all_graphs

        ref = np.array([build_graph_state(g) for g in all_graphs(4)])
        assert np.allclose(graph_states_from_codes(4, codes), ref)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            build_graph_state(Graph.empty(15))


class TestPartialTrace:
    def test_product(self):
        psi = product_state(KET0, PLUS)  # qubit 0 = A in |0>, qubit 1 = B in |+>
        rho = partial_trace(psi, Bipartition.from_a(2, [0]))
        assert np.allclose(rho, ket_to_dm(PLUS))

    def test_bell(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert np.allclose(partial_trace(bell, [1]), np.eye(2) / 2)

    def test_ghz3(self):
        rho = partial_trace(ghz_state(3), [0, 1])
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 0.5
        assert np.allclose(rho, expected)

    @settings(max_examples=40)
    @given(st.integers(2, 6), st.data())
    def test_against_reference(self, n, data):
        keep = sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=1)))
        psi = haar_state(n, np.random.default_rng(data.draw(st.integers(0, 10**6))))
        assert np.allclose(partial_trace(psi, keep), dense_partial_trace(psi, keep, n))

    def test_little_endian_ordering(self):
        # qubit 0 in |1>, qubit 2 in |0>, qubit 1 in |+>; keeping (0, 2) gives |01> little-endian = index 1
        psi = product_state(KET1, PLUS, KET0)
        rho = partial_trace(psi, [0, 2])
        assert rho[1, 1] == pytest.approx(1)


class TestSpinFlip:
    def test_single_qubit(self):
        assert np.allclose(spin_flip(KET0), 1j * KET1)
        assert np.allclose(spin_flip(ket_to_dm(KET0)), ket_to_dm(KET1))

    def test_bell(self):
        phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert np.allclose(spin_flip(phi), -phi)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_identity(self, k):
        d = 2**k
        assert np.allclose(spin_flip(np.eye(d) / d), np.eye(d) / d)

    @given(st.integers(1, 6), st.integers(0, 10**6))
    def test_against_kron(self, n, seed):
        psi = haar_state(n, np.random.default_rng(seed))
        assert np.allclose(spin_flip(psi), dense_flip(psi))
        rho = ket_to_dm(psi)
        flipped = ket_to_dm(dense_flip(psi))
        assert np.allclose(spin_flip(rho), flipped)


class TestTangle:
    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_ghz(self, n):
        assert n_tangle(ghz_state(n)) == pytest.approx(1)

    def test_w(self):
        assert n_tangle(w_state(4)) == pytest.approx(0, abs=1e-15)

    def test_product_zero(self):
        assert n_tangle(basis_state(0, 2)) == 0

    @given(st.integers(1, 7), st.integers(0, 10**6))
    def test_definition_and_range(self, n, seed):
        psi = haar_state(n, np.random.default_rng(seed))
        tau = n_tangle(psi)
        assert tau == pytest.approx(abs(np.vdot(psi, dense_flip(psi))), abs=1e-12)
        assert 0 <= tau <= 1 + 1e-12


class TestFidelity:
    def test_self(self, rng):
        rho = partial_trace(haar_state(4, rng), [0, 1])
        assert fidelity(rho, rho) == pytest.approx(1, abs=1e-9)

    def test_orthogonal(self):
        assert fidelity(ket_to_dm(KET0), ket_to_dm(KET1)) == pytest.approx(0, abs=1e-15)

    def test_pure_vs_mixed(self):
        assert fidelity(ket_to_dm(KET0), np.eye(2) / 2) == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    @given(st.integers(0, 10**6))
    def test_matches_textbook_form(self, seed):
        from scipy.linalg import sqrtm

        g = np.random.default_rng(seed)
        rho = partial_trace(haar_state(4, g), [0, 1])
        sigma = partial_trace(haar_state(4, g), [2, 3])
        s = sqrtm(rho)
        ref = np.trace(sqrtm(s @ sigma @ s)).real
        assert fidelity(rho, sigma) == pytest.approx(ref, abs=1e-7)

    def test_contracts(self):
        with pytest.raises(ContractError):
            fidelity(np.eye(2) / 2, np.eye(4) / 4)
        with pytest.raises(ContractError):
            fidelity(np.eye(2), np.eye(2) / 2)
        with pytest.raises(ContractError):
            fidelity(np.array([[0.5, 0.5], [0, 0.5]]), np.eye(2) / 2)


class TestTraceRatio:
    def test_k2_marginal(self):
        rho = partial_trace(build_graph_state(parse_graph6("A_")), [1])
        assert trace_ratio(rho) == pytest.approx(1)

    def test_pure_zero(self):
        assert trace_ratio(ket_to_dm(basis_state(0, 2))) == pytest.approx(0)


class TestInvariants:
    @given(st.integers(1, 4), st.integers(0, 10**6))
    def test_flip_involution(self, k, seed):
        psi = haar_state(k + 1, np.random.default_rng(seed))
        rho = partial_trace(psi, range(k))
        assert np.allclose(spin_flip(spin_flip(rho)), rho, atol=1e-12)

    @given(st.integers(1, 6), st.floats(0, 2 * np.pi), st.integers(0, 10**6))
    def test_tangle_phase_invariant(self, n, theta, seed):
        psi = haar_state(n, np.random.default_rng(seed))
        assert n_tangle(np.exp(1j * theta) * psi) == pytest.approx(n_tangle(psi), abs=1e-12)

    @given(st.integers(1, 4), st.integers(0, 10**6))
    def test_fidelity_symmetric(self, k, seed):
        g = np.random.default_rng(seed)
        rho = partial_trace(haar_state(k + 2, g), range(k))
        sigma = partial_trace(haar_state(k + 1, g), range(k))
        assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-10)

    def test_trace_ratio_dichotomy_small(self):
        from entloc.graphs import all_graphs, bipartitions

        for n in (3, 4):
            for g in all_graphs(n):
                psi = build_graph_state(g)
                for bp in bipartitions(n):
                    r = trace_ratio(partial_trace(psi, bp))
                    assert min(abs(r), abs(r - 1)) < 1e-9
