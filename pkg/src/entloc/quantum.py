"""Dense statevector and density-matrix kernel.

Conventions
-----------
States are complex numpy arrays of length ``2**n``; density matrices are
``(d, d)`` arrays.  Qubit ordering is little-endian everywhere: qubit ``q``
is bit ``q`` of the basis index, and a reduced state on qubits
``q0 < q1 < ...`` uses ``q0`` as its least significant bit.

Most functions accept leading batch axes so whole ensembles can be pushed
through a single call.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapabilityError, ContractError
from .graphs import Bipartition, Graph

STATE_QUBIT_CAP = 14
DENSITY_QUBIT_CAP = 10

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-9
# Eigenvalues below this are treated as exact zeros; eigh leaves ~d * 1e-16 noise
# on null spaces, and its square root would otherwise leak ~1e-8 into fidelities.
EIG_FLOOR = 1e-13


def _nqubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ContractError(f"dimension {dim} is not a power of two")
    return n


@lru_cache(maxsize=32)
def _parity_signs(dim: int) -> np.ndarray:
    """(-1)**popcount(z) for z in range(dim); cached and read-only."""
    z = np.arange(dim, dtype=np.uint64)
    s = 1.0 - 2.0 * (np.bitwise_count(z) & 1)
    s.flags.writeable = False
    return s


# -- named states --------------------------------------------------------------


def basis_state(index: int, n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def ghz_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def w_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[[1 << q for q in range(n)]] = 1 / np.sqrt(n)
    return psi


def plus_state(n: int) -> np.ndarray:
    return np.full(1 << n, 2 ** (-n / 2), dtype=complex)


def product_state(*factors: np.ndarray) -> np.ndarray:
    """Tensor product with ``factors[0]`` on the lowest qubits."""
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(np.asarray(f, dtype=complex), out)
    return out


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    return psi[..., :, None] * psi[..., None, :].conj()


# -- graph states ----------------------------------------------------------------


def build_graph_state(g: Graph, cap: int = STATE_QUBIT_CAP) -> np.ndarray:
    """Amplitude of basis z is 2**(-n/2) * (-1)**(number of edges inside z)."""
    if g.n > cap:
        raise CapabilityError(f"{g.n} qubits exceeds the statevector cap of {cap}")
    z = np.arange(1 << g.n, dtype=np.int64)
    parity = np.zeros_like(z)
    for i, j in g.edges():
        parity ^= (z >> i) & (z >> j) & 1
    return (1.0 - 2.0 * parity) * 2 ** (-g.n / 2) + 0j


def graph_states_from_codes(n: int, codes: np.ndarray) -> np.ndarray:
    """Graph states for many graphs at once.

    ``codes`` holds one integer per graph whose bit k is the k-th vertex pair in
    graph6 order ((0,1), (0,2), (1,2), (0,3), ...).  Returns ``(len(codes), 2**n)``.
    """
    if n > STATE_QUBIT_CAP:
        raise CapabilityError(f"{n} qubits exceeds the statevector cap")
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    z = np.arange(1 << n, dtype=np.int64)
    both = np.stack([(z >> i) & (z >> j) & 1 for i, j in pairs], axis=1)  # (2^n, M)
    codes = np.asarray(codes, dtype=np.int64)
    edge_bits = (codes[:, None] >> np.arange(len(pairs))) & 1  # (G, M)
    parity = (edge_bits @ both.T) & 1
    return (1.0 - 2.0 * parity) * 2 ** (-n / 2) + 0j


# -- reduced states ----------------------------------------------------------------


def _split_matrix(psi: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Reshape states (..., 2**n) into (..., d_keep, d_rest) matrices.

    Both index groups are little-endian over their qubits in ascending order.
    """
    keep = sorted(keep)
    rest = [q for q in range(n) if q not in keep]
    batch = psi.shape[:-1]
    t = psi.reshape(batch + (2,) * n)
    nb = len(batch)
    # Axis nb + k holds qubit n-1-k; the most significant qubit must come first.
    axes = [nb + n - 1 - q for q in reversed(keep)] + [nb + n - 1 - q for q in reversed(rest)]
    t = np.transpose(t, tuple(range(nb)) + tuple(axes))
    return t.reshape(batch + (1 << len(keep), 1 << len(rest)))


def _as_qubits(keep, n: int) -> list[int]:
    if isinstance(keep, Bipartition):
        if keep.n != n:
            raise ContractError(f"bipartition over {keep.n} qubits, state has {n}")
        return list(keep.b)
    keep = sorted(set(int(q) for q in keep))
    if any(not 0 <= q < n for q in keep):
        raise ContractError(f"qubit index out of range for {n} qubits")
    return keep


def partial_trace(psi: np.ndarray, keep: Iterable[int] | Bipartition) -> np.ndarray:
    """Reduced density matrix on ``keep`` (or on the B side of a Bipartition)."""
    psi = np.asarray(psi, dtype=complex)
    n = _nqubits(psi.shape[-1])
    qubits = _as_qubits(keep, n)
    if not qubits:
        raise ContractError("keep must be nonempty")
    if len(qubits) > DENSITY_QUBIT_CAP:
        raise CapabilityError(f"{len(qubits)} kept qubits exceeds the density cap")
    m = _split_matrix(psi, qubits, n)
    return m @ np.swapaxes(m, -1, -2).conj()


# -- spin flip and n-tangle ----------------------------------------------------------


def spin_flip(x: np.ndarray) -> np.ndarray:
    """Complex-conjugate, then conjugate by sigma_y on every qubit.

    A 1-d array is a state; otherwise the last two axes are a density matrix.
    Uses sigma_y^{(x)n}|z> = i**n (-1)**h(z) |~z>, with ~z the bitwise complement.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        n = _nqubits(x.shape[0])
        return (1j**n) * (_parity_signs(x.shape[0]) * x.conj())[::-1]
    d = x.shape[-1]
    if x.shape[-2] != d:
        raise ContractError("density matrices must be square")
    _nqubits(d)
    s = _parity_signs(d)
    return (s[:, None] * s[None, :] * x.conj())[..., ::-1, ::-1]


def _flip_overlap(vecs: np.ndarray) -> np.ndarray:
    """|<v| flip(v)>| along the last axis, for unnormalized v; quadratic in v."""
    s = _parity_signs(vecs.shape[-1])
    return np.abs(np.sum(s * vecs * vecs[..., ::-1], axis=-1))


def n_tangle(psi: np.ndarray) -> float | np.ndarray:
    """tau(psi) = |<psi|flip(psi)>|, evaluated by complement-index pairing."""
    psi = np.asarray(psi, dtype=complex)
    _nqubits(psi.shape[-1])
    out = _flip_overlap(psi)
    return float(out) if out.ndim == 0 else out


# -- fidelity ------------------------------------------------------------------------


def check_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise ContractError(f"{name} is not a square matrix")
    _nqubits(rho.shape[-1])
    if np.max(np.abs(rho - np.swapaxes(rho, -1, -2).conj()), initial=0.0) > HERMITIAN_TOL:
        raise ContractError(f"{name} is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1), initial=0.0) > TRACE_TOL:
        raise ContractError(f"{name} does not have unit trace")
    if np.min(np.linalg.eigvalsh(rho), initial=0.0) < -NEG_EIG_TOL:
        raise ContractError(f"{name} has a negative eigenvalue below -{NEG_EIG_TOL}")
    return rho


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.where(w > EIG_FLOOR, w, 0.0)
    return (v * np.sqrt(w)[..., None, :]) @ np.swapaxes(v, -1, -2).conj()


def fidelity(rho: np.ndarray, sigma: np.ndarray, check: bool = True):
    """Square-root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Evaluated as the trace norm of sqrt(rho) sqrt(sigma), which equals the
    textbook form but stays at ~1e-16 for orthogonal supports instead of
    taking square roots of round-off.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ContractError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    if check:
        check_density(rho, "rho")
        check_density(sigma, "sigma")
    sv = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False)
    f = np.clip(sv.sum(axis=-1), 0.0, 1.0)
    return float(f) if f.ndim == 0 else f


def _tr_prod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ji->...", a, b)


def purity(rho: np.ndarray):
    val = _tr_prod(rho, rho).real
    return float(val) if val.ndim == 0 else val


def trace_ratio(rho: np.ndarray):
    """Tr[rho flip(rho)] / Tr[rho^2]; equals the fidelity value for graph-state marginals."""
    rho = np.asarray(rho, dtype=complex)
    num = _tr_prod(rho, spin_flip(rho))
    if np.max(np.abs(num.imag), initial=0.0) > 1e-10:
        raise ContractError("Tr[rho flip(rho)] has a non-negligible imaginary part")
    val = num.real / _tr_prod(rho, rho).real
    return float(val) if val.ndim == 0 else val


__all__ = [
    "basis_state",
    "build_graph_state",
    "check_density",
    "fidelity",
    "ghz_state",
    "graph_states_from_codes",
    "ket_to_dm",
    "n_tangle",
    "partial_trace",
    "plus_state",
    "product_state",
    "purity",
    "spin_flip",
    "trace_ratio",
    "w_state",
]
