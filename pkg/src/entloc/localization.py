"""Entanglement of assistance (EA) and localizable entanglement (LE).

A measurement on A in an ordered basis {phi_i} leaves unnormalized branches
P_i = (<phi_i| (x) I_B)|Psi> on B.  The branch contribution p_i * tau(M_i) is
|<P_i| flip(P_i)>|, so the average post-measurement tangle of a basis is a
sum of flip overlaps of the branch vectors and needs no normalization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .errors import ContractError
from .graphs import Bipartition
from .quantum import (
    STATE_QUBIT_CAP,
    _flip_overlap,
    _nqubits,
    _split_matrix,
    fidelity,
    partial_trace,
    spin_flip,
)

log = logging.getLogger(__name__)

ZERO_BRANCH = 1e-14


# -- bases -------------------------------------------------------------------------


@dataclass(frozen=True)
class SingleQubitBasis:
    """{|v>, |v_perp>} with |v> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""

    theta: float
    phi: float

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[c, -s * e.conjugate()], [e * s, c]], dtype=complex)


Z_BASIS = SingleQubitBasis(0.0, 0.0)
X_BASIS = SingleQubitBasis(math.pi / 2, 0.0)
Y_BASIS = SingleQubitBasis(math.pi / 2, math.pi / 2)


@dataclass(frozen=True)
class ProductBasis:
    """One single-qubit basis per qubit of A, in ascending qubit order.

    Element index i = i_0 + 2 i_1 + ..., so the first qubit's index varies
    fastest (the ordering of beta (x) gamma).
    """

    factors: tuple[SingleQubitBasis, ...]

    @classmethod
    def from_angles(cls, angles: Sequence[float]) -> "ProductBasis":
        angles = list(angles)
        if len(angles) % 2:
            raise ContractError("angles come in (theta, phi) pairs")
        return cls(tuple(SingleQubitBasis(angles[k], angles[k + 1]) for k in range(0, len(angles), 2)))

    @classmethod
    def uniform(cls, basis: SingleQubitBasis, n: int) -> "ProductBasis":
        return cls((basis,) * n)

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    def factor_matrices(self) -> list[np.ndarray]:
        return [f.matrix() for f in self.factors]

    def unitary(self) -> np.ndarray:
        u = np.ones((1, 1), dtype=complex)
        for m in self.factor_matrices():
            u = np.kron(m, u)
        return u


@dataclass(frozen=True)
class GlobalBasis:
    """Arbitrary ordered orthonormal basis of H_A: the columns of ``unitary``."""

    unitary: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        d = u.shape[0]
        if u.shape != (d, d):
            raise ContractError("basis matrix must be square")
        _nqubits(d)
        if np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-10:
            raise ContractError("basis matrix is not unitary")
        object.__setattr__(self, "unitary", u)

    @property
    def n_qubits(self) -> int:
        return _nqubits(self.unitary.shape[0])


Basis = Union[ProductBasis, GlobalBasis]


def basis_matrix(basis: Basis) -> np.ndarray:
    return basis.unitary() if isinstance(basis, ProductBasis) else basis.unitary


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 10
    max_evals: int = 2000
    tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_evals < 1 or self.tol <= 0 or self.seed < 0:
            raise ContractError("optimizer settings must be positive")


# -- random states -------------------------------------------------------------------


def haar_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    if n_qubits > STATE_QUBIT_CAP:
        raise ContractError(f"{n_qubits} qubits exceeds the statevector cap")
    d = 1 << n_qubits
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Ginibre matrix with the R-diagonal phases divided out."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_product_basis(n_qubits: int, rng: np.random.Generator) -> ProductBasis:
    """Haar-random single-qubit bases, as angles."""
    theta = np.arccos(1 - 2 * rng.random(n_qubits))
    phi = 2 * np.pi * rng.random(n_qubits)
    return ProductBasis(tuple(SingleQubitBasis(float(t), float(p)) for t, p in zip(theta, phi)))


# -- branches ------------------------------------------------------------------------


def _check_state(psi: np.ndarray, bp: Bipartition) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ContractError("expected a single state vector")
    n = _nqubits(psi.shape[0])
    if n != bp.n:
        raise ContractError(f"state has {n} qubits, bipartition has {bp.n}")
    if bp.n_a == 0 or bp.n_b == 0:
        raise ContractError("both A and B must be nonempty")
    return psi


def _ba_matrix(psi: np.ndarray, bp: Bipartition) -> np.ndarray:
    """Psi as a (d_B, d_A) matrix: Psi[b, a]."""
    return _split_matrix(psi, bp.b, bp.n)


def post_measurement(psi: np.ndarray, bp: Bipartition, v: np.ndarray):
    """Outcome probability of |v><v| on A and the normalized state left on B.

    The state is None when the probability is below 1e-14.
    """
    psi = _check_state(psi, bp)
    v = np.asarray(v, dtype=complex)
    if v.shape != (1 << bp.n_a,):
        raise ContractError(f"v must have length {1 << bp.n_a}")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ContractError("v must be normalized")
    branch = _ba_matrix(psi, bp) @ v.conj()
    p = float(np.vdot(branch, branch).real)
    if p < ZERO_BRANCH:
        return p, None
    return p, branch / math.sqrt(p)


def branch_tangle(psi: np.ndarray, bp: Bipartition, v: np.ndarray) -> float:
    """p_v * tau(M_v); zero for a vanishing branch."""
    bp.require_even_b()
    p, m = post_measurement(psi, bp, v)
    if m is None:
        return 0.0
    return p * float(_flip_overlap(m))


def _branch_values(branches: np.ndarray) -> np.ndarray:
    """Per-branch p * tau for branch vectors along the last axis."""
    p = np.sum(np.abs(branches) ** 2, axis=-1)
    vals = _flip_overlap(branches)
    return np.where(p < ZERO_BRANCH, 0.0, vals)


def _kron_le(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product with mats[0] on the least significant index."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        r, c = out.shape
        out = (m[:, None, :, None] * out[None, :, None, :]).reshape(2 * r, 2 * c)
    return out


def _product_branches(psi_ba: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Branch vectors for a product basis without forming the d_A x d_A unitary.

    The A index is split into a low and a high qubit group, and each group's
    small Kronecker factor is applied by one matmul.  Returns (d_A, d_B).
    """
    d_b, d_a = psi_ba.shape
    lo = len(mats) // 2
    u_lo = _kron_le(mats[:lo])
    u_hi = _kron_le(mats[lo:])
    t = psi_ba.reshape(d_b, u_hi.shape[0], u_lo.shape[0])
    t = u_hi.T.conj() @ (t @ u_lo.conj())
    return t.reshape(d_b, d_a).T


def _angle_matrices(x: np.ndarray) -> np.ndarray:
    """SingleQubitBasis matrices for interleaved (theta, phi) angles, stacked (k, 2, 2)."""
    c, s = np.cos(x[0::2] / 2), np.sin(x[0::2] / 2)
    e = np.exp(1j * x[1::2])
    return np.stack([np.stack([c, -s * e.conj()], -1), np.stack([e * s, c + 0j], -1)], -2)


def avg_tangle(psi: np.ndarray, bp: Bipartition, basis: Basis) -> float:
    """Average post-measurement n-tangle on B for a measurement of A in ``basis``."""
    psi = _check_state(psi, bp)
    bp.require_even_b()
    if basis.n_qubits != bp.n_a:
        raise ContractError(f"basis acts on {basis.n_qubits} qubits, |A| = {bp.n_a}")
    m = _ba_matrix(psi, bp)
    if isinstance(basis, ProductBasis):
        branches = _product_branches(m, basis.factor_matrices())
    else:
        branches = (m @ basis.unitary.conj()).T
    return float(np.sum(_branch_values(branches)))


def branch_probabilities(psi: np.ndarray, bp: Bipartition, basis: Basis) -> np.ndarray:
    psi = _check_state(psi, bp)
    branches = (_ba_matrix(psi, bp) @ basis_matrix(basis).conj()).T
    return np.sum(np.abs(branches) ** 2, axis=-1)


def ea(psi: np.ndarray, bp: Bipartition) -> float:
    """EA as the fidelity between the B-marginal and its spin flip."""
    psi = _check_state(psi, bp)
    bp.require_even_b()
    rho = partial_trace(psi, bp)
    return float(fidelity(rho, spin_flip(rho)))


def le(psi: np.ndarray, bp: Bipartition, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    """Best average tangle found over product bases: a certified lower bound on LE.

    Multi-start COBYLA over the 2|A| Bloch angles.  Every objective evaluation
    is recorded, so the result is never below any basis the search probed.
    """
    psi = _check_state(psi, bp)
    bp.require_even_b()
    m = _ba_matrix(psi, bp)
    k = bp.n_a
    best = -np.inf

    def value(x: np.ndarray) -> float:
        nonlocal best
        mats = _angle_matrices(x)
        val = float(np.sum(_branch_values(_product_branches(m, mats))))
        if val > best:
            best = val
        return -val

    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for r, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        x0 = np.empty(2 * k)
        x0[0::2] = np.arccos(1 - 2 * rng.random(k))
        x0[1::2] = 2 * np.pi * rng.random(k)
        try:
            minimize(
                value,
                x0,
                method="COBYLA",
                tol=cfg.tol,
                options={"maxiter": cfg.max_evals, "rhobeg": 0.5},
            )
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            log.warning("LE restart %d failed and was skipped: %s", r, exc)
    return float(min(best, 1.0))


# -- basis distance and Lipschitz quantities -------------------------------------------


def trace_distance_pure(u: np.ndarray, v: np.ndarray) -> float:
    """|| |u><u| - |v><v| ||_1 = 2 sqrt(1 - |<u|v>|^2) for unit vectors."""
    ov = abs(np.vdot(u, v)) ** 2
    return 2.0 * math.sqrt(max(0.0, 1.0 - ov))


def basis_norm(beta: Basis, gamma: Basis) -> float:
    """Max over matched elements of the trace distance between their projectors."""
    ub, ug = basis_matrix(beta), basis_matrix(gamma)
    if ub.shape != ug.shape:
        raise ContractError(f"basis dimensions differ: {ub.shape} vs {ug.shape}")
    ov = np.abs(np.sum(ub.conj() * ug, axis=0)) ** 2
    return float(np.max(2.0 * np.sqrt(np.clip(1.0 - ov, 0.0, None))))


def k_constant(d_b: int) -> float:
    """sqrt(2 / (d_B + 1)), the typical ceiling for LE."""
    if d_b < 2 or d_b & (d_b - 1):
        raise ContractError(f"d_B={d_b} must be a power of two >= 2")
    return math.sqrt(2.0 / (d_b + 1))


def fv_lipschitz_psi_const() -> float:
    """Constant in |F_v(Psi) - F_v(Psi')| <= c || |Psi> - |Psi'> ||_2."""
    return 4 * math.sqrt(2) + 2


def fv_lipschitz_v_const(d_b: int) -> float:
    """Constant in |F_v - F_w| <= c || |v><v| - |w><w| ||_1."""
    return math.sqrt(2) * d_b


def tau_bar_lipschitz_const(d_a: int, d_b: int) -> float:
    """Constant in |tau_beta - tau_gamma| <= c ||beta - gamma||_B."""
    return math.sqrt(2) * d_a * d_b


# -- concentration right-hand sides -------------------------------------------------------

REGIMES = ("global-thm4", "local-thm5", "global-vairogs")
_LEVY = 18 * math.pi**3 * (4 * math.sqrt(2) + 2) ** 2


def log_concentration_rhs(regime: str, d_a: int, d_b: int, n_a: int, eps: float, c: float = 1.0) -> float:
    if eps <= 0:
        raise ContractError("eps must be positive")
    if regime == "global-thm4":
        return (
            math.log(2)
            + 2 * d_a * math.log(10 * math.sqrt(2) * d_a * d_b / eps)
            - d_b * eps**2 / (_LEVY * d_a)
        )
    if regime == "local-thm5":
        base = 40 * (1 + 2 * math.sqrt(2)) ** 2 * n_a**2 * d_a**2 * d_b**2 / eps**2
        return math.log(2) + 8 * n_a * math.log(base) - d_a * d_b * eps**2 / _LEVY
    if regime == "global-vairogs":
        return math.log(2) - c * d_a * d_b * eps**2
    raise ContractError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def concentration_rhs(regime: str, d_a: int, d_b: int, n_a: int, eps: float, c: float = 1.0) -> float:
    """Right-hand side of the tail bound for ``regime``, evaluated in log space.

    Returns ``inf`` when the value overflows a double.
    """
    lv = log_concentration_rhs(regime, d_a, d_b, n_a, eps, c)
    return math.exp(lv) if lv < 709.0 else math.inf



# -- Haar scans ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaarScanRow:
    n_a: int
    n_b: int
    samples: int
    mean_ea: float
    std_ea: float
    mean_le: Optional[float]
    std_le: Optional[float]
    k: float
    ea_reference: float  # 1 - sqrt(2 d_B / d_A)


def haar_sample(n_a: int, n_b: int, seed: int, index: int, with_le: bool, cfg: OptimizerConfig):
    """(EA, LE or None) for the Haar state with stream (seed, n_a, n_b, index); A = low qubits."""
    rng = np.random.default_rng([seed, n_a, n_b, index])
    psi = haar_state(n_a + n_b, rng)
    bp = Bipartition.from_a(n_a + n_b, range(n_a))
    e = ea(psi, bp)
    if not with_le:
        return e, None
    opt = OptimizerConfig(cfg.restarts, cfg.max_evals, cfg.tol, seed=int(rng.integers(2**32)))
    return e, le(psi, bp, opt)


def haar_scan(
    n_a: int,
    n_b: int,
    samples: int,
    seed: int,
    with_le: bool = False,
    cfg: OptimizerConfig = OptimizerConfig(),
    workers: int = 1,
) -> HaarScanRow:
    """Sample means and standard deviations of EA (and optionally LE) over Haar states."""
    if n_b % 2 or n_b < 2 or n_a < 1:
        raise ContractError("need n_a >= 1 and even n_b >= 2")
    if n_a + n_b > STATE_QUBIT_CAP:
        raise ContractError(f"{n_a + n_b} qubits exceeds the statevector cap")
    args = (n_a, n_b, seed)
    if workers <= 1:
        res = [haar_sample(*args, i, with_le, cfg) for i in range(samples)]
    else:
        from concurrent.futures import ProcessPoolExecutor

        n = samples
        with ProcessPoolExecutor(max_workers=workers) as pool:
            res = list(
                pool.map(haar_sample, [n_a] * n, [n_b] * n, [seed] * n, range(n), [with_le] * n, [cfg] * n)
            )
    eas = np.array([r[0] for r in res])
    les = np.array([r[1] for r in res]) if with_le else None
    d_a, d_b = 2**n_a, 2**n_b
    return HaarScanRow(
        n_a,
        n_b,
        samples,
        float(eas.mean()),
        float(eas.std(ddof=1)) if samples > 1 else 0.0,
        float(les.mean()) if with_le else None,
        (float(les.std(ddof=1)) if samples > 1 else 0.0) if with_le else None,
        k_constant(d_b),
        1 - math.sqrt(2 * d_b / d_a),
    )

__all__ = [
    "GlobalBasis",
    "HaarScanRow",
    "OptimizerConfig",
    "ProductBasis",
    "SingleQubitBasis",
    "X_BASIS",
    "Y_BASIS",
    "Z_BASIS",
    "avg_tangle",
    "basis_norm",
    "branch_probabilities",
    "branch_tangle",
    "concentration_rhs",
    "ea",
    "haar_sample",
    "haar_scan",
    "haar_state",
    "haar_unitary",
    "k_constant",
    "le",
    "post_measurement",
    "random_product_basis",
]
