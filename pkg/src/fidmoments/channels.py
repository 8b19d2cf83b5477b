"""Channel representations (Kraus, process matrix, Jamiolkowski state) and conversions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bases import OperatorBasis, hermitian_basis
from .linalg import as_matrix, eig_hermitian, is_psd, partial_trace

__all__ = [
    "KrausChannel",
    "ChiMatrix",
    "CPTPReport",
    "unitary_channel",
    "identity_channel",
    "deviation_channel",
    "compose",
    "conjugate",
    "apply",
    "apply_chi",
    "kraus_to_chi",
    "chi_to_kraus",
    "chi_from_jamiolkowski",
    "jamiolkowski_state",
    "validate_cptp",
    "depolarizing",
    "dephasing",
    "amplitude_damping",
    "random_cptp",
]

UNITARY_TOL = 1e-9
RANK_CUTOFF = 1e-12
EIG_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map ``rho -> sum_i K_i rho K_i^dag`` on ``C^d``.

    ``kraus`` has shape ``(r, d, d)``. Trace preservation is not enforced at
    construction so that malformed inputs can still be reported on by
    :func:`validate_cptp`.
    """

    d: int
    kraus: np.ndarray

    @classmethod
    def from_ops(cls, ops: Sequence) -> "KrausChannel":
        arr = np.array([as_matrix(k) for k in ops], dtype=complex)
        if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[1] != arr.shape[2]:
            raise ValueError("Kraus operators must be a nonempty list of square matrices")
        arr.flags.writeable = False
        return cls(arr.shape[1], arr)

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """Process matrix: ``E(rho) = sum chi_lm P_l rho P_m^dag``."""

    d: int
    basis: OperatorBasis
    matrix: np.ndarray


@dataclass(frozen=True)
class CPTPReport:
    tp_residual: float
    min_choi_eig: float
    verdict: bool


def _check_unitary(u: np.ndarray) -> None:
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    if np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) > UNITARY_TOL:
        raise ValueError("matrix is not unitary")


def unitary_channel(u) -> KrausChannel:
    u = as_matrix(u)
    _check_unitary(u)
    return KrausChannel.from_ops([u])


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel.from_ops([np.eye(d)])


def deviation_channel(channel: KrausChannel, u) -> KrausChannel:
    """``Lambda = U^dag o E``, the part of ``E`` that deviates from the ideal ``U``."""
    u = as_matrix(u)
    _check_unitary(u)
    if u.shape[0] != channel.d:
        raise ValueError(f"dimension mismatch: channel d={channel.d}, unitary {u.shape}")
    return KrausChannel.from_ops(u.conj().T @ channel.kraus)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner``."""
    if outer.d != inner.d:
        raise ValueError("dimension mismatch")
    ops = np.einsum("aij,bjk->abik", outer.kraus, inner.kraus)
    return KrausChannel.from_ops(ops.reshape(-1, outer.d, outer.d))


def conjugate(channel: KrausChannel, v) -> KrausChannel:
    """``V^dag o Lambda o V`` for a unitary ``V``."""
    v = as_matrix(v)
    _check_unitary(v)
    return KrausChannel.from_ops(v.conj().T @ channel.kraus @ v)


def apply(channel: KrausChannel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (channel.d, channel.d):
        raise ValueError(f"state shape {rho.shape} does not match d={channel.d}")
    k = channel.kraus
    return np.einsum("aij,jk,alk->il", k, rho, k.conj())


def apply_chi(chi: ChiMatrix, rho) -> np.ndarray:
    """Evaluate ``sum_lm chi_lm P_l rho P_m^dag``."""
    p = chi.basis.elements
    return np.einsum("lm,lij,jk,mnk->in", chi.matrix, p, as_matrix(rho), p.conj())


def kraus_to_chi(channel: KrausChannel, basis: OperatorBasis | None = None) -> ChiMatrix:
    basis = basis or hermitian_basis(channel.d)
    if basis.d != channel.d:
        raise ValueError(f"basis d={basis.d} does not match channel d={channel.d}")
    c = basis.coefficients(channel.kraus)  # (r, d^2)
    return ChiMatrix(channel.d, basis, c.T @ c.conj())


def chi_to_kraus(chi: ChiMatrix, tol: float = 1e-9) -> KrausChannel:
    """Kraus form from the spectral decomposition of ``chi``.

    Raises ``ValueError`` when ``chi`` has a negative eigenvalue beyond
    ``tol`` (the map is not completely positive).
    """
    w, v = eig_hermitian(chi.matrix)
    if w[-1] < -tol * max(1.0, float(np.linalg.norm(chi.matrix))):
        raise ValueError(f"chi is not positive semidefinite (min eigenvalue {w[-1]:.3e})")
    keep = w > RANK_CUTOFF * max(w[0], 0.0)
    if not np.any(keep):
        raise ValueError("chi has no positive eigenvalues")
    coeffs = (v[:, keep] * np.sqrt(w[keep])).T
    return KrausChannel.from_ops(chi.basis.combine(coeffs))


def jamiolkowski_state(channel: KrausChannel) -> np.ndarray:
    """``(E (x) Id)|Psi><Psi|``, a ``d**2 x d**2`` density matrix."""
    d = channel.d
    vecs = channel.kraus.reshape(channel.rank, d * d)
    return vecs.T @ vecs.conj() / d


def chi_from_jamiolkowski(rho, basis: OperatorBasis) -> ChiMatrix:
    """``chi_jk = <psi_j|rho|psi_k>`` in the generalized Bell basis."""
    v = basis.bell_matrix()
    return ChiMatrix(basis.d, basis, v.conj().T @ as_matrix(rho) @ v)


def validate_cptp(channel: KrausChannel, tol: float = 1e-8) -> CPTPReport:
    k = channel.kraus
    tp = np.einsum("aji,ajk->ik", k.conj(), k) - np.eye(channel.d)
    tp_residual = float(np.linalg.norm(tp))
    _, min_eig = is_psd(jamiolkowski_state(channel), tol)
    return CPTPReport(tp_residual, min_eig, tp_residual <= tol and min_eig >= -tol)


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


def depolarizing(d: int, p: float) -> KrausChannel:
    """``rho -> (1 - p) rho + p tr(rho) I / d``."""
    _check_prob("p", p)
    basis = hermitian_basis(d)
    # sum_a P_a X P_a = d tr(X) I over the full basis
    ops = [np.sqrt(1 - p + p / d**2) * basis[0]]
    ops += [np.sqrt(p) / d * basis[a] for a in range(1, d * d)]
    return KrausChannel.from_ops(ops)


def dephasing(p: float) -> KrausChannel:
    """Qubit phase flip: ``rho -> (1 - p) rho + p Z rho Z``."""
    _check_prob("p", p)
    return KrausChannel.from_ops([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.diag([1.0, -1.0])])


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_prob("gamma", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel.from_ops([k0, k1])


def random_cptp(d: int, rank: int, seed: int) -> KrausChannel:
    """Random CPTP map with Kraus rank ``rank`` from a normalized Ginibre Choi state."""
    if not 1 <= rank <= d * d:
        raise ValueError(f"rank must be in [1, {d * d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d * d, rank)) + 1j * rng.standard_normal((d * d, rank))
    w = g @ g.conj().T
    q = d * partial_trace(w, 1)
    evals, evecs = np.linalg.eigh(0.5 * (q + q.conj().T))
    q_inv_sqrt = (evecs / np.sqrt(np.maximum(evals, EIG_FLOOR))) @ evecs.conj().T
    m = np.kron(np.eye(d), q_inv_sqrt)
    rho = m @ w @ m.conj().T
    basis = hermitian_basis(d)
    return chi_to_kraus(chi_from_jamiolkowski(rho, basis))
