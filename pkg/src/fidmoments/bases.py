"""Supernormalized Hermitian operator basis and the associated Bell states."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = ["OperatorBasis", "hermitian_basis", "max_entangled", "chi0", "bell_vector"]


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Operator basis ``{P_a}`` with ``tr(P_a^dag P_b) = d delta_ab``.

    ``elements`` has shape ``(d**2, d, d)``. The invariant formulas assume
    the Hermitian basis from :func:`hermitian_basis` (``P_0 = I``); other
    orthogonal bases, such as scaled matrix units, are fine for conversions.
    """

    d: int
    elements: np.ndarray

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.elements[k]

    def coefficients(self, a: np.ndarray) -> np.ndarray:
        """Expansion coefficients ``tr(P_k^dag A) / d`` so that ``A = sum_k c_k P_k``."""
        return np.einsum("kij,...ij->...k", self.elements.conj(), a) / self.d

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`coefficients`: ``sum_k c_k P_k``."""
        return np.einsum("...k,kij->...ij", coeffs, self.elements)

    def bell_matrix(self) -> np.ndarray:
        """Columns are the generalized Bell vectors ``(P_k (x) I)|Psi>``."""
        d = self.d
        # (P (x) I)|Psi> has components P[i, a] / sqrt(d) at index i*d + a.
        return self.elements.reshape(d * d, d * d).T / np.sqrt(d)


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


@functools.lru_cache(maxsize=None)
def hermitian_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis rescaled to Gram matrix ``d * I``.

    Order: identity, symmetric off-diagonal pairs ``(j, k), j < k`` in
    lexicographic order, the antisymmetric pairs in the same order, then
    the diagonal generators. For ``d = 2`` this is exactly ``I, X, Y, Z``.
    """
    _check_dim(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    mats = [np.eye(d, dtype=complex)]
    scale = np.sqrt(d / 2)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = scale
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j * scale
        m[k, j] = 1j * scale
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1))) * scale).astype(complex))
    elements = np.array(mats)
    elements.flags.writeable = False
    return OperatorBasis(d, elements)


def max_entangled(d: int) -> np.ndarray:
    """``|Psi> = d**-1/2 sum_a |a>|a>``."""
    _check_dim(d)
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def chi0(d: int) -> np.ndarray:
    """Projector ``|Psi><Psi|``; the process matrix of the identity channel."""
    psi = max_entangled(d)
    return np.outer(psi, psi.conj())


def bell_vector(basis: OperatorBasis, k: int) -> np.ndarray:
    """Generalized Bell vector ``|psi_k> = (P_k (x) I)|Psi>``."""
    if not 0 <= k < len(basis):
        raise IndexError(f"basis index {k} out of range for d={basis.d}")
    return basis.elements[k].ravel() / np.sqrt(basis.d)
