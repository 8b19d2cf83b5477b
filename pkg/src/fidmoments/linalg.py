"""Dense complex linear algebra on single and bipartite operators.

Bipartite operators act on ``C^d (x) C^d`` and are stored as ``d**2 x d**2``
arrays. Row/column index ``i*d + j`` carries ``i`` on the first (system 1,
"output") factor and ``j`` on the second (ancilla) factor. Every partial
operation in this package is derived from that single convention.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "as_matrix",
    "local_dim",
    "tensor_product",
    "hs_inner",
    "partial_trace",
    "partial_transpose",
    "swap_operator",
    "eig_hermitian",
    "is_psd",
]


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def local_dim(a: np.ndarray) -> int:
    """Local dimension ``d`` of a ``d**2 x d**2`` bipartite operator."""
    n = a.shape[0]
    d = math.isqrt(n)
    if a.ndim != 2 or a.shape[1] != n or d * d != n:
        raise ValueError(f"shape {a.shape} is not a bipartite d^2 x d^2 operator")
    return d


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``(A (x) B)[(i,j),(k,l)] = A[i,k] B[j,l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^dag B)``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def _check_subsystem(subsystem: int) -> None:
    if subsystem not in (1, 2):
        raise ValueError(f"subsystem must be 1 or 2, got {subsystem!r}")


def partial_trace(a, subsystem: int) -> np.ndarray:
    """Trace out ``subsystem`` (1 or 2) of a bipartite operator."""
    _check_subsystem(subsystem)
    a = _square(a)
    d = local_dim(a)
    t = a.reshape(d, d, d, d)
    if subsystem == 1:
        return np.einsum("ijil->jl", t)
    return np.einsum("ijkj->ik", t)


def partial_transpose(a, subsystem: int) -> np.ndarray:
    """Transpose only the chosen tensor factor of a bipartite operator."""
    _check_subsystem(subsystem)
    a = _square(a)
    d = local_dim(a)
    t = a.reshape(d, d, d, d)
    axes = (2, 1, 0, 3) if subsystem == 1 else (0, 3, 2, 1)
    return t.transpose(axes).reshape(d * d, d * d)


def swap_operator(d: int) -> np.ndarray:
    """SWAP on ``C^d (x) C^d``: ``|l>|m> -> |m>|l>``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    s = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d)
    l, m = np.meshgrid(idx, idx, indexing="ij")
    s[(m * d + l).ravel(), (l * d + m).ravel()] = 1.0
    return s


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the Hermitian part ``(A + A^dag)/2``.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.
    """
    a = _square(a)
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def is_psd(a, tol: float = 1e-9) -> tuple[bool, float]:
    """PSD test with a tolerance relative to ``max(1, ||A||_F)``.

    Returns ``(verdict, min_eigenvalue)`` for the Hermitian part of ``a``.
    """
    a = _square(a)
    h = 0.5 * (a + a.conj().T)
    min_eig = float(np.linalg.eigvalsh(h)[0])
    scale = max(1.0, float(np.linalg.norm(a)))
    return bool(min_eig >= -tol * scale), min_eig
