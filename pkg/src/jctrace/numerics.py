"""Dense Hermitian linear algebra used by the distance and oracle code.

Two eigensolver backends are available: ``"lapack"`` (``numpy.linalg.eigh``,
the default) and ``"jacobi"``, a cyclic complex Jacobi sweep kept as a
dependency-free reference that the test suite cross-checks against LAPACK.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

HERMITICITY_TOL = 1e-10
JACOBI_TOL = 1e-13


class NotHermitianError(ValueError):
    """Raised when a matrix deviates from Hermiticity beyond tolerance."""


def as_hermitian(M, hermiticity_tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate ``M`` and return its symmetrized part ``(M + M^H) / 2``.

    The tolerance is relative to the largest entry of ``M``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    scale = max(np.abs(M).max(), 1.0)
    gap = np.abs(M - M.conj().T)
    worst = gap.max()
    if worst > hermiticity_tol * scale:
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise NotHermitianError(
            f"matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {worst:.3e} "
            f"exceeds {hermiticity_tol:.1e} * {scale:.3e}"
        )
    return 0.5 * (M + M.conj().T)


def _jacobi_eigh(A: np.ndarray, tol: float, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization with 2x2 complex rotations."""
    A = A.copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    norm = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app, aqq = A[p, p].real, A[q, q].real
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                phase = apq / mag
                theta = 0.5 * np.arctan2(2.0 * mag, aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * np.conj(phase) * col_q
                A[:, q] = s * col_p + c * np.conj(phase) * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * phase * row_q
                A[q, :] = s * row_p + c * phase * row_q
                A[p, q] = A[q, p] = 0.0
                v_p = V[:, p].copy()
                v_q = V[:, q].copy()
                V[:, p] = c * v_p - s * np.conj(phase) * v_q
                V[:, q] = s * v_p + c * np.conj(phase) * v_q
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(A).real
    order = np.argsort(w)
    return w[order], V[:, order]


def hermitian_eigh(M, *, method: str = "lapack", tol: float = JACOBI_TOL,
                   hermiticity_tol: float = HERMITICITY_TOL):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    A = as_hermitian(M, hermiticity_tol)
    if method == "lapack":
        return np.linalg.eigh(A)
    if method == "jacobi":
        return _jacobi_eigh(A, tol)
    raise ValueError(f"unknown eigensolver {method!r}; use 'lapack' or 'jacobi'")


def hermitian_eigenvalues(M, tol: float = JACOBI_TOL, *, method: str = "lapack",
                          hermiticity_tol: float = HERMITICITY_TOL) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix in ascending order."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_hermitian(M, hermiticity_tol)
    if method == "lapack":
        return np.linalg.eigvalsh(A)
    return hermitian_eigh(A, method=method, tol=tol)[0]


def trace_norm_hermitian(M, *, method: str = "lapack") -> float:
    """Sum of the absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(M, method=method))))


def hermitian_function(M, f: Callable[[np.ndarray], np.ndarray], *,
                       method: str = "lapack") -> np.ndarray:
    """Evaluate ``V f(D) V^H`` for the eigendecomposition ``M = V D V^H``.

    ``f`` is applied to the whole eigenvalue array at once, so it should be
    a numpy ufunc-style callable (``np.exp``, ``lambda x: np.exp(-1j * x * t)``).
    """
    w, V = hermitian_eigh(M, method=method)
    fw = np.broadcast_to(np.asarray(f(w), dtype=complex), w.shape)
    return (V * fw) @ V.conj().T
