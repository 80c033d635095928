"""Brute-force reference path: dense Hamiltonian, matrix exponentials, partial traces.

Nothing here uses the closed-form propagator coefficients, the analytic
Gibbs coefficients or the reduced-dynamics series; only ``numerics`` and the
plain state containers are shared with the analytic path.
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import ModelParams
from .numerics import hermitian_eigh, hermitian_function
from .states import QubitState, TotalState, TruncationLeakWarning

ORACLE_PADDING = 8


def _operators(n_max: int):
    """Qubit and field operators in the interleaved basis (index ``2 n + alpha``)."""
    N = n_max + 1
    b = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
    sigma_plus = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0| in (|0>, |1>) ordering
    eye2, eyeN = np.eye(2), np.eye(N)
    # field is the slow index, qubit the fast one
    sp = np.kron(eyeN, sigma_plus)
    sm = sp.T
    bb = np.kron(b, eye2)
    return sp, sm, bb


def free_hamiltonian(p: ModelParams, n_max: int) -> np.ndarray:
    """``omega0 sigma_+ sigma_- + omega b^dag b`` (diagonal)."""
    sp, sm, bb = _operators(n_max)
    return p.omega0 * sp @ sm + p.omega * bb.T @ bb


def dense_hamiltonian(p: ModelParams, n_max: int) -> np.ndarray:
    """Full Jaynes-Cummings Hamiltonian on the truncated space."""
    if n_max < 1:
        raise ValueError("oracle needs n_max >= 1")
    sp, sm, bb = _operators(n_max)
    H = free_hamiltonian(p, n_max) + p.g * (sp @ bb + sm @ bb.T)
    return H.astype(complex)


def oracle_gibbs(p: ModelParams, beta: float, n_max: int) -> TotalState:
    """``exp(-beta H) / Tr exp(-beta H)`` by full diagonalization."""
    H = dense_hamiltonian(p, n_max)
    w, V = hermitian_eigh(H)
    boltz = np.exp(-beta * (w - w[0]))
    rho = (V * boltz) @ V.conj().T
    rho /= np.trace(rho).real
    return TotalState(n_max, 0.5 * (rho + rho.conj().T))


def oracle_unitary_interaction(p: ModelParams, t: float, n_max: int) -> np.ndarray:
    """``exp(i H0 t) exp(-i H t)`` with both exponentials taken numerically."""
    H = dense_hamiltonian(p, n_max)
    H0 = free_hamiltonian(p, n_max)
    U = hermitian_function(H, lambda x: np.exp(-1j * x * t))
    U0 = hermitian_function(H0, lambda x: np.exp(1j * x * t))
    return U0 @ U


class InteractionPropagator:
    """Caches the eigendecomposition of ``H`` for repeated time samples."""

    def __init__(self, p: ModelParams, n_max: int):
        self.p = p
        self.n_max = n_max
        self._w, self._V = hermitian_eigh(dense_hamiltonian(p, n_max))
        self._h0 = np.diag(free_hamiltonian(p, n_max)).real

    def schrodinger(self, t: float) -> np.ndarray:
        return (self._V * np.exp(-1j * self._w * t)) @ self._V.conj().T

    def __call__(self, t: float) -> np.ndarray:
        return np.exp(1j * self._h0 * t)[:, None] * self.schrodinger(t)


def partial_trace_field(rho: np.ndarray) -> np.ndarray:
    """Qubit block ``[alpha, beta]`` of a dense interleaved-basis operator."""
    N = rho.shape[0] // 2
    return np.einsum("nanb->ab", rho.reshape(N, 2, N, 2))


def _leak_check(rho0: TotalState, n_max: int):
    leaked = rho0.weight_above(n_max - 2) if rho0.n_max >= n_max - 1 else 0.0
    if leaked > rho0.truncation_tol:
        warnings.warn(
            f"state has weight {leaked:.3e} within two levels of the oracle truncation n_max={n_max}",
            TruncationLeakWarning, stacklevel=3)


def oracle_reduced_state(rho0: TotalState, t: float, p: ModelParams,
                         n_max: int | None = None, propagator: InteractionPropagator | None = None,
                         ) -> QubitState:
    """Reduced qubit state at interaction-picture time ``t`` by dense conjugation."""
    if propagator is not None:
        n_max = propagator.n_max
    elif n_max is None:
        n_max = rho0.n_max + ORACLE_PADDING
    _leak_check(rho0, n_max)
    rho = rho0.padded(n_max).matrix
    U = propagator(t) if propagator is not None else oracle_unitary_interaction(p, t, n_max)
    out = partial_trace_field(U @ rho @ U.conj().T)
    return QubitState.from_matrix(out / np.trace(out).real)


def oracle_reduced_state_schrodinger(rho0: TotalState, t: float, p: ModelParams,
                                     propagator: InteractionPropagator) -> QubitState:
    """Schrodinger-picture reduced state ``Tr_E[e^{-iHt} rho0 e^{iHt}]``."""
    rho = rho0.padded(propagator.n_max).matrix
    U = propagator.schrodinger(t)
    out = partial_trace_field(U @ rho @ U.conj().T)
    return QubitState.from_matrix(out / np.trace(out).real)


def oracle_correlations(rho: TotalState) -> float:
    """``D(rho, rho_S x rho_E)`` via dense partial traces and a full eigensolve."""
    M = rho.matrix
    N = rho.n_max + 1
    B = M.reshape(N, 2, N, 2)
    qubit = np.einsum("nanb->ab", B)
    field = np.einsum("nama->nm", B)
    X = M - np.kron(field, qubit)
    w, _ = hermitian_eigh(X)
    return 0.5 * float(np.abs(w).sum())
