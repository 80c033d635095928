"""Trace distances, correlation measures and the information-flow quantities."""

from __future__ import annotations

import math

import numpy as np

from .model import ModelParams
from .numerics import trace_norm_hermitian
from .states import (DEFAULT_TAIL_TOL, MAX_N, QubitState, TotalState, gibbs_coefficients,
                     marginals, product_of_marginals)

# min(dim H_S, dim H_E) for a qubit coupled to a field mode
SCHMIDT_DIM = 2
CORRELATION_BOUND = 1.0 - 1.0 / SCHMIDT_DIM**2


def trace_distance_qubit(r1: QubitState, r2: QubitState) -> float:
    """Closed form ``sqrt(dp**2 + |dc|**2)`` for a traceless 2x2 difference."""
    dp = r1.rho11 - r2.rho11
    dc = r1.rho10 - r2.rho10
    return math.sqrt(dp * dp + abs(dc) ** 2)


def qubit_distance_arrays(rho11_a, rho10_a, rho11_b, rho10_b) -> np.ndarray:
    """Vectorized :func:`trace_distance_qubit` over trajectories."""
    return np.sqrt((np.asarray(rho11_a) - rho11_b) ** 2 + np.abs(np.asarray(rho10_a) - rho10_b) ** 2)


def _matched(r1: TotalState, r2: TotalState) -> tuple[np.ndarray, np.ndarray]:
    n_max = max(r1.n_max, r2.n_max)
    return r1.padded(n_max).matrix, r2.padded(n_max).matrix


def trace_distance_total(r1: TotalState, r2: TotalState) -> float:
    """``1/2 ||r1 - r2||_1``; the smaller truncation is zero-padded."""
    a, b = _matched(r1, r2)
    return 0.5 * trace_norm_hermitian(a - b)


def correlations(rho: TotalState) -> float:
    """Total correlations ``D(rho, rho_S (x) rho_E)``."""
    return trace_distance_total(rho, product_of_marginals(rho))


def outside_information(r1: TotalState, r2: TotalState) -> float:
    """Distinguishability of the total states not visible in the reduced states.

    ``D(r1, r2) - D(Tr_E r1, Tr_E r2)``, non-negative because the partial
    trace is a contraction.
    """
    s1, _ = marginals(r1)
    s2, _ = marginals(r2)
    return trace_distance_total(r1, r2) - trace_distance_qubit(s1, s2)


def helstrom_probability(r1: QubitState, r2: QubitState) -> float:
    """Optimal single-shot success probability for telling ``r1`` from ``r2``."""
    return 0.5 * (1.0 + trace_distance_qubit(r1, r2))


def projector_form(r1: QubitState, r2: QubitState) -> float:
    """``max_P Tr[P (r1 - r2)]`` over the eigenprojectors of the difference.

    An independent route to the trace distance via its variational form.
    """
    X = r1.to_matrix() - r2.to_matrix()
    w, V = np.linalg.eigh(X)
    candidates = [0.0]
    for k in range(2):
        P = np.outer(V[:, k], V[:, k].conj())
        candidates.append(np.trace(P @ X).real)
    P = V @ V.conj().T
    candidates.append(np.trace(P @ X).real)
    return max(candidates)


def _block_correlations(gc) -> float:
    """Sum over the diagonal entry and 2x2 blocks of ``rho - rho_S (x) rho_E``."""
    rho00 = gc.p00.sum()
    rho11 = gc.p11.sum()
    field = gc.p00 + gc.p11
    d0 = gc.p00 - rho00 * field  # D^n_0
    d1 = gc.p11 - rho11 * field  # D^n_1
    total = 0.5 * abs(d0[0])
    # block n pairs |1,n> with |0,n+1>; the top |1,n_max> stands alone
    a = d1[:-1]
    b = d0[1:]
    root = np.sqrt((a - b) ** 2 + 4.0 * gc.coherence**2)
    total += 0.25 * np.sum(np.abs(a + b + root)) + 0.25 * np.sum(np.abs(a + b - root))
    total += 0.5 * abs(d1[-1])
    return float(total)


def gibbs_correlations(p: ModelParams, beta: float, tail_tol: float = DEFAULT_TAIL_TOL,
                       max_n: int = MAX_N) -> float:
    """Correlations of the Gibbs state from its 2x2 block structure.

    Never builds the dense state, so it stays cheap at high temperature
    where many Fock levels are populated.
    """
    return _block_correlations(gibbs_coefficients(p, beta, tail_tol, max_n))


def maximally_entangled_operator(n: int) -> np.ndarray:
    """``|psi><psi| - P_S (x) P_E / N**2`` for ``|psi> = (|0,n> + |1,n-1>)/sqrt 2``.

    Returned as a dense matrix in the interleaved basis with ``n_max = n + 1``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    n_max = n + 1
    dim = 2 * (n_max + 1)
    psi = np.zeros(dim, dtype=complex)
    psi[2 * n] = psi[2 * (n - 1) + 1] = 1.0 / math.sqrt(2.0)
    P_S = np.eye(2)
    P_E = np.zeros((n_max + 1, n_max + 1))
    P_E[n, n] = P_E[n - 1, n - 1] = 1.0
    return np.outer(psi, psi.conj()) - np.kron(P_E, P_S) / SCHMIDT_DIM**2
