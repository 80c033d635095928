"""Exact interaction-picture time evolution.

``reduced_state_at`` sums the closed series for the reduced qubit state;
``evolve_total`` applies the propagator sector by sector. Coefficients
with a Fock index beyond ``n_max`` count as zero.
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import ModelParams, jc_coefficients
from .states import FieldState, QubitState, TotalState, TruncationLeakWarning, product_state


def _series_inputs(rho0: TotalState):
    B = rho0.blocks()  # [n, alpha, m, beta]
    N = rho0.n_max + 1
    n = np.arange(N)
    pad = np.zeros(2, dtype=complex)
    diag11 = B[n, 1, n, 1].real
    diag00 = B[n, 0, n, 0].real
    coh10 = B[n, 1, n, 0]                                   # rho^{nn}_{10}
    up10 = np.concatenate([B[n[:-1], 1, n[:-1] + 1, 0], pad])[:N]   # rho^{n,n+1}_{10}
    sub11 = np.concatenate([B[n[:-1] + 1, 1, n[:-1], 1], pad])[:N]  # rho^{n+1,n}_{11}
    sub00 = np.concatenate([B[n[:-1] + 1, 0, n[:-1], 0], pad])[:N]  # rho^{n+1,n}_{00}
    sub01 = np.concatenate([B[n[:-2] + 2, 0, n[:-2], 1], pad])[:N]  # rho^{n+2,n}_{01}
    return n, diag11, diag00, coh10, up10, sub11, sub00, sub01


def reduced_populations_and_coherence(rho0: TotalState, times, p: ModelParams):
    """Vectorized reduced state: returns ``(rho11(t), rho10(t))`` arrays over ``times``."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    n, diag11, diag00, coh10, up10, sub11, sub00, sub01 = _series_inputs(rho0)
    N = n.size
    c, d = jc_coefficients(np.arange(N + 2)[None, :], t[:, None], p)
    c0, c1, c2 = c[:, :N], c[:, 1:N + 1], c[:, 2:N + 2]
    d0, d1, d2 = d[:, :N], d[:, 1:N + 1], d[:, 2:N + 2]
    sq1 = np.sqrt(n + 1.0)
    sq2 = np.sqrt(n + 2.0)
    rho11 = (diag11 * np.abs(c1) ** 2
             + 2.0 * sq1 * np.real(up10 * np.conj(d1) * c1)
             + n * diag00 * np.abs(d0) ** 2).sum(axis=1)
    rho10 = (-sq1 * sub11 * c2 * d1
             - sq2 * sq1 * sub01 * d2 * d1
             + coh10 * c1 * c0
             + sq1 * sub00 * d1 * c0).sum(axis=1)
    return rho11, rho10


def reduced_state_at(rho0: TotalState, t: float, p: ModelParams) -> QubitState:
    """Reduced qubit state at interaction-picture time ``t``."""
    rho11, rho10 = reduced_populations_and_coherence(rho0, t, p)
    r11 = float(rho11[0])
    return QubitState(rho11=r11, rho00=1.0 - r11, rho10=complex(rho10[0]))


def reduced_trajectory(rho0: TotalState, times, p: ModelParams) -> list[QubitState]:
    rho11, rho10 = reduced_populations_and_coherence(rho0, times, p)
    return [QubitState(r, 1.0 - r, c) for r, c in zip(rho11.tolist(), rho10.tolist())]


def sector_unitaries(n_max: int, t: float, p: ModelParams) -> np.ndarray:
    """2x2 propagator blocks on ``{|1,n-1>, |0,n>}`` for ``n = 1..n_max+1``."""
    n = np.arange(1, n_max + 2)
    c, d = jc_coefficients(n, t, p)
    sq = np.sqrt(n)
    U = np.empty((n.size, 2, 2), dtype=complex)
    U[:, 0, 0] = c
    U[:, 0, 1] = sq * d
    U[:, 1, 0] = -sq * np.conj(d)
    U[:, 1, 1] = np.conj(c)
    return U


def evolve_total(rho0: TotalState, t: float, p: ModelParams) -> TotalState:
    """``U(t) rho0 U(t)^dagger`` using the block structure of the propagator.

    The lone top state ``|1, n_max>`` couples to ``|0, n_max+1>``, which is
    outside the truncation; any weight moved there is dropped and reported
    through :class:`TruncationLeakWarning` when it exceeds the state's
    ``truncation_tol``.
    """
    N = rho0.n_max + 1
    dim = 2 * N
    # append |0, N> so that indices 1..dim form complete sectors
    R = np.zeros((dim + 1, dim + 1), dtype=complex)
    R[:dim, :dim] = rho0.matrix
    u = sector_unitaries(rho0.n_max, t, p)  # (N, 2, 2)
    # |0,0> is invariant (c_0 = 1 in the interaction picture)
    inner = R[1:, 1:].reshape(N, 2, N, 2)
    inner = np.einsum("kac,kcld,lbd->kalb", u, inner, u.conj(), optimize=True)
    edge = np.einsum("lbd,ld->lb", u.conj(), R[0, 1:].reshape(N, 2))
    out = np.empty_like(R)
    out[0, 0] = R[0, 0]
    out[1:, 1:] = inner.reshape(dim, dim)
    out[0, 1:] = edge.reshape(dim)
    out[1:, 0] = np.conj(out[0, 1:])
    leaked = out[dim, dim].real
    if leaked > rho0.truncation_tol:
        warnings.warn(f"evolution leaked weight {leaked:.3e} beyond n_max={rho0.n_max}",
                      TruncationLeakWarning, stacklevel=2)
    kept = out[:dim, :dim]
    kept = 0.5 * (kept + kept.conj().T)
    return TotalState(rho0.n_max, kept / np.trace(kept).real, rho0.truncation_tol)


def dynamical_map(rho_S: QubitState, rho_E: FieldState, t: float, p: ModelParams) -> QubitState:
    """Reduced evolution of ``rho_S`` for a fixed uncorrelated environment ``rho_E``."""
    return reduced_state_at(product_state(rho_S, rho_E), t, p)
