"""Jaynes-Cummings constants, dressed spectrum and propagator coefficients.

Units are natural (hbar = k_B = 1). Time is interaction-picture time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

CROSSING_TOL = 1e-9
_OMEGA_EPS = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Hamiltonian constants.

    Parameters
    ----------
    omega : float
        Field-mode frequency, must be positive.
    delta : float
        Detuning ``omega0 - omega``.
    g : float
        Coupling strength, non-negative.
    """

    omega: float
    delta: float
    g: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")

    @classmethod
    def from_frequencies(cls, omega0: float, omega: float, g: float) -> "ModelParams":
        return cls(omega=omega, delta=omega0 - omega, g=g)

    @property
    def omega0(self) -> float:
        return self.omega + self.delta

    def with_g(self, g: float) -> "ModelParams":
        return replace(self, g=g)


class DressedLevel(NamedTuple):
    n: int
    a: float
    b: float
    E_plus: float
    E_minus: float


def rabi_frequency(n, p: ModelParams):
    """``sqrt(delta**2 + 4 g**2 n)``; vectorizes over ``n``."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("n must be non-negative")
    out = np.sqrt(p.delta**2 + 4.0 * p.g**2 * n_arr)
    return float(out) if out.ndim == 0 else out


def jc_coefficients(n, t, p: ModelParams):
    """Eigenvalues ``(c_n(t), d_n(t))`` of the propagator functions on ``|n>``.

    ``n`` and ``t`` broadcast against each other, so passing
    ``n=np.arange(N)[None, :]`` and ``t=times[:, None]`` returns arrays of
    shape ``(len(times), N)``.
    """
    n_arr = np.asarray(n, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    Om = np.sqrt(p.delta**2 + 4.0 * p.g**2 * n_arr)
    Om, t_b = np.broadcast_arrays(Om, t_arr)
    phase = np.exp(0.5j * p.delta * t_b)
    half = 0.5 * Om * t_b
    small = Om < _OMEGA_EPS
    safe = np.where(small, 1.0, Om)
    # Omega -> 0 only when n = 0 and delta = 0: sin(x)/x limits
    ratio_sin = np.where(small, 0.5 * t_b, np.sin(half) / safe)
    c = phase * (np.cos(half) - 1j * p.delta * ratio_sin)
    d = -1j * phase * 2.0 * p.g * ratio_sin
    if c.ndim == 0:
        return complex(c), complex(d)
    return c, d


def dressed_level(n: int, p: ModelParams) -> DressedLevel:
    """Amplitudes and energies of the dressed pair ``|Phi_n^+->``, ``n >= 1``."""
    if n < 1:
        raise ValueError("dressed levels start at n = 1; the n = 0 level is |0,0> with E = 0")
    Om = rabi_frequency(n, p)
    if Om == 0.0:
        # resonant and uncoupled: keep the zero-detuning mixing angle
        a = b = math.sqrt(0.5)
    else:
        a = math.sqrt((Om + p.delta) / (2.0 * Om))
        b = math.sqrt(max(Om - p.delta, 0.0) / (2.0 * Om))
    centre = n * p.omega + 0.5 * p.delta
    return DressedLevel(n, a, b, centre + 0.5 * Om, centre - 0.5 * Om)


def dressed_arrays(n_max: int, p: ModelParams):
    """Vectorized ``a_n, b_n, E_n^+, E_n^-`` for ``n = 0..n_max``.

    Index 0 holds the bare ground level: ``a_0 = 1``, ``b_0 = 0`` (so that
    ``|Phi_0^-> = |0,0>``), ``E_0^- = 0`` and ``E_0^+ = +inf`` (no such level).
    """
    n = np.arange(n_max + 1, dtype=float)
    Om = np.sqrt(p.delta**2 + 4.0 * p.g**2 * n)
    a = np.ones_like(n)
    b = np.zeros_like(n)
    Ep = np.full_like(n, np.inf)
    Em = np.zeros_like(n)
    if n_max >= 1:
        k = slice(1, None)
        if Om[1] == 0.0:
            a[k] = b[k] = np.sqrt(0.5)
        else:
            a[k] = np.sqrt((Om[k] + p.delta) / (2.0 * Om[k]))
            b[k] = np.sqrt(np.clip(Om[k] - p.delta, 0.0, None) / (2.0 * Om[k]))
        Ep[k] = n[k] * p.omega + 0.5 * p.delta + 0.5 * Om[k]
        Em[k] = n[k] * p.omega + 0.5 * p.delta - 0.5 * Om[k]
    return a, b, Ep, Em


def lower_energy(n: int, p: ModelParams) -> float:
    """``E_n^-`` with the convention ``E_0^- = 0``."""
    if n == 0:
        return 0.0
    return dressed_level(n, p).E_minus


def _crossings(p: ModelParams):
    """Yield ``gbar_1, gbar_2, ...`` in increasing order."""
    w, D = p.omega, p.delta
    g1_sq = w * w + w * D
    if g1_sq <= 0:
        raise ValueError(f"no first crossing for omega={w}, delta={D}: omega**2 + omega*delta <= 0")
    g_prev = math.sqrt(g1_sq)
    yield g_prev
    k = 2
    while True:
        def gap(g, k=k):
            return (math.sqrt(D * D + 4 * g * g * k)
                    - math.sqrt(D * D + 4 * g * g * (k - 1)) - 2.0 * w)

        # gap(g_prev) <= 0 because Omega_n is concave in n
        lo, hi = g_prev, 4.0 * g_prev
        for _ in range(200):
            if gap(hi) > 0:
                break
            lo, hi = hi, 4.0 * hi
        else:
            raise RuntimeError(f"could not bracket crossing {k} above g={g_prev}")
        g_prev = brentq(gap, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=500)
        yield g_prev
        k += 1


def critical_coupling(i: int, p: ModelParams) -> float:
    """Coupling at which ``E_i^-`` crosses ``E_{i-1}^-``.

    Only ``omega`` and ``delta`` of ``p`` matter. ``i = 1`` has the closed
    form ``sqrt(omega**2 + omega * delta)``; higher crossings solve
    ``Omega_i(g) - Omega_{i-1}(g) = 2 omega`` by bracketed root finding.
    """
    if i < 1:
        raise ValueError("crossing index starts at 1")
    for k, gk in enumerate(_crossings(p), start=1):
        if k == i:
            return gk


def critical_couplings(g_max: float, p: ModelParams) -> list[float]:
    """All crossings ``gbar_i <= g_max``."""
    out = []
    for gk in _crossings(p):
        if gk > g_max:
            return out
        out.append(gk)


class GroundLevel(NamedTuple):
    kind: str  # "unique" or "degenerate"
    k: int


def ground_level_index(g: float, p: ModelParams, crossing_tol: float = CROSSING_TOL) -> GroundLevel:
    """Index ``k`` of the lowest dressed level ``|Phi_k^->`` at coupling ``g``.

    Returns ``kind="degenerate"`` with the index ``k`` of the crossing when
    ``|g - gbar_k| <= crossing_tol``; the ground space is then spanned by
    ``|Phi_{k-1}^->`` and ``|Phi_k^->``.
    """
    if g < 0:
        raise ValueError("g must be non-negative")
    for k, gk in enumerate(_crossings(p)):
        if abs(g - gk) <= crossing_tol:
            return GroundLevel("degenerate", k + 1)
        if g < gk:
            return GroundLevel("unique", k)


def ground_energy(p: ModelParams) -> float:
    """Lowest eigenvalue of the full Hamiltonian."""
    return lower_energy(ground_level_index(p.g, p).k, p)
