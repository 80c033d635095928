"""Closed-form special cases, figure scenarios, sweeps and time suprema."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .distance import gibbs_correlations, qubit_distance_arrays
from .dynamics import reduced_populations_and_coherence
from .model import (CROSSING_TOL, ModelParams, critical_coupling, dressed_arrays,
                    ground_level_index, jc_coefficients)
from .states import (DEFAULT_TAIL_TOL, FieldState, QubitState, TotalState, gibbs_coefficients,
                     product_state, pure_entangled)

ZERO_TEMPERATURE_BETA = 100.0
DIP_HALF_WIDTH = 0.1


@dataclass(frozen=True)
class TimeGrid:
    """Uniform window ``[0, t_max]`` split into ``steps`` intervals."""

    t_max: float = 200.0
    steps: int = 20000
    refinement: str = "local"

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.steps < 2:
            raise ValueError(f"steps must be at least 2, got {self.steps}")
        if self.refinement not in ("none", "local"):
            raise ValueError(f"refinement must be 'none' or 'local', got {self.refinement!r}")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)


@dataclass
class SweepTable:
    """Scalar quantity sampled on a (g, beta) grid, or energy rows over g.

    ``values[i, j]`` belongs to ``axes[0]`` index ``i`` and ``axes[1]`` index ``j``.
    """

    quantity: str
    axes: dict[str, np.ndarray]
    values: np.ndarray
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        shape = tuple(len(v) for v in self.axes.values())
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match axes {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"sweep table {self.quantity!r} contains non-finite values")


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    distance: np.ndarray
    bound: float | None = None


# ---------------------------------------------------------------- trajectories

def distance_trajectory(r1: TotalState, r2: TotalState, grid: TimeGrid | Sequence[float],
                        p: ModelParams) -> Trajectory:
    """``D(rho^1_S(t), rho^2_S(t))`` sampled on ``grid``."""
    t = grid.times() if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    a11, a10 = reduced_populations_and_coherence(r1, t, p)
    b11, b10 = reduced_populations_and_coherence(r2, t, p)
    return Trajectory(t, qubit_distance_arrays(a11, a10, b11, b10))


def pure_state_distance_closed_form(alpha: complex, beta_amp: complex, n: int, m: int, t,
                                    p: ModelParams):
    """Reduced distance between ``alpha|0,n> + beta|1,m>`` and its marginal product.

    For ``m == n`` the state is a product and the distance vanishes. For
    ``m == n - 2`` the evolved state also carries a qubit coherence through
    the shared Fock level ``n - 1``, which enters the distance in quadrature.
    """
    t_arr = np.asarray(t, dtype=float)
    if n == m:
        return np.zeros_like(t_arr) if t_arr.ndim else 0.0
    idx = np.array([m + 1, n, m, n + 1])
    c, d = jc_coefficients(idx, t_arr[..., None], p)
    c2 = np.abs(c) ** 2
    ab2 = abs(alpha * beta_amp) ** 2
    pop = ab2 * (c2[..., 0] - c2[..., 1] + c2[..., 2] - c2[..., 3])
    coh = np.zeros_like(t_arr)
    if m == n - 1:
        cn, dn = jc_coefficients(n, t_arr, p)
        pop = pop + 2.0 * math.sqrt(n) * np.real(np.conj(alpha) * beta_amp * np.conj(dn) * cn)
    elif m == n - 2:
        coh = math.sqrt(n * (n - 1)) * abs(alpha * beta_amp) * np.abs(d[..., 1] * d[..., 0])
    out = np.sqrt(pop**2 + coh**2)
    return float(out) if out.ndim == 0 else out


def pure_state_asymptotic(alpha: complex, beta_amp: complex, n: int, m: int, t, p: ModelParams):
    """Large-photon-number form of :func:`pure_state_distance_closed_form`."""
    if p.g == 0 or min(n, m) < 25.0 * p.delta**2 / (4.0 * p.g**2):
        warnings.warn("pure_state_asymptotic assumes n, m >> delta**2 / (4 g**2)", RuntimeWarning,
                      stacklevel=2)
    t = np.asarray(t, dtype=float)
    if n == m:
        return np.zeros_like(t) if t.ndim else 0.0
    g = p.g
    ab = abs(alpha * beta_amp)
    pop = ab * ab * (np.cos(g * math.sqrt(m + 1) * t) ** 2 - np.cos(g * math.sqrt(n) * t) ** 2
                     + np.cos(g * math.sqrt(m) * t) ** 2 - np.cos(g * math.sqrt(n + 1) * t) ** 2)
    coh = np.zeros_like(t)
    if m == n - 1:
        pop = pop - (np.conj(alpha) * beta_amp).imag * np.sin(2.0 * g * math.sqrt(n) * t)
    elif m == n - 2:
        coh = ab * np.abs(np.sin(g * math.sqrt(n) * t) * np.sin(g * math.sqrt(n - 1) * t))
    out = np.sqrt(pop**2 + coh**2)
    return float(out) if out.ndim == 0 else out


def pure_state_bound(alpha: complex, beta_amp: complex) -> float:
    """Correlations ``|alpha beta|**2 + |alpha beta|`` of an entangled pure state."""
    x = abs(alpha * beta_amp)
    return x * x + x


def gibbs_product_distance(p: ModelParams, beta: float, t, tail_tol: float = DEFAULT_TAIL_TOL):
    """Reduced distance between the Gibbs state and its marginal product at times ``t``.

    Uses populations only: the Gibbs reduced state is stationary and the
    product state never develops qubit coherence.
    """
    gc = gibbs_coefficients(p, beta, tail_tol)
    t_arr = np.asarray(t, dtype=float)
    N = gc.n_max + 1
    n = np.arange(N)
    rho00 = gc.qubit_ground_population()
    field_pop = gc.field_populations()
    _, d = jc_coefficients(np.arange(N + 1), t_arr[..., None], p)
    d2 = np.abs(d) ** 2
    val = ((rho00 - 1.0) * ((n + 1) * field_pop * d2[..., 1:]).sum(axis=-1)
           + rho00 * (n * field_pop * d2[..., :N]).sum(axis=-1))
    out = np.abs(val)
    return float(out) if out.ndim == 0 else out


def large_coupling_estimate(k: int, g: float, t):
    """``|sin(2 sqrt(k) g t) sin(g t / sqrt(k))| / 4``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    t = np.asarray(t, dtype=float)
    out = 0.25 * np.abs(np.sin(2.0 * math.sqrt(k) * g * t) * np.sin(g * t / math.sqrt(k)))
    return float(out) if out.ndim == 0 else out


# -------------------------------------------------------------------- suprema

def supremum_over_time(evaluator: Callable[[np.ndarray], np.ndarray], grid: TimeGrid,
                       n_candidates: int = 3, xatol: float = 1e-6) -> tuple[float, float]:
    """Largest value of ``evaluator`` on ``[0, t_max]``.

    ``evaluator`` must accept a 1-D array of times. The uniform grid maximum
    is refined by bounded scalar search around the best few local maxima;
    the result is never below the best grid sample.
    """
    t = grid.times()
    v = np.asarray(evaluator(t), dtype=float)
    bad = ~np.isfinite(v)
    if bad.any():
        raise FloatingPointError(f"evaluator returned {v[bad][0]} at t={t[bad][0]}")
    best = int(np.argmax(v))
    t_star, d_star = float(t[best]), float(v[best])
    if grid.refinement == "none":
        return t_star, d_star

    peaks = np.nonzero((v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    for edge in (0, len(v) - 1):
        peaks = np.append(peaks, edge)
    order = peaks[np.argsort(v[peaks])[::-1]][:n_candidates]

    def neg(x):
        val = float(np.asarray(evaluator(np.array([x])), dtype=float)[0])
        if not math.isfinite(val):
            raise FloatingPointError(f"evaluator returned {val} at t={x}")
        return -val

    for k in order:
        lo, hi = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
        if -res.fun > d_star:
            t_star, d_star = float(res.x), float(-res.fun)
    return t_star, d_star


def gibbs_product_supremum(p: ModelParams, beta: float, grid: TimeGrid,
                           tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """Time supremum of :func:`gibbs_product_distance` over the window of ``grid``."""
    gc_p = p  # bind for the closure
    return supremum_over_time(lambda t: gibbs_product_distance(gc_p, beta, t, tail_tol), grid)


# ------------------------------------------------------- zero temperature

def _correlations_mixture_pair(i: int, p: ModelParams) -> float:
    """Correlations of ``(|Phi_{i-1}><Phi_{i-1}| + |Phi_i><Phi_i|) / 2`` in closed form."""
    a, b, _, _ = dressed_arrays(i, p)
    ap, bp, ai, bi = a[i - 1], b[i - 1], a[i], b[i]
    alpha = bp**2 / 4 * (ap**2 + ai**2)
    gamma1 = bp**2 / 2 - bp**2 / 4 * (bp**2 + bi**2)
    delta1 = ap**2 / 2 - 0.25 * (ap**2 + ai**2) * (ap**2 + bi**2)
    eps1 = -ap * bp / 2
    gamma2 = bi**2 / 2 - 0.25 * (bp**2 + bi**2) * (ap**2 + bi**2)
    eps2 = -ai * bi / 2
    delta2 = ai**2 / 2 - ai**2 / 4 * (ap**2 + ai**2)
    chi = ai**2 / 4 * (bp**2 + bi**2)

    def block(g, d, e):
        root = math.sqrt((g - d) ** 2 + 4 * e * e)
        return 0.5 * abs(g + d + root) + 0.5 * abs(g + d - root)

    return 0.5 * (alpha + block(gamma1, delta1, eps1) + block(gamma2, delta2, eps2) + chi)


def dressed_correlations(p: ModelParams) -> float:
    """Correlations of any dressed state ``|Phi_i^->``, ``i >= 1``."""
    x = p.g**2 / (p.delta**2 + 4.0 * p.g**2)
    return x + math.sqrt(x)


def zero_temperature_correlations(p: ModelParams, g: float | None = None,
                                  crossing_tol: float = CROSSING_TOL) -> float:
    """Correlations of the ground level (beta -> infinity) at coupling ``g``.

    Zero below the first crossing, the dressed-state value between crossings
    and the equal mixture of the two degenerate levels at a crossing.
    """
    p = p if g is None else p.with_g(g)
    kind, k = ground_level_index(p.g, p, crossing_tol)
    if kind == "degenerate":
        return _correlations_mixture_pair(k, p)
    if k == 0:
        return 0.0
    return dressed_correlations(p)


def level_diagram(p: ModelParams, g_grid, n_levels: int = 4) -> SweepTable:
    """Lower dressed energies ``E_n^-(g)`` for ``n = 0..n_levels`` (``E_0^- = 0``)."""
    g_grid = np.asarray(g_grid, dtype=float)
    rows = np.empty((len(g_grid), n_levels + 1))
    for i, g in enumerate(g_grid):
        _, _, _, Em = dressed_arrays(n_levels, p.with_g(g))
        rows[i] = Em
    return SweepTable("lower_energies", {"g": g_grid, "level": np.arange(n_levels + 1)}, rows,
                      {"omega": p.omega, "delta": p.delta})


def find_dip(g_grid, values, lo: float, hi: float) -> tuple[float, float]:
    """Location and value of the minimum of ``values`` for ``lo <= g <= hi``."""
    g_grid = np.asarray(g_grid, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (g_grid >= lo) & (g_grid <= hi)
    if not mask.any():
        raise ValueError(f"no grid points in [{lo}, {hi}]")
    idx = np.nonzero(mask)[0]
    k = idx[np.argmin(values[idx])]
    return float(g_grid[k]), float(values[k])


def dip_near_crossing(g_grid, values, i: int, p: ModelParams,
                      half_width: float = DIP_HALF_WIDTH) -> tuple[float, float]:
    gi = critical_coupling(i, p)
    return find_dip(g_grid, values, gi - half_width, gi + half_width)


# ------------------------------------------------------------------- sweeps

SWEEP_QUANTITIES = ("gibbs_correlations", "supremum_of_gibbs_product_distance", "zero_T_correlations")


def _threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("JCM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"JCM_THREADS must be an integer, got {env!r}") from None
    return 1


def _point(quantity: str, p: ModelParams, beta: float, grid: TimeGrid, tail_tol: float) -> float:
    if quantity == "gibbs_correlations":
        return gibbs_correlations(p, beta, tail_tol)
    if quantity == "supremum_of_gibbs_product_distance":
        return gibbs_product_supremum(p, beta, grid, tail_tol)[1]
    if quantity == "zero_T_correlations":
        return zero_temperature_correlations(p)
    raise ValueError(f"unknown sweep quantity {quantity!r}; choose from {SWEEP_QUANTITIES}")


def sweep(quantity: str, g_grid, beta_grid, p: ModelParams, grid: TimeGrid | None = None,
          tail_tol: float = DEFAULT_TAIL_TOL, threads: int | None = None) -> SweepTable:
    """Evaluate ``quantity`` on the Cartesian ``g x beta`` grid.

    Points are independent; with ``threads > 1`` (or ``JCM_THREADS``) they
    run in a thread pool and are gathered back in grid order.
    """
    if quantity not in SWEEP_QUANTITIES:
        raise ValueError(f"unknown sweep quantity {quantity!r}; choose from {SWEEP_QUANTITIES}")
    grid = grid or TimeGrid()
    g_grid = np.asarray(g_grid, dtype=float)
    beta_grid = np.asarray(beta_grid, dtype=float)
    jobs = [(i, j, g, b) for i, g in enumerate(g_grid) for j, b in enumerate(beta_grid)]

    def run(job):
        i, j, g, b = job
        try:
            return _point(quantity, p.with_g(g), b, grid, tail_tol)
        except Exception as exc:
            raise RuntimeError(f"{quantity} failed at g={g}, beta={b}: {exc}") from exc

    n_threads = _threads(threads)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    values = np.empty((len(g_grid), len(beta_grid)))
    for (i, j, _, _), v in zip(jobs, results):
        values[i, j] = v
    meta = {"omega": p.omega, "delta": p.delta, "tail_tol": tail_tol}
    if quantity == "supremum_of_gibbs_product_distance":
        meta.update(t_max=grid.t_max, steps=grid.steps)
    return SweepTable(quantity, {"g": g_grid, "beta": beta_grid}, values, meta)


# --------------------------------------------------------------- scenarios

@dataclass(frozen=True)
class Scenario:
    name: str
    r1: TotalState
    r2: TotalState
    params: ModelParams
    bound: float
    description: str


def two_level_field(n: int, weight_n: float) -> FieldState:
    """``w |n><n| + (1 - w) |n-1><n-1|``."""
    pops = np.zeros(n + 1)
    pops[n] = weight_n
    pops[n - 1] = 1.0 - weight_n
    return FieldState.from_populations(pops)


def scenario_fig1a(alpha1_sq: float = 7 / 9, alpha2_sq: float = 8 / 9, n: int = 7,
                   delta: float = 0.1, g: float = 1.0, omega: float = 1.0) -> Scenario:
    """Same qubit state, two different number-state mixtures for the field."""
    rho_S = QubitState(rho11=1.0 - alpha1_sq, rho00=alpha1_sq)
    r1 = product_state(rho_S, two_level_field(n, alpha1_sq))
    r2 = product_state(rho_S, two_level_field(n, alpha2_sq))
    return Scenario("fig1a", r1, r2, ModelParams(omega, delta, g), abs(alpha1_sq - alpha2_sq),
                    f"product states, |alpha1|^2={alpha1_sq:.6g}, |alpha2|^2={alpha2_sq:.6g}, n={n}")


def scenario_fig1b(alpha: complex = 1j * math.sqrt(3 / 7), beta_amp: complex = math.sqrt(4 / 7),
                   n: int = 1, delta: float = 0.1, g: float = 1.0, omega: float = 1.0) -> Scenario:
    """Entangled ``alpha|0,n> + beta|1,n-1>`` against a product with swapped qubit populations."""
    a2, b2 = abs(alpha) ** 2, abs(beta_amp) ** 2
    r1 = pure_entangled(alpha, beta_amp, n, n - 1)
    rho_S = QubitState(rho11=a2, rho00=b2)
    r2 = product_state(rho_S, two_level_field(n, a2).padded(r1.n_max))
    return Scenario("fig1b", r1, r2, ModelParams(omega, delta, g), 0.5 * (1 + a2**2 + b2**2),
                    f"pure alpha|0,{n}> + beta|1,{n - 1}> vs product, |alpha|^2={a2:.6g}")
