"""Analytic-versus-oracle comparison suites shared by the CLI and the tests."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .distance import gibbs_correlations
from .dynamics import reduced_populations_and_coherence, sector_unitaries
from .model import ModelParams
from .oracle import (ORACLE_PADDING, InteractionPropagator, oracle_correlations, oracle_gibbs,
                     oracle_unitary_interaction, partial_trace_field)
from .states import gibbs_state, random_state

SUITES = ("dynamics", "gibbs", "unitary", "correlations")

GIBBS_GRID = ((1.7, 5.5, 8.0), (0.5, 5.0, 100.0))


class CheckResult(NamedTuple):
    check: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)


def check_dynamics(rng: np.random.Generator, p: ModelParams, n_states: int = 50, n_times: int = 20,
                   support: int = 10, max_rank: int = 4, t_max: float = 20.0) -> CheckResult:
    """Reduced-state series against dense conjugation for random mixed initial states."""
    worst = 0.0
    n_max = support + 2
    setups = [(q, InteractionPropagator(q, n_max + ORACLE_PADDING)) for q in (p.with_g(1.0), p.with_g(5.5))]
    for i in range(n_states):
        q, prop = setups[i % len(setups)]
        rho0 = random_state(rng, n_max, rank=int(rng.integers(1, max_rank + 1)), support=support)
        times = rng.uniform(0.0, t_max, n_times)
        r11, r10 = reduced_populations_and_coherence(rho0, times, q)
        padded = rho0.padded(prop.n_max).matrix
        for k, t in enumerate(times):
            U = prop(t)
            red = partial_trace_field(U @ padded @ U.conj().T)
            worst = max(worst, abs(red[1, 1].real - r11[k]), abs(red[1, 0] - r10[k]))
    return CheckResult("reduced_dynamics_vs_oracle", worst, 1e-9)


def check_gibbs(p: ModelParams, grid=GIBBS_GRID, padding: int = 5) -> CheckResult:
    """Analytic Gibbs state against the dense thermal state on a (g, beta) grid."""
    worst = 0.0
    for g in grid[0]:
        for beta in grid[1]:
            q = p.with_g(g)
            rho = gibbs_state(q, beta)
            ref = oracle_gibbs(q, beta, rho.n_max + padding).matrix
            worst = max(worst, float(np.abs(rho.padded(rho.n_max + padding).matrix - ref).max()))
    return CheckResult("gibbs_state_vs_oracle", worst, 1e-8)


def check_unitary(p: ModelParams, n_max: int = 12, times=(0.3, 2.0, 17.0)) -> CheckResult:
    """Sector blocks of the propagator against the dense interaction-picture unitary."""
    worst = 0.0
    for g in (0.7, 5.5):
        q = p.with_g(g)
        for t in times:
            U = oracle_unitary_interaction(q, t, n_max)
            blocks = sector_unitaries(n_max - 2, t, q)
            worst = max(worst, abs(U[0, 0] - 1.0))
            for k, blk in enumerate(blocks, start=1):
                i = 2 * k - 1
                worst = max(worst, float(np.abs(U[i:i + 2, i:i + 2] - blk).max()))
    return CheckResult("propagator_vs_oracle", worst, 1e-9)


def check_correlations(p: ModelParams, grid=((1.7, 5.5, 7.2456884), (0.5, 5.0, 100.0))) -> CheckResult:
    """Block formula for Gibbs correlations against a dense eigensolve."""
    worst = 0.0
    for g in grid[0]:
        for beta in grid[1]:
            q = p.with_g(g)
            worst = max(worst, abs(gibbs_correlations(q, beta) - oracle_correlations(gibbs_state(q, beta))))
    return CheckResult("gibbs_correlations_vs_oracle", worst, 1e-10)


def run_suite(name: str, rng: np.random.Generator, p: ModelParams, n_states: int = 50,
              n_times: int = 20) -> list[CheckResult]:
    if name == "dynamics":
        return [check_dynamics(rng, p, n_states, n_times)]
    if name == "gibbs":
        return [check_gibbs(p)]
    if name == "unitary":
        return [check_unitary(p)]
    if name == "correlations":
        return [check_correlations(p)]
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
