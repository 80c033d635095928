import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jctrace.distance import trace_distance_qubit
from jctrace.dynamics import dynamical_map, evolve_total, reduced_state_at, reduced_trajectory
from jctrace.experiments import scenario_fig1a, scenario_fig1b
from jctrace.model import ModelParams
from jctrace.oracle import InteractionPropagator, oracle_reduced_state
from jctrace.states import (FieldState, QubitState, TruncationLeakWarning, dressed_state_vector,
                            gibbs_state, marginals, product_state, pure_entangled, pure_state,
                            random_state)

from conftest import seeds

P = ModelParams(3.0, 0.5, 5.5)


def _close(q1, q2, tol):
    return abs(q1.rho11 - q2.rho11) <= tol and abs(q1.rho10 - q2.rho10) <= tol


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n_max=st.integers(1, 6))
def test_time_zero_gives_marginal(seed, n_max):
    rho = random_state(np.random.default_rng(seed), n_max, 2)
    assert _close(reduced_state_at(rho, 0.0, P), marginals(rho)[0], 1e-14)


def test_gibbs_reduced_state_is_stationary():
    p = P.with_g(6.0)
    rho = gibbs_state(p, 5.0)
    traj = reduced_trajectory(rho, np.linspace(0, 200, 801), p)
    r11 = np.array([q.rho11 for q in traj])
    r10 = np.array([q.rho10 for q in traj])
    assert np.ptp(r11) <= 1e-8 and np.abs(r10).max() <= 1e-8


def test_fig1b_state_matches_oracle():
    p = ModelParams(1.0, 0.1, 1.0)
    rho = pure_entangled(1j * math.sqrt(3 / 7), math.sqrt(4 / 7), 1, 0)
    prop = InteractionPropagator(p, rho.n_max + 8)
    for t in np.linspace(0, 60, 50):
        assert _close(reduced_state_at(rho, t, p), oracle_reduced_state(rho, t, p, propagator=prop), 1e-9)


def test_evolve_total_identities():
    rho = random_state(np.random.default_rng(4), 5, 3, support=3)
    np.testing.assert_allclose(evolve_total(rho, 0.0, P).matrix, rho.matrix, atol=1e-15)
    vac = pure_entangled(1.0, 0.0, 0, 0)
    np.testing.assert_allclose(evolve_total(vac, 7.3, P).matrix, vac.matrix, atol=1e-15)
    resonant = P.with_g(5.5)
    resonant = ModelParams(resonant.omega, 0.0, resonant.g)
    for k in (1, 2, 4):
        phi = pure_state(dressed_state_vector(k, -1, resonant, k + 1))
        np.testing.assert_allclose(evolve_total(phi, 3.1, resonant).matrix, phi.matrix, atol=1e-10)


def test_dressed_state_only_picks_up_free_phase():
    # off resonance the interaction picture rotates |1,n-1><0,n| by exp(i delta t)
    t = 3.1
    for k in (1, 3):
        phi = pure_state(dressed_state_vector(k, -1, P, k + 1))
        h0 = np.array([(P.omega0 if i % 2 else 0.0) + (i // 2) * P.omega for i in range(phi.dim)])
        phase = np.exp(1j * h0 * t)
        expected = phase[:, None] * phi.matrix * phase.conj()[None, :]
        np.testing.assert_allclose(evolve_total(phi, t, P).matrix, expected, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, t=st.floats(0, 50))
def test_evolve_total_consistent_with_series(seed, t):
    rho = random_state(np.random.default_rng(seed), 6, 2, support=4)
    out = evolve_total(rho, t, P)
    assert out.trace() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(out.matrix, out.matrix.conj().T, atol=1e-15)
    assert _close(marginals(out)[0], reduced_state_at(rho, t, P), 1e-12)


def test_evolve_total_warns_on_leak():
    rho = pure_entangled(0.0, 1.0, 0, 3)  # |1,3> with n_max = 4: fine
    top = pure_state(np.eye(2 * 5)[2 * 4 + 1])  # |1,4> sits at the truncation edge
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        evolve_total(rho, 0.4, P)
    with pytest.warns(TruncationLeakWarning):
        evolve_total(top, 0.4, P)


def test_dynamical_map_examples():
    vac = FieldState.number(0, 1)
    p = ModelParams(1.0, 0.0, 0.8)
    out = dynamical_map(QubitState.excited(), vac, math.pi / (2 * p.g), p)
    assert out.rho00 == pytest.approx(1.0, abs=1e-14)
    q = QubitState(0.3, 0.7, 0.2j)
    assert _close(dynamical_map(q, vac, 0.0, p), q, 1e-15)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, t=st.floats(0, 30), lam=st.floats(0, 1))
def test_dynamical_map_linear(seed, t, lam):
    rng = np.random.default_rng(seed)
    f = FieldState.from_populations(rng.dirichlet(np.ones(5)))
    q1, q2 = (marginals(random_state(rng, 1, 1))[0] for _ in range(2))
    mix = QubitState.from_matrix(lam * q1.to_matrix() + (1 - lam) * q2.to_matrix())
    a, b, c = (dynamical_map(q, f, t, P) for q in (q1, q2, mix))
    assert c.rho11 == pytest.approx(lam * a.rho11 + (1 - lam) * b.rho11, abs=1e-12)
    assert c.rho10 == pytest.approx(lam * a.rho10 + (1 - lam) * b.rho10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_contraction_for_common_environment(seed):
    rng = np.random.default_rng(seed)
    f = FieldState.from_populations(rng.dirichlet(np.ones(6)))
    q1, q2 = (marginals(random_state(rng, 1, 1))[0] for _ in range(2))
    d0 = trace_distance_qubit(q1, q2)
    for t in np.linspace(0, 40, 30):
        assert trace_distance_qubit(dynamical_map(q1, f, t, P), dynamical_map(q2, f, t, P)) <= d0 + 1e-12


@pytest.mark.parametrize("scenario", [scenario_fig1a, scenario_fig1b])
def test_populations_never_settle(scenario):
    sc = scenario()
    T = 100.0
    times = np.linspace(T, 2 * T, 4001)
    r11 = np.array([q.rho11 for q in reduced_trajectory(sc.r1, times, sc.params)])
    assert np.max(np.abs(r11 - r11.mean())) > 0.01
