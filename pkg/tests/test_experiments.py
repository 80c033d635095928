import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jctrace.distance import correlations, gibbs_correlations, outside_information, trace_distance_qubit
from jctrace.experiments import (SweepTable, TimeGrid, dip_near_crossing, distance_trajectory, find_dip,
                                 gibbs_product_distance, gibbs_product_supremum, large_coupling_estimate,
                                 level_diagram, pure_state_asymptotic, pure_state_bound,
                                 pure_state_distance_closed_form, scenario_fig1a, scenario_fig1b,
                                 supremum_over_time, sweep, zero_temperature_correlations)
from jctrace.model import ModelParams, critical_coupling, ground_level_index
from jctrace.states import gibbs_state, marginals, product_of_marginals, pure_entangled, random_state

from conftest import seeds

P = ModelParams(3.0, 0.5, 5.5)
FIG1 = ModelParams(1.0, 0.1, 1.0)


def test_time_grid_validation():
    assert TimeGrid().times().size == 20001
    for bad in (dict(t_max=0.0), dict(steps=1), dict(refinement="global")):
        with pytest.raises(ValueError):
            TimeGrid(**bad)


def test_sweep_table_validation():
    axes = {"g": np.arange(3.0), "beta": np.arange(2.0)}
    SweepTable("q", axes, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        SweepTable("q", axes, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        SweepTable("q", axes, np.full((3, 2), np.nan))


def test_supremum_examples():
    grid = TimeGrid(10.0, 1000)
    assert supremum_over_time(lambda t: np.full_like(t, 0.3), grid)[1] == 0.3
    t_star, d_star = supremum_over_time(lambda t: np.sin(t) ** 2, grid)
    assert d_star == pytest.approx(1.0, abs=1e-12)
    assert math.remainder(t_star - math.pi / 2, math.pi) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(FloatingPointError, match="t="):
        supremum_over_time(lambda t: np.where(t > 5, np.nan, 0.0), grid)


@settings(max_examples=30, deadline=None)
@given(freq=st.floats(0.3, 7.0), phase=st.floats(0, 6.3))
def test_supremum_never_below_grid(freq, phase):
    grid = TimeGrid(20.0, 200)
    f = lambda t: np.cos(freq * t + phase) * np.exp(-0.01 * t)
    t = grid.times()
    t_star, d_star = supremum_over_time(f, grid)
    assert d_star >= f(t).max()
    assert d_star == pytest.approx(float(f(np.array([t_star]))[0]))
    assert supremum_over_time(f, TimeGrid(20.0, 200, "none"))[1] == f(t).max()


def test_identical_states_give_zero_trajectory():
    rho = random_state(np.random.default_rng(0), 4, 2)
    assert np.all(distance_trajectory(rho, rho, TimeGrid(10.0, 100), P).distance == 0.0)


@pytest.mark.parametrize("scenario", [scenario_fig1a, scenario_fig1b])
def test_trajectory_respects_information_bound(scenario):
    sc = scenario()
    traj = distance_trajectory(sc.r1, sc.r2, TimeGrid(200.0, 20000), sc.params)
    d0 = trace_distance_qubit(marginals(sc.r1)[0], marginals(sc.r2)[0])
    assert traj.distance[0] == pytest.approx(d0, abs=1e-15)
    assert traj.distance.max() <= d0 + outside_information(sc.r1, sc.r2) + 1e-9
    assert d0 + outside_information(sc.r1, sc.r2) == pytest.approx(sc.bound, abs=1e-12)


@pytest.mark.parametrize("n,m", [(1, 0), (4, 3), (5, 3), (2, 6), (0, 3), (7, 0), (3, 3)])
def test_pure_closed_form_matches_trajectory(n, m):
    alpha, beta = 0.6 * np.exp(0.4j), 0.8
    rho = pure_entangled(alpha, beta, n, m)
    t = np.linspace(0, 40, 400)
    ref = distance_trajectory(rho, product_of_marginals(rho), t, FIG1).distance
    np.testing.assert_allclose(pure_state_distance_closed_form(alpha, beta, n, m, t, FIG1), ref, atol=1e-10)
    assert pure_state_distance_closed_form(alpha, beta, n, m, 0.0, FIG1) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n,m", [(5, 4), (6, 4), (3, 8)])
def test_asymptotic_form(n, m):
    alpha, beta = 1j * math.sqrt(3 / 7), math.sqrt(4 / 7)
    t = np.linspace(0, 30, 300)
    resonant = ModelParams(1.0, 0.0, 1.0)
    np.testing.assert_allclose(pure_state_asymptotic(alpha, beta, n, m, t, resonant),
                               pure_state_distance_closed_form(alpha, beta, n, m, t, resonant), atol=1e-12)
    # detuned: n, m >= 100 delta^2 / 4 g^2 keeps the two forms within 5 %
    p = ModelParams(1.0, 2.0, 1.0)
    big_n, big_m = 100 + n, 100 + m
    exact = pure_state_distance_closed_form(alpha, beta, big_n, big_m, np.linspace(0, 0.2, 50), p)
    approx = pure_state_asymptotic(alpha, beta, big_n, big_m, np.linspace(0, 0.2, 50), p)
    assert np.max(np.abs(exact - approx)) <= 5e-2 * max(exact.max(), 1e-12)
    with pytest.warns(RuntimeWarning):
        pure_state_asymptotic(alpha, beta, 1, 0, t, p)


def test_pure_bound_examples():
    s = 1 / math.sqrt(2)
    assert pure_state_bound(0.0, 1.0) == 0.0
    assert pure_state_bound(s, s) == pytest.approx(0.75)
    a, b = 1j * math.sqrt(3 / 7), math.sqrt(4 / 7)
    assert pure_state_bound(a, b) == pytest.approx(12 / 49 + 2 * math.sqrt(3) / 7)
    for n, m in [(1, 0), (2, 5), (4, 0)]:
        assert correlations(pure_entangled(a, b, n, m)) == pytest.approx(pure_state_bound(a, b), abs=1e-10)


@pytest.mark.parametrize("g,beta", [(6.0, 5.0), (1.7, 2.0), (3.0, 100.0), (9.0, 0.7)])
def test_gibbs_product_formula_matches_trajectory(g, beta):
    p = P.with_g(g)
    rho = gibbs_state(p, beta)
    t = np.linspace(0, 30, 300)
    ref = distance_trajectory(rho, product_of_marginals(rho), t, p).distance
    np.testing.assert_allclose(gibbs_product_distance(p, beta, t), ref, atol=1e-9)
    assert gibbs_product_distance(p, beta, 0.0) == 0.0


def test_fig5_trajectory_below_bound():
    p = P.with_g(6.0)
    d = gibbs_product_distance(p, 5.0, TimeGrid().times())
    assert d.max() < gibbs_correlations(p, 5.0)


def test_large_coupling_estimate():
    assert large_coupling_estimate(3, 20.0, 0.0) == 0.0
    t = np.linspace(0, 50, 5001)
    assert np.all(large_coupling_estimate(5, 7.3, t) <= 0.25)
    p = P.with_g(20.0)
    kind, k = ground_level_index(20.0, p)
    t = np.linspace(0, 5 / 20, 2001)
    assert np.max(np.abs(gibbs_product_distance(p, 100.0, t) - large_coupling_estimate(k, 20.0, t))) <= 0.05
    with pytest.raises(ValueError):
        large_coupling_estimate(0, 1.0, 1.0)


def test_zero_temperature_examples():
    assert zero_temperature_correlations(P, 1.7) == 0.0
    assert zero_temperature_correlations(P, 5.5) == pytest.approx(0.7489688, abs=1e-6)
    g2 = critical_coupling(2, P)
    dip = zero_temperature_correlations(P, g2)
    assert dip < zero_temperature_correlations(P, g2 - 0.1)
    assert dip < zero_temperature_correlations(P, g2 + 0.1)
    assert gibbs_correlations(P.with_g(g2), 100.0) == pytest.approx(dip, abs=5e-3)


@pytest.mark.parametrize("g", [1.7, 2.5, 4.0, 5.5, 6.5, 8.5, 10.5, 12.0])
def test_zero_temperature_matches_low_temperature(g):
    assert zero_temperature_correlations(P, g) == pytest.approx(gibbs_correlations(P.with_g(g), 100.0), abs=5e-3)


def test_level_diagram():
    g = np.linspace(0, 12, 2401)
    table = level_diagram(P, g, 4)
    E = table.values
    assert np.all(E[:, 0] == 0)
    cross1 = g[np.argmin(np.abs(E[:, 1]))]
    assert cross1 == pytest.approx(3.2404, abs=0.005)
    above = np.nonzero(g > 5)[0]
    cross2 = g[above[np.argmin(np.abs(E[above, 2] - E[above, 1]))]]
    assert cross2 == pytest.approx(7.24569, abs=0.005)


def test_find_dip():
    g = np.linspace(0, 10, 101)
    v = (g - 7.3) ** 2
    assert find_dip(g, v, 6.0, 9.0)[0] == pytest.approx(7.3)
    with pytest.raises(ValueError):
        find_dip(g, v, 11.0, 12.0)
    g2 = critical_coupling(2, P)
    gg = np.arange(6.0, 9.0, 0.01)
    assert dip_near_crossing(gg, np.abs(gg - g2), 2, P)[0] == pytest.approx(g2, abs=0.01)


def test_fig3_sections():
    betas = np.geomspace(0.01, 100, 30)
    low = sweep("gibbs_correlations", [1.7], betas, P).values[0]
    peak = int(np.argmax(low))
    assert 0 < peak < len(betas) - 1
    assert low[-1] < 1e-6 and low[peak] > 0.1
    assert np.all(np.diff(low[peak:]) <= 1e-15)
    high = sweep("gibbs_correlations", [5.5], betas, P).values[0]
    assert np.all(np.diff(high) >= -1e-12)
    assert high[-1] == pytest.approx(0.7489688, abs=1e-3)


def test_sweep_threads_deterministic(monkeypatch):
    g = np.linspace(5, 9, 6)
    b = [5.0, 100.0]
    serial = sweep("gibbs_correlations", g, b, P, threads=1)
    monkeypatch.setenv("JCM_THREADS", "4")
    parallel = sweep("gibbs_correlations", g, b, P)
    np.testing.assert_array_equal(serial.values, parallel.values)
    monkeypatch.setenv("JCM_THREADS", "many")
    with pytest.raises(ValueError, match="JCM_THREADS"):
        sweep("gibbs_correlations", g, b, P)


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep("entropy", [1.0], [1.0], P)
    with pytest.raises(RuntimeError, match="g=5.5, beta=1e-06"):
        sweep("gibbs_correlations", [5.5], [1e-6], P)


def test_sweep_quantities():
    grid = TimeGrid(50.0, 2000)
    sup = sweep("supremum_of_gibbs_product_distance", [6.0], [5.0], P, grid=grid)
    assert sup.values[0, 0] == pytest.approx(gibbs_product_supremum(P.with_g(6.0), 5.0, grid)[1])
    assert sup.params["t_max"] == 50.0
    zt = sweep("zero_T_correlations", [1.7, 5.5], [np.inf], P)
    np.testing.assert_allclose(zt.values[:, 0], [0.0, 0.7489688], atol=1e-6)


def test_supremum_surface_dips_at_crossing():
    g2 = critical_coupling(2, P)
    g = np.round(np.arange(g2 - 0.3, g2 + 0.3, 0.02), 10)
    vals = sweep("supremum_of_gibbs_product_distance", g, [100.0], P, grid=TimeGrid(200.0, 20000)).values[:, 0]
    loc, depth = dip_near_crossing(g, vals, 2, P)
    assert depth < vals[0] - 0.01 and depth < vals[-1] - 0.01
