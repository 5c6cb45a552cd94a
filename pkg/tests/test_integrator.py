import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from seirs_control import (
    Constant,
    CostWeights,
    IntegrationDiverged,
    ParameterSet,
    Scenario,
    StateVector,
    TimeGrid,
    Trajectory,
    integrate_adjoint_backward,
    integrate_state_forward,
    make_incidence,
    quadrature_cost,
    table1_default,
)
from seirs_control.model import _adjoint_kernel

GRID = TimeGrid(25.0, 2500)


def zeros(grid, width=2):
    return np.zeros((grid.n_steps + 1, width))


def forward(s: Scenario, grid=GRID, controls=None):
    u = zeros(grid) if controls is None else controls
    return integrate_state_forward(grid, s.initial, u, s.parameters, s.incidence_function)


def population_closed_form(t, N0=1.0, a=0.05, b=0.04, mu=0.05, w=2 * math.pi):
    """Solution of N' = a + b cos(w t) - mu N with N(0) = N0."""
    particular = a / mu + b * (mu * np.cos(w * t) + w * np.sin(w * t)) / (mu**2 + w**2)
    c = N0 - a / mu - b * mu / (mu**2 + w**2)
    return particular + c * np.exp(-mu * t)


def test_grid_nodes():
    g = TimeGrid(25.0, 2500)
    assert g.h == 0.01
    assert len(g.nodes) == 2501
    assert np.all(np.diff(g.nodes) > 0)
    with pytest.raises(ValueError):
        TimeGrid(25.0, 1)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 10)


def test_first_row_is_initial_state():
    s = table1_default()
    x = forward(s)
    assert tuple(x[0]) == tuple(s.initial)
    assert x.shape == (2501, 4)


def test_population_stays_at_equilibrium_without_forcing():
    x = forward(table1_default())
    np.testing.assert_allclose(x.sum(axis=1), 1.0, rtol=0, atol=1e-10)


def test_closed_form_oracle_agrees_with_adaptive_solver():
    sol = solve_ivp(lambda t, n: 0.05 + 0.04 * np.cos(2 * np.pi * t) - 0.05 * n, (0, 25), [1.0],
                    rtol=1e-12, atol=1e-13, dense_output=True)
    t = np.linspace(0, 25, 101)
    np.testing.assert_allclose(sol.sol(t)[0], population_closed_form(t), atol=1e-10)


@pytest.mark.parametrize("per", [0.3, 0.8])
def test_population_follows_closed_form_with_forcing(per):
    x = forward(Scenario(per=per))
    want = population_closed_form(GRID.nodes, b=0.05 * per)
    np.testing.assert_allclose(x.sum(axis=1), want, rtol=0, atol=1e-8)


def test_population_law_holds_under_controls():
    rng = np.random.default_rng(4)
    u = np.column_stack([rng.uniform(0, 0.1, 2501), rng.uniform(0, 0.4, 2501)])
    x = forward(Scenario(per=0.8), controls=u)
    np.testing.assert_allclose(x.sum(axis=1), population_closed_form(GRID.nodes), rtol=0, atol=1e-8)


def test_zero_dynamics_is_identity():
    zero = Constant(0.0)
    params = ParameterSet(zero, zero, zero, zero, zero, zero)
    x0 = StateVector(0.3, 0.2, 0.1, 0.4)
    g = TimeGrid(5.0, 50)
    x = integrate_state_forward(g, x0, zeros(g), params, make_incidence())
    np.testing.assert_array_equal(x, np.tile(x0, (51, 1)))


def test_divergence_names_step():
    s = table1_default()
    params = ParameterSet(Constant(0.05), Constant(1e300), Constant(0.05), Constant(0.0), Constant(0.0),
                          Constant(0.0))
    g = TimeGrid(25.0, 100)
    with pytest.raises(IntegrationDiverged) as err:
        integrate_state_forward(g, s.initial, zeros(g), params, make_incidence())
    assert 1 <= err.value.step <= 100
    assert str(err.value.step) in str(err.value)


def test_controls_shape_checked():
    s = table1_default()
    with pytest.raises(ValueError):
        integrate_state_forward(GRID, s.initial, np.zeros((10, 2)), s.parameters, s.incidence_function)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    per=st.sampled_from([0.0, 0.5, 0.8]),
    shape=st.sampled_from(["noise", "bang", "constant"]),
)
def test_states_stay_nonnegative_for_admissible_controls(seed, per, shape):
    rng = np.random.default_rng(seed)
    n = GRID.n_steps + 1
    if shape == "noise":
        u = np.column_stack([rng.uniform(0, 0.1, n), rng.uniform(0, 0.4, n)])
    elif shape == "bang":
        switch = rng.integers(0, n)
        u = np.zeros((n, 2))
        u[switch:] = (0.1, 0.4)
    else:
        u = np.tile(rng.uniform([0, 0], [0.1, 0.4]), (n, 1))
    x = forward(Scenario(per=per), controls=u)
    assert x.min() >= -1e-9


def _fourth_order_ratio(per, n):
    s = Scenario(per=per)

    def s_end(m):
        return forward(s, TimeGrid(25.0, m))[-1, 0]

    ref = s_end(16 * n)
    return abs(s_end(n) - ref) / abs(s_end(2 * n) - ref)


@pytest.mark.parametrize("per,n", [(0.0, 50), (0.0, 100), (0.8, 400)])
def test_fourth_order_convergence(per, n):
    assert 12.0 <= _fourth_order_ratio(per, n) <= 20.0


def test_forward_is_deterministic():
    s = Scenario(per=0.8)
    assert forward(s).tobytes() == forward(s).tobytes()


# adjoint -------------------------------------------------------------------

def test_adjoint_terminal_row_is_exactly_zero():
    s = table1_default()
    x = forward(s)
    rng = np.random.default_rng(0)
    u = np.column_stack([rng.uniform(0, 0.1, 2501), rng.uniform(0, 0.4, 2501)])
    p = integrate_adjoint_backward(GRID, x, u, s.parameters, s.incidence_function, s.weights)
    assert p.shape == (2501, 4)
    assert tuple(p[-1]) == (0.0, 0.0, 0.0, 0.0)
    assert np.isfinite(p).all()


def test_one_step_back_from_terminal_time():
    s = table1_default()
    x = forward(s)
    u = zeros(GRID)
    p = integrate_adjoint_backward(GRID, x, u, s.parameters, s.incidence_function, s.weights)
    h = GRID.h
    assert p[-2, 2] == pytest.approx(s.k1 * h, abs=h**2)

    # reference: tightly-toleranced backward solve over the last step, state linearly interpolated
    xa, xb = x[-2], x[-1]
    Lam, beta, mu, eta, eps, gam = s.parameters.at(0.0)

    def rhs(t, q):
        lam = (t - (25.0 - h)) / h
        xs = (1 - lam) * xa + lam * xb
        return _adjoint_kernel(*q, *xs, 0.0, 0.0, beta, mu, eta, eps, gam, s.k1, s.incidence_function)

    ref = solve_ivp(rhs, (25.0, 25.0 - h), [0.0] * 4, rtol=1e-13, atol=1e-16).y[:, -1]
    np.testing.assert_allclose(p[-2], ref, rtol=1e-9, atol=1e-15)


def test_adjoint_vanishes_without_cost_or_transmission():
    s = Scenario(k1=0.0, beta=0.0)
    x = forward(s)
    p = integrate_adjoint_backward(GRID, x, zeros(GRID), s.parameters, s.incidence_function, s.weights)
    assert not p.any()


def test_adjoint_matches_adaptive_reference_over_whole_horizon():
    s = Scenario(per=0.8)
    g = TimeGrid(25.0, 2500)
    x = forward(s, g)
    u = zeros(g)
    p = integrate_adjoint_backward(g, x, u, s.parameters, s.incidence_function, s.weights)
    inc = s.incidence_function

    def xs_at(t):
        return np.array([np.interp(t, g.nodes, x[:, k]) for k in range(4)])

    def rhs(t, q):
        _, beta, mu, eta, eps, gam = s.parameters.at(t)
        return _adjoint_kernel(*q, *xs_at(t), 0.0, 0.0, beta, mu, eta, eps, gam, s.k1, inc)

    ref = solve_ivp(rhs, (25.0, 0.0), [0.0] * 4, rtol=1e-10, atol=1e-12, max_step=0.01).y[:, -1]
    np.testing.assert_allclose(p[0], ref, rtol=1e-6)


# quadrature ----------------------------------------------------------------

def test_quadrature_constant_integrand():
    g = TimeGrid(25.0, 2500)
    states = zeros(g, 4)
    states[:, 2] = 1.0
    assert quadrature_cost(g, states, zeros(g), CostWeights(1.0, 0.01, 0.01)) == pytest.approx(25.0, rel=1e-14)


def test_quadrature_linear_integrand_is_exact():
    g = TimeGrid(1.0, 10)
    states = zeros(g, 4)
    states[:, 2] = g.nodes
    assert quadrature_cost(g, states, zeros(g), CostWeights(1.0, 0.01, 0.01)) == pytest.approx(0.5, rel=1e-14)


def test_quadrature_includes_control_terms():
    g = TimeGrid(2.0, 4)
    u = np.tile([0.1, 0.2], (5, 1))
    assert quadrature_cost(g, zeros(g, 4), u, CostWeights(1.0, 2.0, 3.0)) == pytest.approx(2 * (2 * 0.01 + 3 * 0.04))


def test_trajectory_shape_validation():
    g = TimeGrid(1.0, 4)
    with pytest.raises(ValueError):
        Trajectory(g, zeros(g, 4), zeros(g, 4), np.zeros((4, 2)))
