import numpy as np
import pytest

from campaignctl.integrator import ControlGrid, TimeGrid, integrate_forward
from campaignctl.sis_model import (
    SisParams,
    sis_adjoint_rhs,
    sis_cost,
    sis_optimal_control,
    sis_state_rhs,
)

from conftest import logistic_infected

# value of the closed-form logistic solution at the baseline horizon
I5_BASELINE = 0.45255678929669835


def test_state_rhs_values():
    assert sis_state_rhs(0.0, 0.0, 1.0, 0.1) == 0.0
    assert sis_state_rhs(1.0, 0.05, 1.0, 0.1) == pytest.approx(-0.1)
    assert sis_state_rhs(0.01, 0.0, 1.0, 0.1) == pytest.approx(0.0089)


def test_adjoint_rhs_values():
    assert sis_adjoint_rhs(0.3, 0.0, 0.02, 1.0, 0.1) == 0.0
    assert sis_adjoint_rhs(0.0, 1.0, 0.0, 1.0, 0.1) == pytest.approx(-0.9)
    assert sis_adjoint_rhs(0.5, 1.0, 0.06, 1.0, 0.1) == pytest.approx(0.16)


def test_optimal_control_values():
    assert sis_optimal_control(0.5, 0.0, 15.0, 0.06) == 0.0
    assert sis_optimal_control(0.5, 1.0, 15.0, 0.06) == pytest.approx(0.016666666666666666)
    assert sis_optimal_control(0.0, 10.0, 15.0, 0.06) == 0.06


def test_optimal_control_stays_in_box():
    rng = np.random.default_rng(11)
    i = rng.uniform(0.0, 1.0, 2000)
    lam = rng.uniform(-50.0, 50.0, 2000)
    u = sis_optimal_control(i, lam, 15.0, 0.06)
    assert np.all(u >= 0.0) and np.all(u <= 0.06)


def _uncontrolled_traj(params, n_steps):
    grid = TimeGrid(0.0, params.T, n_steps)
    beta, gamma = params.beta.at, params.gamma.at

    def rhs(t, x):
        return np.array([sis_state_rhs(x[0], 0.0, beta(t), gamma(t))])

    return grid, integrate_forward(rhs, [params.i0], grid)


def test_cost_zero_control():
    params = SisParams(beta=1.0)
    grid, traj = _uncontrolled_traj(params, 1000)
    u = ControlGrid.zeros(grid)
    assert sis_cost(traj, u, params.b) == pytest.approx(-traj.states[-1, 0])


def test_cost_constant_control_closed_form():
    params = SisParams(beta=1.0)
    grid = TimeGrid(0.0, 5.0, 500)
    u = ControlGrid.constant(grid, 0.03)
    beta, gamma = params.beta.at, params.gamma.at

    def rhs(t, x):
        return np.array([sis_state_rhs(x[0], u.at(t), beta(t), gamma(t))])

    traj = integrate_forward(rhs, [params.i0], grid)
    running = sis_cost(traj, u, params.b) + traj.states[-1, 0]
    assert running == pytest.approx(15.0 * 0.03**2 * 5.0, abs=1e-12)


def test_cost_uncontrolled_baseline_matches_logistic():
    params = SisParams(beta=1.0)
    grid, traj = _uncontrolled_traj(params, 5000)
    j = sis_cost(traj, ControlGrid.zeros(grid), params.b)
    assert j == pytest.approx(-I5_BASELINE, abs=1e-4)
    # and the whole trajectory tracks the closed form
    assert np.max(np.abs(traj.states[:, 0] - logistic_infected(grid.nodes()))) <= 1e-4


def test_cost_grid_mismatch():
    params = SisParams(beta=1.0)
    grid, traj = _uncontrolled_traj(params, 100)
    other = ControlGrid.zeros(TimeGrid(0.0, 5.0, 50))
    with pytest.raises(ValueError, match="grid"):
        sis_cost(traj, other, params.b)


def test_forward_stays_in_unit_interval():
    params = SisParams(beta=2.0, i0=0.97)
    grid = TimeGrid(0.0, 5.0, 2000)
    rng = np.random.default_rng(5)
    u = ControlGrid(grid, rng.uniform(0.0, params.u_max, grid.n_nodes))
    beta, gamma = params.beta.at, params.gamma.at

    def rhs(t, x):
        return np.array([sis_state_rhs(x[0], u.at(t), beta(t), gamma(t))])

    traj = integrate_forward(rhs, [params.i0], grid)
    assert np.all(traj.states[:, 0] >= -1e-9)
    assert np.all(traj.states[:, 0] <= 1.0 + 1e-9)


def test_subcritical_epidemic_dies_out():
    params = SisParams(beta=0.05, gamma=0.1, T=50.0)
    grid, traj = _uncontrolled_traj(params, 5000)
    assert traj.states[-1, 0] < params.i0


def test_endemic_fixed_point():
    params = SisParams(beta=1.0, T=200.0)
    grid, traj = _uncontrolled_traj(params, 20000)
    assert traj.states[-1, 0] == pytest.approx(0.9, abs=1e-6)


def test_params_validation():
    with pytest.raises(ValueError, match="i0"):
        SisParams(beta=1.0, i0=1.5)
    with pytest.raises(ValueError, match="T"):
        SisParams(beta=1.0, T=0.0)
    with pytest.raises(ValueError, match="b"):
        SisParams(beta=1.0, b=-1.0)
    with pytest.raises(ValueError, match="u_max"):
        SisParams(beta=1.0, u_max=-0.01)


def test_params_accept_numbers_and_profiles():
    from campaignctl.profiles import Constant, Cosine

    p = SisParams(beta=1.0, gamma=0.2)
    assert p.beta == Constant(1.0)
    assert p.gamma == Constant(0.2)
    q = SisParams(beta=Cosine(mean=1.0, amplitude=1.0, period=5.0))
    assert isinstance(q.beta, Cosine)
