import math

import numpy as np
import pytest

from campaignctl.integrator import (
    ControlGrid,
    IntegrationBlowupError,
    TimeGrid,
    Trajectory,
    default_n_steps,
    integrate_backward,
    integrate_forward,
    sample_control,
)

from conftest import logistic_infected


def test_grid_basics():
    grid = TimeGrid(0.0, 5.0, 5000)
    assert grid.dt == pytest.approx(1e-3)
    assert grid.n_nodes == 5001
    nodes = grid.nodes()
    assert nodes[0] == 0.0 and nodes[-1] == 5.0
    with pytest.raises(ValueError):
        TimeGrid(0.0, 5.0, 0)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 1.0, 10)


def test_default_n_steps():
    assert default_n_steps(5.0) == 5000
    assert default_n_steps(0.1) == 100  # floor kicks in


def test_sample_control_midpoint_and_nodes():
    grid = TimeGrid(0.0, 1.0, 1)
    u = ControlGrid(grid, [0.0, 1.0])
    assert sample_control(u, 0.5) == 0.5
    assert sample_control(u, 0.0) == 0.0
    assert sample_control(u, 1.0) == 1.0


def test_sample_control_exact_at_nodes():
    grid = TimeGrid(0.0, 5.0, 777)
    values = np.random.default_rng(3).uniform(0.0, 1.0, grid.n_nodes)
    u = ControlGrid(grid, values)
    for j in [0, 1, 400, 776, 777]:
        t = grid.t0 + j * grid.dt
        assert sample_control(u, t) == values[j]


def test_sample_control_constant():
    grid = TimeGrid(0.0, 5.0, 100)
    u = ControlGrid.constant(grid, 0.03)
    for t in [0.0, 1.234, 4.9999, 5.0]:
        assert sample_control(u, t) == 0.03


def test_sample_control_domain_error():
    u = ControlGrid.zeros(TimeGrid(0.0, 1.0, 10))
    with pytest.raises(ValueError, match="outside grid"):
        sample_control(u, 1.5)


def test_control_grid_validation():
    grid = TimeGrid(0.0, 1.0, 10)
    with pytest.raises(ValueError, match="shape"):
        ControlGrid(grid, np.zeros(5))
    with pytest.raises(ValueError, match="nonnegative"):
        ControlGrid(grid, -np.ones(11))
    with pytest.raises(ValueError, match="finite"):
        ControlGrid(grid, np.full(11, np.nan))


def test_forward_constant_rhs():
    grid = TimeGrid(0.0, 2.0, 50)
    traj = integrate_forward(lambda t, x: np.zeros(1), [0.7], grid)
    assert np.all(traj.states[:, 0] == 0.7)


def test_forward_exponential():
    grid = TimeGrid(0.0, 1.0, 100)
    traj = integrate_forward(lambda t, x: x, [1.0], grid)
    assert traj.states[-1, 0] == pytest.approx(math.e, abs=1e-7)


def test_backward_exponential():
    # d lam / dt = -lam with lam(1) = 1 gives lam(0) = e
    grid = TimeGrid(0.0, 1.0, 100)
    state = Trajectory(grid, np.zeros((grid.n_nodes, 1)))
    traj = integrate_backward(lambda t, lam, x: -lam, [1.0], grid, state)
    assert traj.states[-1, 0] == 1.0  # terminal condition imposed exactly
    assert traj.states[0, 0] == pytest.approx(math.e, abs=1e-7)


def test_forward_logistic_oracle():
    grid = TimeGrid(0.0, 5.0, 5000)

    def rhs(t, x):
        i = x[0]
        return np.array([-i * i + 0.9 * i])

    traj = integrate_forward(rhs, [0.01], grid)
    exact = logistic_infected(grid.nodes())
    assert np.max(np.abs(traj.states[:, 0] - exact)) <= 1e-4


def test_order_of_convergence():
    # halving dt should shrink the sup error by about 2^4
    def run(n):
        grid = TimeGrid(0.0, 5.0, n)
        traj = integrate_forward(lambda t, x: np.array([-x[0] * x[0] + 0.9 * x[0]]), [0.01], grid)
        return np.max(np.abs(traj.states[:, 0] - logistic_infected(grid.nodes())))

    ratio = run(100) / run(200)
    assert 12.0 <= ratio <= 20.0


def test_backward_matches_time_reversed_forward():
    # backward integration of dlam/dt = a(t) lam equals forward integration
    # of the reversed system dmu/ds = -a(T-s) mu read backwards
    grid = TimeGrid(0.0, 2.0, 200)
    a = lambda t: 0.3 + 0.1 * math.sin(t)
    state = Trajectory(grid, np.zeros((grid.n_nodes, 1)))
    lam = integrate_backward(lambda t, v, x: a(t) * v, [1.3], grid, state)
    mu = integrate_forward(lambda s, v: -a(2.0 - s) * v, [1.3], grid)
    assert np.max(np.abs(lam.states[:, 0] - mu.states[::-1, 0])) <= 1e-10


def test_forward_bit_stable():
    grid = TimeGrid(0.0, 5.0, 500)
    rhs = lambda t, x: np.array([-x[0] * x[0] + 0.9 * x[0]])
    a = integrate_forward(rhs, [0.01], grid)
    b = integrate_forward(rhs, [0.01], grid)
    assert np.array_equal(a.states, b.states)


def test_blowup_reports_step_index():
    # dx/dt = x^2 from 1 escapes to infinity just before t = 1
    grid = TimeGrid(0.0, 2.0, 200)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(IntegrationBlowupError) as err:
            integrate_forward(lambda t, x: x * x, [1.0], grid)
    assert err.value.step_index is not None
    assert "step" in str(err.value)


def test_backward_grid_mismatch():
    grid = TimeGrid(0.0, 1.0, 10)
    other = TimeGrid(0.0, 1.0, 20)
    state = Trajectory(other, np.zeros((other.n_nodes, 1)))
    with pytest.raises(ValueError, match="grid"):
        integrate_backward(lambda t, lam, x: -lam, [1.0], grid, state)


def test_trajectory_state_at():
    grid = TimeGrid(0.0, 1.0, 2)
    traj = Trajectory(grid, np.array([[0.0], [1.0], [4.0]]))
    assert traj.state_at(0.0)[0] == 0.0
    assert traj.state_at(0.25)[0] == pytest.approx(0.5)
    assert traj.state_at(0.75)[0] == pytest.approx(2.5)
    assert traj.state_at(1.0)[0] == 4.0
