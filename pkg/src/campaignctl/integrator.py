"""Fixed-step classical Runge-Kutta integration on a uniform time grid.

States integrate forward from an initial condition; costates integrate
backward from a terminal condition while reading the stored state
trajectory. Time-dependent inputs (controls, rate profiles) are sampled at
the step endpoints and midpoints, with grid signals interpolated linearly,
which keeps the scheme at full fourth order for continuous inputs.

A fixed step is used deliberately: state, costate and control must share
one grid for the sweep update and the cost quadrature, and the dynamics
here are smooth and non-stiff at the scales of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IntegrationBlowupError",
    "TimeGrid",
    "ControlGrid",
    "Trajectory",
    "sample_control",
    "integrate_forward",
    "integrate_backward",
    "default_n_steps",
]

# tolerance for snapping a query time onto a grid node, in units of dt
_NODE_SNAP = 1e-9


class IntegrationBlowupError(RuntimeError):
    """An integration step produced a non-finite or inadmissible state."""

    def __init__(self, message, step_index=None, t=None):
        super().__init__(message)
        self.step_index = step_index
        self.t = t


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with ``n_steps`` intervals (``n_steps + 1`` nodes) on [t0, t_end]."""

    t0: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.t_end > self.t0:
            raise ValueError(f"need t_end > t0, got [{self.t0}, {self.t_end}]")

    @property
    def dt(self):
        return (self.t_end - self.t0) / self.n_steps

    @property
    def n_nodes(self):
        return self.n_steps + 1

    def nodes(self):
        return np.linspace(self.t0, self.t_end, self.n_steps + 1)


def default_n_steps(t_end, per_unit_time=1000, minimum=100):
    """Grid resolution giving dt about 1e-3 at the usual horizon scales."""
    return max(minimum, int(round(per_unit_time * t_end)))


def _locate(grid, t):
    """Interval index and fractional offset for time t, exact at nodes."""
    pos = (t - grid.t0) / grid.dt
    if pos < -_NODE_SNAP or pos > grid.n_steps + _NODE_SNAP:
        raise ValueError(f"t={t:g} outside grid [{grid.t0:g}, {grid.t_end:g}]")
    j = int(math.floor(pos + _NODE_SNAP))
    if j >= grid.n_steps:
        return grid.n_steps, 0.0
    frac = pos - j
    if frac < _NODE_SNAP:
        frac = 0.0
    return j, frac


@dataclass(eq=False)
class ControlGrid:
    """Control signal given by node values on a TimeGrid, linear in between."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"control values have shape {v.shape}, expected ({self.grid.n_nodes},)"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("control values must be finite")
        if np.any(v < 0.0):
            raise ValueError("control values must be nonnegative")
        self.values = v

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_nodes))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n_nodes, float(value)))

    def at(self, t):
        return sample_control(self, t)


def sample_control(u, t):
    """Piecewise-linear value of a gridded control at time t (exact at nodes)."""
    j, frac = _locate(u.grid, t)
    v = u.values
    if frac == 0.0:
        return float(v[j])
    return float((1.0 - frac) * v[j] + frac * v[j + 1])


@dataclass(eq=False)
class Trajectory:
    """Node-sampled solution of an ODE system; row j holds the state at node j."""

    grid: TimeGrid
    states: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.states, dtype=float)
        if s.ndim != 2 or s.shape[0] != self.grid.n_nodes:
            raise ValueError(
                f"states have shape {s.shape}, expected ({self.grid.n_nodes}, dim)"
            )
        self.states = s

    def state_at(self, t):
        """Linear interpolation of the stored states at time t."""
        j, frac = _locate(self.grid, t)
        if frac == 0.0:
            return self.states[j].copy()
        return (1.0 - frac) * self.states[j] + frac * self.states[j + 1]


def integrate_forward(rhs, x0, grid, post_step=None):
    """Classical RK4 from x0 over the grid; returns the node trajectory.

    ``rhs(t, x)`` must return d x / dt as an array of the same shape and be
    defined at the node and midpoint times of the grid. ``post_step``, when
    given, is called as ``post_step(x, step_index, t)`` after each step and
    may return an adjusted state or raise to abort (used for tolerance-level
    clipping of fraction states).
    """
    dt = grid.dt
    half = 0.5 * dt
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    out = np.empty((grid.n_nodes, x.size))
    out[0] = x
    for j in range(grid.n_steps):
        t = grid.t0 + j * dt
        k1 = rhs(t, x)
        k2 = rhs(t + half, x + half * k1)
        k3 = rhs(t + half, x + half * k2)
        k4 = rhs(t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(x)):
            raise IntegrationBlowupError(
                f"non-finite state after step {j + 1} (t={t + dt:g})",
                step_index=j + 1,
                t=t + dt,
            )
        if post_step is not None:
            x = post_step(x, j + 1, t + dt)
        out[j + 1] = x
    return Trajectory(grid, out)


def integrate_backward(rhs, xT, grid, state_traj):
    """RK4 in reverse time from the terminal condition xT.

    ``rhs(t, lam, x)`` receives the stored state sampled at t: node values
    at the nodes and neighbor averages at the midpoints, consistent with
    linear interpolation. The returned trajectory is indexed forward in
    time like the state trajectory, so ``states[0]`` holds the value at t0.
    """
    if state_traj.grid != grid:
        raise ValueError("state trajectory grid differs from the integration grid")
    dt = grid.dt
    half = 0.5 * dt
    xs = state_traj.states
    lam = np.atleast_1d(np.asarray(xT, dtype=float)).copy()
    out = np.empty((grid.n_nodes, lam.size))
    out[grid.n_steps] = lam
    for j in range(grid.n_steps, 0, -1):
        t = grid.t0 + j * dt
        x_j = xs[j]
        x_prev = xs[j - 1]
        x_mid = 0.5 * (x_j + x_prev)
        k1 = rhs(t, lam, x_j)
        k2 = rhs(t - half, lam - half * k1, x_mid)
        k3 = rhs(t - half, lam - half * k2, x_mid)
        k4 = rhs(t - dt, lam - dt * k3, x_prev)
        lam = lam - (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(lam)):
            raise IntegrationBlowupError(
                f"non-finite costate after step {grid.n_steps - j + 1} (t={t - dt:g})",
                step_index=grid.n_steps - j + 1,
                t=t - dt,
            )
        out[j - 1] = lam
    return Trajectory(grid, out)
