"""Controlled SIS information epidemic: dynamics, costate, control law, cost.

The reduced model tracks the infected (spreading) fraction i(t) only, with
s(t) = 1 - i(t) implicit. Direct recruitment converts susceptibles to
spreaders at rate u(t) inside the box [0, u_max], and effort is charged
quadratically, so the campaign cost is

    J = -i(T) + integral_0^T b u(t)^2 dt,

minimized over admissible controls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import as_profile

__all__ = [
    "SisParams",
    "sis_state_rhs",
    "sis_adjoint_rhs",
    "sis_optimal_control",
    "sis_cost",
]


@dataclass(frozen=True)
class SisParams:
    """One SIS campaign instance.

    ``beta`` and ``gamma`` accept a bare number (constant rate) or any rate
    profile. The defaults reproduce the constant-rate baseline scenario
    apart from beta, which must be given.
    """

    beta: object
    gamma: object = 0.1
    T: float = 5.0
    b: float = 15.0
    u_max: float = 0.06
    i0: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "beta", as_profile(self.beta))
        object.__setattr__(self, "gamma", as_profile(self.gamma))
        if not 0.0 <= self.i0 <= 1.0:
            raise ValueError(f"i0 must lie in [0, 1], got {self.i0}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not self.b > 0.0:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.u_max < 0.0:
            raise ValueError(f"u_max must be nonnegative, got {self.u_max}")


def sis_state_rhs(i, u, beta_t, gamma_t):
    """d i / dt of the reduced controlled SIS dynamics.

    Equals -beta i^2 + (beta - gamma - u) i + u; the disease-free state is
    stationary only without control.
    """
    return -beta_t * i * i + (beta_t - gamma_t - u) * i + u


def sis_adjoint_rhs(i, lam, u, beta_t, gamma_t):
    """d lambda / dt along the optimum (costate equation), linear in lambda."""
    return 2.0 * beta_t * i * lam - (beta_t - gamma_t - u) * lam


def sis_optimal_control(i, lam, b, u_max):
    """Pointwise Hamiltonian maximizer lam (1 - i) / (2 b), clamped to [0, u_max]."""
    return np.clip(lam * (1.0 - i) / (2.0 * b), 0.0, u_max)


def sis_cost(traj, u, b):
    """Campaign cost -i(T) + int b u^2 dt, trapezoid rule on the shared grid."""
    if traj.grid != u.grid:
        raise ValueError("trajectory and control are on different grids")
    running = np.trapezoid(b * u.values**2, dx=traj.grid.dt)
    return float(running - traj.states[-1, 0])
