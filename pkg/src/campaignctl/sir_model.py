"""Controlled SIR information epidemic with direct and word-of-mouth controls.

The reduced model tracks (s, r); i = 1 - s - r is implicit. Direct
recruitment u1 converts susceptibles to spreaders; the word-of-mouth
incentive u2 raises the effective spreading rate from beta(t) to
beta(t) + u2(t) in the dynamics only, never inside the profile object.
The reward is the ever-infected fraction 1 - s(T), so

    J = -1 + s(T) + integral_0^T (b u1^2 + c u2^2) dt.

The costate equation for lambda_r and the interior expression of the u2
law are implemented from a fresh differentiation of the Hamiltonian. The
``paper_literal`` switch selects the alternative printed forms (opposite
sign on the u2 term of d lambda_r, factor 1 - 2s - r instead of 1 - s - r
in the u2 law) so the discrepancy's impact can be measured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import as_profile

__all__ = [
    "SirParams",
    "sir_state_rhs",
    "sir_adjoint_rhs",
    "sir_optimal_u1",
    "sir_optimal_u2",
    "sir_cost",
]


@dataclass(frozen=True)
class SirParams:
    """One SIR campaign instance; s(0) = 1 - i0 and r(0) = 0."""

    beta: object
    gamma: object = 0.1
    T: float = 5.0
    b: float = 15.0
    c: float = 1.0
    u1_max: float = 0.06
    u2_max: float = 0.3
    i0: float = 0.01
    paper_literal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "beta", as_profile(self.beta))
        object.__setattr__(self, "gamma", as_profile(self.gamma))
        if not 0.0 <= self.i0 <= 1.0:
            raise ValueError(f"i0 must lie in [0, 1], got {self.i0}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not self.b > 0.0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not self.c > 0.0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.u1_max < 0.0:
            raise ValueError(f"u1_max must be nonnegative, got {self.u1_max}")
        if self.u2_max < 0.0:
            raise ValueError(f"u2_max must be nonnegative, got {self.u2_max}")

    @property
    def s0(self):
        return 1.0 - self.i0

    @property
    def r0(self):
        return 0.0


def sir_state_rhs(s, r, u1, u2, beta_t, gamma_t):
    """(ds/dt, dr/dt) of the reduced controlled SIR dynamics."""
    i = 1.0 - s - r
    ds = -(beta_t + u2) * s * i - u1 * s
    dr = gamma_t * i
    return ds, dr


def sir_adjoint_rhs(s, r, lam_s, lam_r, u1, u2, beta_t, gamma_t, paper_literal=False):
    """(d lambda_s/dt, d lambda_r/dt) costate equations, linear in the costates."""
    be = beta_t + u2
    dls = be * lam_s * (1.0 - 2.0 * s - r) + u1 * lam_s + gamma_t * lam_r
    if paper_literal:
        dlr = -beta_t * lam_s * s + u2 * lam_s * s + gamma_t * lam_r
    else:
        dlr = -be * lam_s * s + gamma_t * lam_r
    return dls, dlr


def sir_optimal_u1(s, lam_s, b, u1_max):
    """Direct-recruitment law -lam_s s / (2 b), clamped to [0, u1_max]."""
    return np.clip(-(lam_s * s) / (2.0 * b), 0.0, u1_max)


def sir_optimal_u2(s, r, lam_s, c, u2_max, paper_literal=False):
    """Word-of-mouth law -lam_s s (1 - s - r) / (2 c), clamped to [0, u2_max].

    The default interior expression is nonnegative exactly when lam_s < 0.
    """
    shape = (1.0 - 2.0 * s - r) if paper_literal else (1.0 - s - r)
    return np.clip(-(lam_s * s * shape) / (2.0 * c), 0.0, u2_max)


def sir_cost(traj, u1, u2, b, c):
    """Campaign cost -1 + s(T) + int (b u1^2 + c u2^2) dt on the shared grid."""
    if traj.grid != u1.grid or traj.grid != u2.grid:
        raise ValueError("trajectory and controls are on different grids")
    running = np.trapezoid(b * u1.values**2 + c * u2.values**2, dx=traj.grid.dt)
    return float(running + traj.states[-1, 0] - 1.0)
