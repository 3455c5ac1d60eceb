"""Baseline campaign strategies and their cost evaluation.

All non-optimal strategies are open loop: they are decided once at the
start of the campaign, the heuristic one by looking at the uncontrolled
system, and are never adjusted afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .integrator import ControlGrid, TimeGrid, default_n_steps
from .solver import SolverNotConverged, SolverOptions, _forward, _Pontryagin, solve

__all__ = [
    "STRATEGY_KINDS",
    "Strategy",
    "build_controls",
    "evaluate_strategy",
]

STRATEGY_KINDS = ("none", "constant_half_max", "heuristic_follow", "optimal")


@dataclass(frozen=True)
class Strategy:
    """A named control policy; ``solver_opts`` applies to the optimal kind only."""

    kind: str
    solver_opts: SolverOptions | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}, expected one of {STRATEGY_KINDS}")


def _resolve_opts(strategy, n_steps):
    opts = strategy.solver_opts if strategy.solver_opts is not None else SolverOptions()
    if n_steps is not None:
        opts = replace(opts, n_steps=n_steps)
    return opts


def build_controls(strategy, model, n_steps=None):
    """Control grid(s) the strategy commits to at campaign start.

    * none: identically zero;
    * constant_half_max: half of each control's maximum, held constant;
    * heuristic_follow: the uncontrolled system is integrated once, then the
      direct control follows u_max s_nc(t) and the word-of-mouth control
      (SIR) follows u2_max s_nc(t) i_nc(t);
    * optimal: delegates to the solver; non-convergence raises.
    """
    if strategy.kind == "optimal":
        opts = _resolve_opts(strategy, n_steps)
        sol = solve(model, opts)
        if not sol.converged:
            raise SolverNotConverged(f"optimal strategy solve did not converge: {sol.message}", sol)
        return sol.controls

    problem = _Pontryagin(model)
    grid = TimeGrid(0.0, model.T, n_steps if n_steps is not None else default_n_steps(model.T))
    if strategy.kind == "none":
        return tuple(ControlGrid.zeros(grid) for _ in range(problem.n_controls))
    if strategy.kind == "constant_half_max":
        return tuple(ControlGrid.constant(grid, 0.5 * bound) for bound in problem.bounds)

    # heuristic_follow: shapes read off the no-control trajectory
    zero = tuple(ControlGrid.zeros(grid) for _ in range(problem.n_controls))
    traj_nc = _forward(problem, grid, zero)
    if problem.kind == "sis":
        s_nc = 1.0 - traj_nc.states[:, 0]
        grids = (ControlGrid(grid, model.u_max * s_nc),)
    else:
        s_nc = traj_nc.states[:, 0]
        i_nc = 1.0 - s_nc - traj_nc.states[:, 1]
        grids = (
            ControlGrid(grid, model.u1_max * s_nc),
            ControlGrid(grid, model.u2_max * s_nc * i_nc),
        )
    for g, bound in zip(grids, problem.bounds):
        assert np.all(g.values <= bound + 1e-12), "heuristic control left its box"
    return grids


def evaluate_strategy(strategy, model, n_steps=None):
    """Cost, state trajectory and controls of the strategy on this instance.

    Evaluation is a pure function of its arguments; repeated calls return
    bitwise identical numbers.
    """
    if strategy.kind == "optimal":
        opts = _resolve_opts(strategy, n_steps)
        sol = solve(model, opts)
        if not sol.converged:
            raise SolverNotConverged(f"optimal strategy solve did not converge: {sol.message}", sol)
        return sol.cost, sol.state_traj, sol.controls
    controls = build_controls(strategy, model, n_steps)
    problem = _Pontryagin(model)
    traj = _forward(problem, controls[0].grid, controls)
    return problem.cost(traj, controls), traj, controls
