"""Parameter sweeps, control-effort measures and trajectory export.

Sweeps evaluate each (parameter value, strategy) cell independently, so
cells can run in worker processes; results are merged in submission order
and therefore do not depend on scheduling. Rows are emitted even when a
cell fails, carrying the convergence flag or the error, never dropped.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .profiles import Constant
from .solver import SolverOptions, solve
from .strategies import evaluate_strategy

__all__ = [
    "SWEEP_PARAMETERS",
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "control_effort",
    "export_trajectories",
    "write_sweep_csv",
    "resolve_workers",
]

SWEEP_PARAMETERS = ("beta", "gamma", "T", "b", "c")

THREADS_ENV_VAR = "CAMPAIGNCTL_THREADS"


@dataclass
class SweepRow:
    parameter: str
    value: float
    strategy: str
    J: float
    converged: bool
    iterations: int
    error: str | None = None


@dataclass
class SweepSpec:
    """A one-parameter sweep of a model template across several strategies."""

    model_template: object
    parameter: str
    values: tuple
    strategies: tuple
    n_steps: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        self.values = tuple(float(v) for v in self.values)
        if not self.values:
            raise ValueError("values must be nonempty")
        self.strategies = tuple(self.strategies)
        if not self.strategies:
            raise ValueError("strategies must be nonempty")


def resolve_workers(requested=None):
    """Worker count: explicit request, capped by the environment variable."""
    cap = os.environ.get(THREADS_ENV_VAR)
    cap = int(cap) if cap else (os.cpu_count() or 1)
    if requested is None:
        return max(1, cap)
    return max(1, min(requested, cap))


def _derive_model(template, parameter, value):
    if parameter == "beta":
        return replace(template, beta=Constant(float(value)))
    return replace(template, **{parameter: float(value)})


def _evaluate_cell(args):
    """Evaluate one (value, strategy) cell; failures become error rows."""
    template, parameter, value, strategy, n_steps = args
    try:
        model = _derive_model(template, parameter, value)
    except (ValueError, TypeError) as err:
        return SweepRow(parameter, value, strategy.kind, math.nan, False, 0, error=str(err))
    try:
        if strategy.kind == "optimal":
            opts = strategy.solver_opts if strategy.solver_opts is not None else SolverOptions()
            if n_steps is not None:
                opts = replace(opts, n_steps=n_steps)
            sol = solve(model, opts)
            return SweepRow(
                parameter, value, strategy.kind, sol.cost, sol.converged, sol.iterations,
                error=None if sol.converged else sol.message,
            )
        cost, _, _ = evaluate_strategy(strategy, model, n_steps=n_steps)
        return SweepRow(parameter, value, strategy.kind, cost, True, 0)
    except Exception as err:
        return SweepRow(parameter, value, strategy.kind, math.nan, False, 0, error=str(err))


def run_sweep(spec):
    """One SweepRow per (value, strategy) cell, in deterministic order."""
    cells = [
        (spec.model_template, spec.parameter, value, strategy, spec.n_steps)
        for value in spec.values
        for strategy in spec.strategies
    ]
    workers = resolve_workers(spec.workers)
    if workers <= 1 or len(cells) == 1:
        return [_evaluate_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
        return list(pool.map(_evaluate_cell, cells))


def control_effort(u):
    """Area under the control curve (trapezoid rule)."""
    return float(np.trapezoid(u.values, dx=u.grid.dt))


def write_sweep_csv(rows, path):
    """Sweep table with schema param,value,strategy,J,converged,iterations."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", "strategy", "J", "converged", "iterations"])
        for row in rows:
            writer.writerow(
                [row.parameter, repr(row.value), row.strategy, repr(row.J),
                 str(row.converged).lower(), row.iterations]
            )


def export_trajectories(sol, path):
    """CSV of t, state, costate and control components at the grid nodes.

    Headers are t,i,s,lambda,u for the one-state model and
    t,s,i,r,lambda_s,lambda_r,u1,u2 for the two-state model.
    """
    grid = sol.state_traj.grid
    t = grid.nodes()
    states = sol.state_traj.states
    adjoints = sol.adjoint_traj.states
    if states.shape[1] == 1:
        header = ["t", "i", "s", "lambda", "u"]
        columns = [t, states[:, 0], 1.0 - states[:, 0], adjoints[:, 0], sol.controls[0].values]
    else:
        header = ["t", "s", "i", "r", "lambda_s", "lambda_r", "u1", "u2"]
        s, r = states[:, 0], states[:, 1]
        columns = [
            t, s, 1.0 - s - r, r, adjoints[:, 0], adjoints[:, 1],
            sol.controls[0].values, sol.controls[1].values,
        ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])
