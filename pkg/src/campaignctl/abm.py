"""Stochastic agent-based oracle for the mean-field dynamics.

A finite population of N agents under homogeneous mixing is advanced with
binomial tau-leaping: in each step of length dt_event every susceptible
independently becomes a spreader with probability
(beta(t) i + u) dt (SIS) or ((beta(t) + u2(t)) i + u1(t)) dt (SIR), and
every spreader recovers with probability gamma(t) dt, back to susceptible
(SIS) or to the recovered class (SIR). Expected increments per step match
the mean-field equations, so the across-replication mean trajectory
converges to the ODE solution as N grows, at the usual 1/sqrt(N) rate.

Tau-leaping is used instead of exact event-by-event simulation because the
rates are time varying and the validation target is the mean trajectory,
not event statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .integrator import TimeGrid
from .profiles import sample
from .sis_model import SisParams
from .sir_model import SirParams

__all__ = ["AbmConfig", "AbmResult", "simulate", "write_abm_csv"]

_DEFAULT_STEPS = 5000


@dataclass
class AbmConfig:
    """One agent-based simulation campaign.

    ``controls`` takes the model's control grid(s); ``None`` means no
    control. ``dt_event`` defaults to T / 5000. Construction fails if any
    per-step transition probability could exceed 1 for the given rates.
    """

    model: object
    controls: tuple | None = None
    n_agents: int = 100_000
    replications: int = 20
    seed: int = 0
    dt_event: float | None = None

    def __post_init__(self):
        if not isinstance(self.model, (SisParams, SirParams)):
            raise TypeError(f"expected SisParams or SirParams, got {type(self.model).__name__}")
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.dt_event is None:
            self.dt_event = self.model.T / _DEFAULT_STEPS
        if not 0.0 < self.dt_event <= self.model.T:
            raise ValueError(f"dt_event must lie in (0, T], got {self.dt_event}")
        if self.controls is not None and not isinstance(self.controls, tuple):
            self.controls = tuple(self.controls)
        self._check_probabilities()

    def grid(self):
        n_steps = max(1, int(round(self.model.T / self.dt_event)))
        return TimeGrid(0.0, self.model.T, n_steps)

    def _check_probabilities(self):
        grid = self.grid()
        dt = grid.dt
        times = grid.nodes()
        beta_max = float(np.max(sample(self.model.beta, times)))
        gamma_max = float(np.max(sample(self.model.gamma, times)))
        if isinstance(self.model, SisParams):
            u_max = self._control_max(0, default=0.0)
            infection_bound = (beta_max + u_max) * dt
        else:
            u1_max = self._control_max(0, default=0.0)
            u2_max = self._control_max(1, default=0.0)
            infection_bound = (beta_max + u2_max + u1_max) * dt
        recovery_bound = gamma_max * dt
        if infection_bound > 1.0:
            raise ValueError(
                f"per-step infection probability bound {infection_bound:.3g} exceeds 1; "
                f"reduce dt_event (now {dt:g})"
            )
        if recovery_bound > 1.0:
            raise ValueError(
                f"per-step recovery probability bound {recovery_bound:.3g} exceeds 1; "
                f"reduce dt_event (now {dt:g})"
            )

    def _control_max(self, index, default):
        if self.controls is None or len(self.controls) <= index:
            return default
        return float(np.max(self.controls[index].values))


@dataclass(eq=False)
class AbmResult:
    """Across-replication mean fractions and the standard error of the mean."""

    grid: TimeGrid
    kind: str
    mean_infected: np.ndarray
    mean_susceptible: np.ndarray
    mean_recovered: np.ndarray | None
    stderr_infected: np.ndarray
    n_agents: int
    replications: int


def _control_sampler(config, index):
    if config.controls is None or len(config.controls) <= index:
        return lambda t: 0.0
    return config.controls[index].at


def _run_sis(config, grid, rng):
    model = config.model
    n = config.n_agents
    dt = grid.dt
    beta_at, gamma_at = model.beta.at, model.gamma.at
    u_at = _control_sampler(config, 0)
    infected = int(round(model.i0 * n))
    out = np.empty(grid.n_nodes)
    out[0] = infected / n
    t0 = grid.t0
    for j in range(grid.n_steps):
        t = t0 + j * dt
        i_frac = infected / n
        p_inf = (beta_at(t) * i_frac + u_at(t)) * dt
        p_rec = gamma_at(t) * dt
        new_inf = rng.binomial(n - infected, p_inf) if infected < n else 0
        new_rec = rng.binomial(infected, p_rec) if infected > 0 else 0
        infected += int(new_inf) - int(new_rec)
        out[j + 1] = infected / n
    return out


def _run_sir(config, grid, rng):
    model = config.model
    n = config.n_agents
    dt = grid.dt
    beta_at, gamma_at = model.beta.at, model.gamma.at
    u1_at = _control_sampler(config, 0)
    u2_at = _control_sampler(config, 1)
    infected = int(round(model.i0 * n))
    susceptible = n - infected
    recovered = 0
    out = np.empty((grid.n_nodes, 3))
    out[0] = (susceptible / n, infected / n, recovered / n)
    t0 = grid.t0
    for j in range(grid.n_steps):
        t = t0 + j * dt
        i_frac = infected / n
        p_inf = ((beta_at(t) + u2_at(t)) * i_frac + u1_at(t)) * dt
        p_rec = gamma_at(t) * dt
        new_inf = rng.binomial(susceptible, p_inf) if susceptible > 0 else 0
        new_rec = rng.binomial(infected, p_rec) if infected > 0 else 0
        susceptible -= int(new_inf)
        infected += int(new_inf) - int(new_rec)
        recovered += int(new_rec)
        out[j + 1] = (susceptible / n, infected / n, recovered / n)
    return out


def simulate(config):
    """Mean trajectory and standard error across replications.

    Replications are mutually independent with seeds derived
    deterministically from ``config.seed``, so results do not depend on
    execution order and identical configurations reproduce identical
    output bitwise.
    """
    grid = config.grid()
    seeds = np.random.SeedSequence(config.seed).spawn(config.replications)
    if isinstance(config.model, SisParams):
        runs = np.empty((config.replications, grid.n_nodes))
        for k, seed in enumerate(seeds):
            runs[k] = _run_sis(config, grid, np.random.default_rng(seed))
        mean_i = runs.mean(axis=0)
        stderr = _stderr(runs)
        return AbmResult(
            grid=grid,
            kind="sis",
            mean_infected=mean_i,
            mean_susceptible=1.0 - mean_i,
            mean_recovered=None,
            stderr_infected=stderr,
            n_agents=config.n_agents,
            replications=config.replications,
        )
    runs = np.empty((config.replications, grid.n_nodes, 3))
    for k, seed in enumerate(seeds):
        runs[k] = _run_sir(config, grid, np.random.default_rng(seed))
    mean = runs.mean(axis=0)
    return AbmResult(
        grid=grid,
        kind="sir",
        mean_infected=mean[:, 1],
        mean_susceptible=mean[:, 0],
        mean_recovered=mean[:, 2],
        stderr_infected=_stderr(runs[:, :, 1]),
        n_agents=config.n_agents,
        replications=config.replications,
    )


def _stderr(runs):
    if runs.shape[0] < 2:
        return np.zeros(runs.shape[1])
    return runs.std(axis=0, ddof=1) / np.sqrt(runs.shape[0])


def write_abm_csv(result, path):
    """Mean-trajectory CSV: the ODE state columns plus the stderr of the
    infected-fraction mean."""
    times = result.grid.nodes()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if result.kind == "sis":
            writer.writerow(["t", "i", "s", "stderr"])
            for row in zip(times, result.mean_infected, result.mean_susceptible, result.stderr_infected):
                writer.writerow([repr(float(v)) for v in row])
        else:
            writer.writerow(["t", "s", "i", "r", "stderr"])
            for row in zip(
                times,
                result.mean_susceptible,
                result.mean_infected,
                result.mean_recovered,
                result.stderr_infected,
            ):
                writer.writerow([repr(float(v)) for v in row])
