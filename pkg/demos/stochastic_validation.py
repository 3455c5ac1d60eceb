"""Check the mean-field equations against a finite population.

Runs the agent-based simulation at two population sizes under the optimal
control and overlays the replication means on the ODE solution. The match
tightens like 1/sqrt(N), which is the evidence that the deterministic
planner is describing the stochastic reality it will be used on.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from campaignctl import AbmConfig, SisParams, simulate, solve_fbs, write_abm_csv

OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    model = SisParams(beta=1.0)
    sol = solve_fbs(model)
    ode = sol.state_traj.states[:, 0]
    t = sol.grid.nodes()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, ode, "k", lw=2, label="mean-field ODE (optimal control)")
    for n_agents, style in ((2_000, "C1"), (50_000, "C0")):
        result = simulate(
            AbmConfig(model=model, controls=sol.controls, n_agents=n_agents, replications=20, seed=42)
        )
        dev = np.max(np.abs(result.mean_infected - ode))
        print(f"N = {n_agents:>6d}: sup deviation of the mean from the ODE = {dev:.4f}")
        ax.plot(result.grid.nodes(), result.mean_infected, style, alpha=0.8,
                label=f"agent-based mean, N = {n_agents}")
        band = 2.0 * result.stderr_infected
        ax.fill_between(result.grid.nodes(), result.mean_infected - band,
                        result.mean_infected + band, color=style, alpha=0.2)
        if n_agents == 50_000:
            write_abm_csv(result, OUT / "abm_sis_optimal.csv")
    ax.set_xlabel("time")
    ax.set_ylabel("infected fraction")
    ax.set_title("stochastic simulation versus the mean-field model")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "abm_validation.png", dpi=150)
    print(f"wrote {OUT / 'abm_validation.png'} and {OUT / 'abm_sis_optimal.csv'}")


if __name__ == "__main__":
    main()
