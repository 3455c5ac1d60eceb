"""Promote a product: direct recruitment plus word-of-mouth in the SIR model.

The campaigner pays for two signals here. Direct recruitment u1 converts
susceptibles immediately; the word-of-mouth incentive u2 tops up the
spreading rate and only pays off once both spreaders and susceptibles are
plentiful, which is visible in its delayed hump.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from campaignctl import SirParams, Strategy, evaluate_strategy, export_trajectories, solve_fbs

OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    model = SirParams(beta=1.0)
    sol = solve_fbs(model)
    j_nc, traj_nc, _ = evaluate_strategy(Strategy("none"), model)
    print(f"optimal J = {sol.cost:.6f}, no control J = {j_nc:.6f}")
    print(f"ever-infected fraction with control: {1.0 - sol.state_traj.states[-1, 0]:.4f}")
    print(f"                     without control: {1.0 - traj_nc.states[-1, 0]:.4f}")

    t = sol.grid.nodes()
    s, r = sol.state_traj.states[:, 0], sol.state_traj.states[:, 1]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, s, "C0", label="susceptible")
    ax.plot(t, 1.0 - s - r, "C1", label="infected")
    ax.plot(t, r, "C2", label="recovered")
    ax.plot(t, traj_nc.states[:, 0], "C0--", alpha=0.6, label="susceptible, no control")
    ax.set_xlabel("time")
    ax.set_ylabel("fraction of population")
    ax2 = ax.twinx()
    ax2.plot(t, sol.controls[0].values, "C3", label="direct recruitment u1")
    ax2.plot(t, sol.controls[1].values, "C4", label="word of mouth u2")
    ax2.set_ylabel("control signal")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="center right", fontsize=8)
    ax.set_title("SIR campaign with two controls")
    fig.tight_layout()
    fig.savefig(OUT / "sir_baseline.png", dpi=150)

    export_trajectories(sol, OUT / "sir_baseline.csv")
    print(f"wrote {OUT / 'sir_baseline.png'} and {OUT / 'sir_baseline.csv'}")


if __name__ == "__main__":
    main()
