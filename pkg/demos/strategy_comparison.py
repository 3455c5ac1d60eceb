"""Is planning worth it? Campaign cost versus spreading rate per strategy.

Sweeps the spreading rate and evaluates four strategies in each cell:
doing nothing, blasting at half power, following the uncontrolled
susceptible curve, and the optimal plan. The optimal strategy is never
worse than doing nothing; the fixed strategies sometimes are, especially
where the message spreads well on its own.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from campaignctl import SisParams, Strategy, SweepSpec, run_sweep, write_sweep_csv
from campaignctl.strategies import STRATEGY_KINDS

OUT = Path(__file__).resolve().parent / "output"

LABELS = {
    "none": "no control",
    "constant_half_max": "constant half max",
    "heuristic_follow": "follow s_nc(t)",
    "optimal": "optimal",
}


def main():
    OUT.mkdir(exist_ok=True)
    spec = SweepSpec(
        model_template=SisParams(beta=1.0),
        parameter="beta",
        values=(0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0),
        strategies=tuple(Strategy(kind) for kind in STRATEGY_KINDS),
        n_steps=1500,
    )
    rows = run_sweep(spec)
    write_sweep_csv(rows, OUT / "j_vs_beta_sis.csv")

    by_strategy = {kind: ([], []) for kind in STRATEGY_KINDS}
    for row in rows:
        by_strategy[row.strategy][0].append(row.value)
        by_strategy[row.strategy][1].append(row.J)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for kind, (values, costs) in by_strategy.items():
        ax.plot(values, costs, "o-", label=LABELS[kind])
    ax.set_xlabel("spreading rate")
    ax.set_ylabel("campaign cost J")
    ax.set_title("cost versus spreading rate, SIS")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "j_vs_beta_sis.png", dpi=150)

    for row in rows:
        print(f"beta={row.value:<5g} {LABELS[row.strategy]:18s} J = {row.J:.5f}")
    print(f"wrote {OUT / 'j_vs_beta_sis.csv'} and {OUT / 'j_vs_beta_sis.png'}")


if __name__ == "__main__":
    main()
