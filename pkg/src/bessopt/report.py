"""Report emission: delimited output plus rendered figures.

Every CSV starts with a versioned schema comment so downstream readers can
pin the layout.  Floats are formatted with a fixed repr-style rule, which
makes repeated runs byte-identical for identical inputs.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .degradation import simulate_soc
from .objectives import ObjectiveValues, Scenario
from .optimizer import Schedule
from .pareto import ParetoFront
from .powerflow import PowerFlowSolution

SCHEMA = "bessopt/1"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [f"# schema={SCHEMA}", ",".join(header)]
    lines += [",".join(_fmt(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


SUMMARY_HEADER = ["case", "energy_purchase_usd", "battery_degradation_usd",
                  "energy_losses_kwh", "voltage_deviation_pu", "f1", "f2",
                  "cycle_lives_years", "feasible", "violation"]


def summary_row(label: str, obj: ObjectiveValues) -> list:
    lives = ";".join(_fmt(v) for v in obj.cycle_lives)
    return [label, obj.energy_cost, obj.degradation_cost, obj.loss_total,
            obj.voltage_dev, obj.f1, obj.f2, lives, obj.feasible, obj.violation]


def write_summary(path: Path, rows: list[list]) -> None:
    write_csv(path, SUMMARY_HEADER, rows)


def write_schedule(path: Path, scenario: Scenario, schedule: Schedule) -> None:
    header = ["slot"] + [f"bess_{p.bus}_kw" for p in scenario.fleet.bess_units]
    rows = [[t] + [schedule.power[k, t] for k in range(schedule.n_bess)]
            for t in range(schedule.horizon)]
    write_csv(path, header, rows)


def write_soc(path: Path, scenario: Scenario, schedule: Schedule) -> None:
    trajs = [simulate_soc(schedule.power[k], p, scenario.profiles.dt)
             for k, p in enumerate(scenario.fleet.bess_units)]
    header = ["slot"] + [f"soc_bess_{p.bus}" for p in scenario.fleet.bess_units]
    rows = [[t] + [traj.soc[t] for traj in trajs]
            for t in range(scenario.profiles.horizon + 1)]
    write_csv(path, header, rows)


def write_voltages(path: Path, scenario: Scenario,
                   solutions: list[PowerFlowSolution]) -> None:
    header = ["slot"] + [f"v_bus_{b.id}" for b in scenario.network.buses]
    rows = [[t] + list(sol.voltages) for t, sol in enumerate(solutions)]
    write_csv(path, header, rows)


FRONT_HEADER = ["epsilon", "f1", "energy_cost", "degradation_cost",
                "losses_kwh", "voltage_dev", "f2", "mu_f1", "mu_f2",
                "mu_normalized", "selected"]


def write_front_csv(path: Path, front: ParetoFront) -> None:
    rows = []
    for i, p in enumerate(front.points):
        o = p.objectives
        rows.append(["" if p.epsilon is None else p.epsilon, o.f1,
                     o.energy_cost, o.degradation_cost, o.loss_total,
                     o.voltage_dev, o.f2, p.membership[0], p.membership[1],
                     p.normalized, int(i == front.selected)])
    write_csv(path, FRONT_HEADER, rows)


def write_front_json(path: Path, front: ParetoFront) -> None:
    doc = {
        "schema": SCHEMA,
        "payoff": {"f1_min": front.payoff.f1_min, "f1_max": front.payoff.f1_max,
                   "f2_min": front.payoff.f2_min, "f2_max": front.payoff.f2_max},
        "selected": front.selected,
        "points": [
            {
                "epsilon": p.epsilon,
                "f1": p.objectives.f1,
                "f2": p.objectives.f2,
                "energy_cost": p.objectives.energy_cost,
                "degradation_cost": p.objectives.degradation_cost,
                "losses_kwh": p.objectives.loss_total,
                "voltage_dev": p.objectives.voltage_dev,
                "cycle_lives_years": list(p.objectives.cycle_lives),
                "membership": list(p.membership),
                "mu_normalized": p.normalized,
                "schedule_kw": p.schedule.power.tolist(),
            }
            for p in front.points
        ],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# figures


def plot_front(path: Path, front: ParetoFront) -> None:
    f1 = [p.objectives.f1 for p in front.points]
    f2 = [p.objectives.f2 for p in front.points]
    life = [min(p.objectives.cycle_lives) if p.objectives.cycle_lives else 0.0
            for p in front.points]
    sel = front.selected
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(f2, f1, "o-", color="tab:blue")
    ax1.plot(f2[sel], f1[sel], "s", color="red", markersize=9,
             label="compromise")
    ax1.set_xlabel("F2 (losses + voltage deviation)")
    ax1.set_ylabel("F1 ($)")
    ax1.set_title("Pareto front")
    ax1.legend()
    ax2.plot(f2, life, "o-", color="tab:green")
    ax2.plot(f2[sel], life[sel], "s", color="red", markersize=9)
    ax2.set_xlabel("F2 (losses + voltage deviation)")
    ax2.set_ylabel("battery life (years)")
    ax2.set_title("Battery life along the front")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_schedule(path: Path, scenario: Scenario, schedule: Schedule) -> None:
    trajs = [simulate_soc(schedule.power[k], p, scenario.profiles.dt)
             for k, p in enumerate(scenario.fleet.bess_units)]
    slots = np.arange(schedule.horizon)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    for k, params in enumerate(scenario.fleet.bess_units):
        ax1.step(slots, schedule.power[k], where="post",
                 label=f"BESS @ bus {params.bus}")
        ax2.plot(np.arange(schedule.horizon + 1), trajs[k].soc,
                 label=f"BESS @ bus {params.bus}")
    ax1.axhline(0.0, color="gray", lw=0.5)
    ax1.set_ylabel("power (kW, +discharge)")
    ax1.legend()
    ax2.set_ylabel("state of charge")
    ax2.set_xlabel("slot")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(path: Path, param: str, values: list[float],
               rows: list[list]) -> None:
    # rows follow SWEEP_HEADER: value, energy, degradation, losses, vdev
    arr = np.array([[r[1], r[2], r[3], r[4]] for r in rows], dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(values, arr[:, 0], "o-", label="energy cost ($)")
    ax1.plot(values, arr[:, 1], "s-", label="degradation cost ($)")
    ax1.set_xlabel(param)
    ax1.set_ylabel("$")
    ax1.legend()
    ax2.plot(values, arr[:, 2], "o-", label="losses (kWh)")
    ax2.plot(values, arr[:, 3], "s-", label="voltage deviation")
    ax2.set_xlabel(param)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


SWEEP_HEADER = ["value", "energy_cost_usd", "degradation_cost_usd",
                "losses_kwh", "voltage_dev_pu"]
