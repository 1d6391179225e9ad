"""Command-line entry point.

Subcommands: ``validate``, ``powerflow``, ``case``, ``pareto``, ``sweep``.
Exit codes: 0 success, 2 configuration error, 3 infeasible result,
4 power-flow non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report
from .config import ConfigError, ScenarioConfig, load_config
from .grid import (LimitError, NetworkFormatError, TopologyError,
                   nodal_injections)
from .objectives import Scenario, simulate
from .optimizer import Schedule, solve_single
from .pareto import ParetoError, epsilon_sweep
from .powerflow import PowerFlowError, check_limits, solve_slot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NO_CONVERGENCE = 4

CONFIG_ERRORS = (ConfigError, NetworkFormatError, TopologyError, LimitError,
                 ValueError, FileNotFoundError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bessopt",
        description="Degradation-aware battery scheduling for radial "
                    "distribution networks.")
    parser.add_argument("--config", "-c", required=True, help="scenario TOML")
    parser.add_argument("--output", "-o", help="override output directory")
    parser.add_argument("--seed", type=int, help="override solver seed")
    parser.add_argument("--lambda1", type=float, dest="lam1",
                        help="override degradation weight in F1")
    parser.add_argument("--lambda2", type=float, dest="lam2",
                        help="override voltage-deviation weight in F2")
    parser.add_argument("--max-evals", type=int, help="override solver budget")
    parser.add_argument("--population", type=int, help="override population")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", help="load and validate the scenario")

    p_flow = sub.add_parser("powerflow", help="solve one slot, idle fleet")
    p_flow.add_argument("--slot", type=int, default=0)

    p_case = sub.add_parser("case", help="run one study case")
    p_case.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    p_case.add_argument("--points", type=int, help="epsilon grid size (case 3)")

    p_par = sub.add_parser("pareto", help="epsilon sweep + compromise")
    p_par.add_argument("--points", type=int, help="epsilon grid size")

    p_sweep = sub.add_parser("sweep", help="lambda sensitivity sweep")
    p_sweep.add_argument("--param", choices=("lambda1", "lambda2"),
                         required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated weights, e.g. 0.5,1,2,4")
    p_sweep.add_argument("--points", type=int, help="epsilon grid size")
    return parser


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.output:
        cfg.output_dir = Path(args.output)
    if args.lam1 is not None:
        cfg.lam1 = args.lam1
    if args.lam2 is not None:
        cfg.lam2 = args.lam2
    solver = cfg.solver
    if args.seed is not None:
        solver = replace(solver, seed=args.seed)
    if args.max_evals is not None:
        solver = replace(solver, max_evals=args.max_evals)
    if args.population is not None:
        solver = replace(solver, population=args.population)
    cfg.solver = solver
    if cfg.lam1 < 0 or cfg.lam2 < 0:
        raise ConfigError("lambda weights must be >= 0")
    return cfg


def cmd_validate(cfg: ScenarioConfig, scenario: Scenario, args) -> int:
    net = scenario.network
    print(f"network: {net.n_bus} buses, {len(net.lines)} lines, "
          f"slack = bus {net.slack.id}, base {net.base_voltage} kV / "
          f"{net.base_power} MVA")
    print(f"profiles: {scenario.profiles.horizon} slots of "
          f"{scenario.profiles.dt} h")
    print(f"fleet: {len(scenario.fleet.pv_units)} PV, "
          f"{len(scenario.fleet.ev_stations)} EV stations, "
          f"{scenario.n_bess} BESS")
    print("scenario OK")
    return EXIT_OK


def cmd_powerflow(cfg: ScenarioConfig, scenario: Scenario, args) -> int:
    T = scenario.profiles.horizon
    if not 0 <= args.slot < T:
        raise ConfigError(f"slot {args.slot} outside [0, {T})")
    idle = Schedule(np.zeros((max(scenario.n_bess, 1), T)))
    inj = nodal_injections(scenario.network, scenario.fleet,
                           scenario.profiles, idle, args.slot)
    sol = solve_slot(scenario.compiled, inj)
    if not sol.converged:
        print(f"power flow did not converge: worst mismatch "
              f"{sol.worst_mismatch:.3e} p.u.", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    print(f"slot {args.slot}: converged in {sol.iterations} iterations")
    print(f"slack injection: {sol.slack_active:.3f} kW, "
          f"losses: {sol.loss_active:.3f} kW")
    print("bus,voltage_pu,p_kw,q_kvar")
    for i, bus in enumerate(scenario.network.buses):
        print(f"{bus.id},{sol.voltages[i]:.6f},{sol.bus_active[i]:.3f},"
              f"{sol.bus_reactive[i]:.3f}")
    violations = check_limits(scenario.network, sol)
    if violations:
        print(f"{len(violations)} limit violations:")
        for v in violations:
            print(f"  {v.kind} at {v.where}: {v.magnitude:.6g}")
    else:
        print("no limit violations")
    return EXIT_OK


def _write_point(out: Path, tag: str, scenario: Scenario,
                 schedule: Schedule) -> None:
    report.write_schedule(out / f"{tag}_schedule.csv", scenario, schedule)
    report.write_soc(out / f"{tag}_soc.csv", scenario, schedule)
    sim = simulate(scenario, schedule)
    if sim.converged:
        report.write_voltages(out / f"{tag}_voltages.csv", scenario,
                              sim.solutions)
    report.plot_schedule(out / f"{tag}_schedule.png", scenario, schedule)


def cmd_case(cfg: ScenarioConfig, scenario: Scenario, args) -> int:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if args.case in (1, 2):
        target = "F1" if args.case == 1 else "F2"
        # case 2 shares the F2-anchor seed of the case-3 sweep, so the three
        # cases are mutually consistent for a fixed base seed
        solver = (cfg.solver if args.case == 1
                  else replace(cfg.solver, seed=cfg.solver.seed + 1))
        sched, obj = solve_single(scenario, target=target, lam1=cfg.lam1,
                                  lam2=cfg.lam2, config=solver)
        report.write_summary(out / "summary.csv",
                             [report.summary_row(f"case{args.case}", obj)])
        _write_point(out, f"case{args.case}", scenario, sched)
        if not obj.feasible:
            print(f"no feasible schedule found (violation {obj.violation:.4g})"
                  f" {obj.diagnostics}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"case {args.case}: F1 = {obj.f1:.2f}, F2 = {obj.f2:.2f} "
              f"-> {out}")
        return EXIT_OK

    n_points = args.points or cfg.n_pareto_points
    front = epsilon_sweep(scenario, cfg.lam1, cfg.lam2, n_points=n_points,
                          config=cfg.solver)
    best = front.compromise
    report.write_summary(out / "summary.csv",
                         [report.summary_row("case3", best.objectives)])
    report.write_front_csv(out / "front.csv", front)
    report.write_front_json(out / "front.json", front)
    report.plot_front(out / "front.png", front)
    _write_point(out, "case3", scenario, best.schedule)
    print(f"case 3: {len(front.points)} non-dominated points, compromise "
          f"F1 = {best.objectives.f1:.2f}, F2 = {best.objectives.f2:.2f} "
          f"-> {out}")
    return EXIT_OK


def cmd_pareto(cfg: ScenarioConfig, scenario: Scenario, args) -> int:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    n_points = args.points or cfg.n_pareto_points
    front = epsilon_sweep(scenario, cfg.lam1, cfg.lam2, n_points=n_points,
                          config=cfg.solver)
    report.write_front_csv(out / "front.csv", front)
    report.write_front_json(out / "front.json", front)
    report.plot_front(out / "front.png", front)
    print(f"pareto: {len(front.points)} points, compromise index "
          f"{front.selected} -> {out}")
    return EXIT_OK


def cmd_sweep(cfg: ScenarioConfig, scenario: Scenario, args) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values: {exc}") from exc
    if len(values) < 2:
        raise ConfigError("sweep needs at least 2 values")
    if any(v < 0 for v in values):
        raise ConfigError("sweep values must be >= 0")
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    n_points = args.points or cfg.n_pareto_points
    rows = []
    for v in values:
        lam1 = v if args.param == "lambda1" else cfg.lam1
        lam2 = v if args.param == "lambda2" else cfg.lam2
        try:
            front = epsilon_sweep(scenario, lam1, lam2, n_points=n_points,
                                  config=cfg.solver)
        except ParetoError as exc:
            print(f"{args.param}={v}: sweep failed: {exc}", file=sys.stderr)
            continue
        o = front.compromise.objectives
        rows.append([v, o.energy_cost, o.degradation_cost, o.loss_total,
                     o.voltage_dev])
        print(f"{args.param}={v}: C^E={o.energy_cost:.2f} "
              f"C^D={o.degradation_cost:.2f} L={o.loss_total:.2f} "
              f"V={o.voltage_dev:.3f}")
    if len(rows) < 2:
        print("sweep produced fewer than 2 points", file=sys.stderr)
        return EXIT_INFEASIBLE
    report.write_csv(out / f"sweep_{args.param}.csv", report.SWEEP_HEADER, rows)
    report.plot_sweep(out / f"sweep_{args.param}.png", args.param,
                      [r[0] for r in rows], rows)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "powerflow": cmd_powerflow,
    "case": cmd_case,
    "pareto": cmd_pareto,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        scenario = cfg.load_scenario()
    except CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, scenario, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PowerFlowError as exc:
        print(f"power flow failed: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ParetoError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
