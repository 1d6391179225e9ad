"""Objective evaluation: monetary cost and network-performance cost of a
candidate schedule, simulated over the whole horizon."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import degradation as deg
from .grid import DeviceFleet, NetworkModel, ScenarioProfiles, nodal_injections_all
from .powerflow import (CompiledNetwork, PowerFlowError, PowerFlowSolution,
                        compile_network, solve_slots)

SOC_NOISE_FLOOR = 0.01  # ignore SoC wiggles below 1% when counting cycles
FEASIBLE_TOL = 1e-6  # normalized violation below this counts as feasible


@dataclass
class Scenario:
    """Everything fixed about a run: the grid, the devices, and the day."""
    network: NetworkModel
    fleet: DeviceFleet
    profiles: ScenarioProfiles

    @cached_property
    def compiled(self) -> CompiledNetwork:
        return compile_network(self.network)

    @property
    def n_bess(self) -> int:
        return len(self.fleet.bess_units)

    @cached_property
    def v_min_arr(self) -> np.ndarray:
        return np.array([b.v_min for b in self.network.buses])

    @cached_property
    def v_max_arr(self) -> np.ndarray:
        return np.array([b.v_max for b in self.network.buses])

    @cached_property
    def s_max_arr(self) -> np.ndarray:
        return np.array([b.s_max for b in self.network.buses])


@dataclass(frozen=True)
class ObjectiveValues:
    energy_cost: float  # $
    degradation_cost: float  # $, summed over BESS units
    f1: float  # energy_cost + lam1 * degradation_cost
    loss_total: float  # kWh
    voltage_dev: float  # p.u.-sum over slots and buses
    f2: float  # loss_total + lam2 * voltage_dev
    feasible: bool
    violation: float  # aggregate normalized magnitude
    cycle_lives: tuple[float, ...] = ()  # years per BESS
    diagnostics: str = ""


@dataclass
class SimulationResult:
    """Shared simulation core used by both objective evaluation and the
    feasibility report."""
    solutions: list[PowerFlowSolution]
    trajectories: list[deg.SocTrajectory]
    converged: bool
    diagnostics: str = ""


def energy_purchase_cost(prices: np.ndarray, grid_power: np.ndarray, dt: float,
                         export_revenue: bool = False) -> float:
    """Cost of grid energy: sum of price * slack power * dt.  Exported energy
    (negative slack) earns nothing unless ``export_revenue`` is set."""
    prices = np.asarray(prices, dtype=float)
    grid_power = np.asarray(grid_power, dtype=float)
    if prices.shape != grid_power.shape:
        raise ValueError(f"length mismatch: {prices.shape} vs {grid_power.shape}")
    p = grid_power if export_revenue else np.maximum(grid_power, 0.0)
    return float(np.sum(prices * p) * dt)


def loss_total(solutions: list[PowerFlowSolution], dt: float) -> float:
    """Network I^2 R energy over the horizon, in kWh."""
    _require_converged(solutions)
    return float(sum(s.loss_active for s in solutions) * dt)


def voltage_deviation(solutions: list[PowerFlowSolution]) -> float:
    """Sum of |1 - v| over every bus and slot."""
    _require_converged(solutions)
    return float(sum(np.sum(np.abs(1.0 - s.voltages)) for s in solutions))


def _require_converged(solutions):
    bad = [i for i, s in enumerate(solutions) if not s.converged]
    if bad:
        raise PowerFlowError(f"non-converged slots: {bad}",
                             max(solutions[i].worst_mismatch for i in bad))


def simulate(scenario: Scenario, schedule) -> SimulationResult:
    """Simulate SoC for every BESS and solve the flow for every slot."""
    profiles = scenario.profiles
    trajectories = [deg.simulate_soc(schedule.power[k], params, profiles.dt)
                    for k, params in enumerate(scenario.fleet.bess_units)]
    inj = nodal_injections_all(scenario.network, scenario.fleet, profiles, schedule)
    try:
        solutions = solve_slots(scenario.compiled, inj)
    except PowerFlowError as exc:
        return SimulationResult([], trajectories, converged=False,
                                diagnostics=str(exc))
    if not all(s.converged for s in solutions):
        worst = max(s.worst_mismatch for s in solutions)
        return SimulationResult(solutions, trajectories, converged=False,
                                diagnostics=f"worst mismatch {worst:.3e} p.u.")
    return SimulationResult(solutions, trajectories, converged=True)


def evaluate_schedule(network: NetworkModel, fleet: DeviceFleet,
                      profiles: ScenarioProfiles, schedule,
                      lam1: float = 1.0, lam2: float = 1.0,
                      export_revenue: bool = False,
                      scenario: Scenario | None = None) -> ObjectiveValues:
    """Full objective evaluation of one schedule.

    Pass ``scenario`` to reuse a compiled network across many calls (the
    optimizer does); the explicit arguments are then ignored.
    """
    if scenario is None:
        scenario = Scenario(network, fleet, profiles)
    sim = simulate(scenario, schedule)
    violation = _violation_scalar(scenario, schedule, sim)

    lives = []
    c_deg = 0.0
    for traj, params in zip(sim.trajectories, scenario.fleet.bess_units):
        events = deg.extract_dod_events(traj, noise_floor=SOC_NOISE_FLOOR)
        life = deg.cycle_life(events, params,
                              horizon_hours=scenario.profiles.horizon
                              * scenario.profiles.dt)
        lives.append(life)
        c_deg += deg.degradation_cost(params, life)

    if not sim.converged:
        return ObjectiveValues(
            energy_cost=float("nan"), degradation_cost=c_deg, f1=float("inf"),
            loss_total=float("nan"), voltage_dev=float("nan"), f2=float("inf"),
            feasible=False, violation=float("inf"), cycle_lives=tuple(lives),
            diagnostics=sim.diagnostics or "power flow failed")

    slack = np.array([s.slack_active for s in sim.solutions])
    c_energy = energy_purchase_cost(scenario.profiles.price, slack,
                                    scenario.profiles.dt,
                                    export_revenue=export_revenue)
    losses = loss_total(sim.solutions, scenario.profiles.dt)
    vdev = voltage_deviation(sim.solutions)
    return ObjectiveValues(
        energy_cost=c_energy,
        degradation_cost=c_deg,
        f1=c_energy + lam1 * c_deg,
        loss_total=losses,
        voltage_dev=vdev,
        f2=losses + lam2 * vdev,
        feasible=violation < FEASIBLE_TOL,
        violation=violation,
        cycle_lives=tuple(lives),
    )


def _violation_scalar(scenario: Scenario, schedule,
                      sim: SimulationResult) -> float:
    """Aggregate normalized constraint violation (dimensionless)."""
    total = 0.0
    for k, params in enumerate(scenario.fleet.bess_units):
        excess = np.maximum(np.abs(schedule.power[k]) - params.p_max, 0.0)
        total += float(np.sum(excess)) / params.p_max
        total += sum(e.magnitude for e in sim.trajectories[k].excursions)
    if not sim.converged:
        return float("inf")
    volts = np.stack([s.voltages for s in sim.solutions])  # (T, n_bus)
    apparent = np.stack([s.bus_apparent for s in sim.solutions])
    total += float(np.sum(np.maximum(scenario.v_min_arr - volts, 0.0)))
    total += float(np.sum(np.maximum(volts - scenario.v_max_arr, 0.0)))
    total += float(np.sum(np.maximum(apparent - scenario.s_max_arr, 0.0)
                          / scenario.s_max_arr))
    return total
