"""Inner single-objective solver over BESS schedules.

Decision vector: signed power per BESS per slot (positive = discharge), which
removes the binary charge/discharge choice entirely.  The search is a
differential-evolution loop with an adaptive exterior penalty folding in SoC,
voltage, apparent-power, power-bound, and optional F2 <= epsilon violations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import (FEASIBLE_TOL, ObjectiveValues, Scenario,
                         evaluate_schedule, loss_total, simulate,
                         voltage_deviation)

EPS_NORM_FLOOR = 1.0  # normalization floor for the F2-cap violation term


@dataclass(frozen=True)
class Schedule:
    """Per-BESS per-slot signed power in kW; rows follow fleet.bess_units."""
    power: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "power",
                           np.atleast_2d(np.asarray(self.power, dtype=float)))

    @property
    def n_bess(self) -> int:
        return self.power.shape[0]

    @property
    def horizon(self) -> int:
        return self.power.shape[1]

    def charge_kw(self) -> np.ndarray:
        return np.maximum(-self.power, 0.0)

    def discharge_kw(self) -> np.ndarray:
        return np.maximum(self.power, 0.0)


@dataclass(frozen=True)
class SolverConfig:
    population: int = 32
    max_evals: int = 20_000
    seed: int = 1
    penalty_weight: float = 1e3
    penalty_growth: float = 2.0
    tolerance: float = 1e-6  # objective stall threshold
    stall_generations: int = 40
    noise_band: float = 0.02  # declared relative solver noise (monotonicity checks)

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if self.penalty_weight <= 0:
            raise ValueError("penalty_weight must be positive")


@dataclass(frozen=True)
class ViolationItem:
    kind: str  # "power_bound" | "soc" | "voltage" | "bus_apparent" | "f2_cap"
    unit: int  # BESS index, bus id, or -1
    slot: int  # -1 when not slot-specific
    magnitude: float  # native units (kW, SoC fraction, p.u., kVA, F2 units)


@dataclass(frozen=True)
class ViolationReport:
    items: tuple[ViolationItem, ...]
    total: float  # normalized scalar, the penalty input

    @property
    def feasible(self) -> bool:
        return self.total < FEASIBLE_TOL


def feasibility(scenario: Scenario, schedule: Schedule,
                epsilon: float | None = None, lam2: float = 1.0) -> ViolationReport:
    """Itemized constraint check for one schedule."""
    items: list[ViolationItem] = []
    total = 0.0
    sim = simulate(scenario, schedule)
    for k, params in enumerate(scenario.fleet.bess_units):
        for t, p in enumerate(schedule.power[k]):
            excess = abs(p) - params.p_max
            if excess > 0:
                items.append(ViolationItem("power_bound", k, t, excess))
                total += excess / params.p_max
        for exc in sim.trajectories[k].excursions:
            items.append(ViolationItem("soc", k, exc.slot, exc.magnitude))
            total += exc.magnitude
    if not sim.converged:
        items.append(ViolationItem("power_flow", -1, -1, float("inf")))
        return ViolationReport(tuple(items), float("inf"))
    for t, sol in enumerate(sim.solutions):
        for i, bus in enumerate(scenario.network.buses):
            v = sol.voltages[i]
            band = max(bus.v_min - v, 0.0) + max(v - bus.v_max, 0.0)
            if band > 0:
                items.append(ViolationItem("voltage", bus.id, t, band))
                total += band
            over = sol.bus_apparent[i] - bus.s_max
            if over > 0:
                items.append(ViolationItem("bus_apparent", bus.id, t, over))
                total += over / bus.s_max
    if epsilon is not None:
        f2 = (loss_total(sim.solutions, scenario.profiles.dt)
              + lam2 * voltage_deviation(sim.solutions))
        if f2 > epsilon:
            items.append(ViolationItem("f2_cap", -1, -1, f2 - epsilon))
            total += (f2 - epsilon) / max(abs(epsilon), EPS_NORM_FLOOR)
    return ViolationReport(tuple(items), total)


def greedy_arbitrage_schedule(scenario: Scenario) -> Schedule:
    """Price-greedy seed: charge through the cheapest slots, discharge
    through the priciest, at a conservative half-power, respecting SoC."""
    profiles = scenario.profiles
    T = profiles.horizon
    order = np.argsort(profiles.price, kind="stable")
    n_cheap = max(T // 4, 1)
    power = np.zeros((len(scenario.fleet.bess_units), T))
    for k, params in enumerate(scenario.fleet.bess_units):
        p = 0.5 * params.p_max
        plan = np.zeros(T)
        plan[order[:n_cheap]] = -p
        plan[order[-n_cheap:]] = p
        soc = params.soc_init
        for t in range(T):
            trial = soc + profiles.dt * (
                np.maximum(-plan[t], 0) / (params.eta_charge * params.capacity)
                - np.maximum(plan[t], 0) / (params.eta_discharge * params.capacity))
            if params.soc_min <= trial <= params.soc_max:
                soc = trial
            else:
                plan[t] = 0.0
        power[k] = plan
    return Schedule(power)


def solve_single(scenario: Scenario, target: str = "F1",
                 epsilon: float | None = None,
                 lam1: float = 1.0, lam2: float = 1.0,
                 config: SolverConfig = SolverConfig(),
                 warm_starts: tuple[Schedule, ...] = ()) -> tuple[Schedule, ObjectiveValues]:
    """Minimize F1 or F2 over schedules with an adaptive exterior penalty.

    Deterministic for a fixed (scenario, config, seed).  Returns the best
    feasible point found, or the least-violating point with feasible=False if
    the budget runs out without one.
    """
    if target not in ("F1", "F2"):
        raise ValueError(f"target must be 'F1' or 'F2', got {target!r}")
    if epsilon is not None and target != "F1":
        raise ValueError("epsilon cap only applies when minimizing F1")

    fleet = scenario.fleet.bess_units
    T = scenario.profiles.horizon
    dim = len(fleet) * T
    p_max = np.repeat([p.p_max for p in fleet], T)
    lo, hi = -p_max, p_max

    def decode(x: np.ndarray) -> Schedule:
        return Schedule(x.reshape(len(fleet), T))

    def assess(x: np.ndarray) -> tuple[float, float, ObjectiveValues]:
        obj = evaluate_schedule(None, None, None, decode(x), lam1, lam2,
                                scenario=scenario)
        raw = obj.f1 if target == "F1" else obj.f2
        viol = obj.violation
        if epsilon is not None and np.isfinite(obj.f2) and obj.f2 > epsilon:
            viol += (obj.f2 - epsilon) / max(abs(epsilon), EPS_NORM_FLOOR)
        return raw, viol, obj

    rng = np.random.default_rng(config.seed)
    n_pop = config.population
    pop = np.empty((n_pop, dim))
    seeds = [Schedule(np.zeros((len(fleet), T))), greedy_arbitrage_schedule(scenario)]
    seeds.extend(warm_starts)
    for i in range(n_pop):
        if i < len(seeds):
            pop[i] = np.clip(seeds[i].power.ravel(), lo, hi)
        else:
            pop[i] = rng.uniform(-0.4, 0.4, dim) * p_max

    raw = np.empty(n_pop)
    viol = np.empty(n_pop)
    objs: list[ObjectiveValues] = [None] * n_pop
    for i in range(n_pop):
        raw[i], viol[i], objs[i] = assess(pop[i])
    evals = n_pop

    weight = config.penalty_weight

    def fitness(r, v):
        return r + weight * v

    best_feas: tuple[float, Schedule, ObjectiveValues] | None = None

    def note_feasible(r, x, o):
        nonlocal best_feas
        if o.violation < FEASIBLE_TOL and (epsilon is None or o.f2 <= epsilon
                                           * (1 + 1e-9)):
            if best_feas is None or r < best_feas[0]:
                best_feas = (r, decode(x.copy()), o)

    for i in range(n_pop):
        note_feasible(raw[i], pop[i], objs[i])

    f_weight, cr = 0.7, 0.9
    stall = 0
    prev_best = np.inf
    while evals + n_pop <= config.max_evals:
        fit = fitness(raw, viol)
        best = int(np.argmin(fit))
        for i in range(n_pop):
            idx = rng.choice(n_pop, size=3, replace=False)
            a, b, c = pop[idx]
            mutant = pop[i] + f_weight * (pop[best] - pop[i]) + f_weight * (a - b)
            cross = rng.random(dim) < cr
            cross[rng.integers(dim)] = True
            trial = np.where(cross, mutant, pop[i])
            np.clip(trial, lo, hi, out=trial)
            r, v, o = assess(trial)
            evals += 1
            note_feasible(r, trial, o)
            if fitness(r, v) <= fit[i]:
                pop[i], raw[i], viol[i], objs[i] = trial, r, v, o
                fit[i] = fitness(r, v)
        gen_best = int(np.argmin(fitness(raw, viol)))
        if viol[gen_best] >= FEASIBLE_TOL:
            weight = min(weight * config.penalty_growth, 1e12)
        # stall detection on the best penalized value
        cur = float(fitness(raw, viol)[gen_best])
        if prev_best - cur < config.tolerance:
            stall += 1
            if stall >= config.stall_generations:
                break
        else:
            stall = 0
        prev_best = min(prev_best, cur)

    if best_feas is not None:
        _, sched, obj = best_feas
        return sched, obj
    # best effort: least violating, ties by objective
    order = np.lexsort((raw, viol))
    i = int(order[0])
    return decode(pop[i].copy()), objs[i]
