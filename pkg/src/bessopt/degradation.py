"""Battery state-of-charge dynamics, cycle counting, and degradation cost.

The SoC update keeps the charging efficiency in the denominator, as the
scheduling formulation states it.  That form is physically inverted (a lossy
charger would *add* SoC faster), so ``physical_efficiency=True`` switches the
charge term to dt * eta_charge * p / capacity.  Default is the verbatim form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HOURS_PER_DAY = 24.0
DAILY_CYCLE_SCALE = 365.0 * 0.5  # half-cycle per event, one day scaled to a year


class ComplementarityError(ValueError):
    """Charge and discharge requested in the same slot."""


@dataclass(frozen=True)
class BessParams:
    bus: int
    capacity: float  # kWh
    p_max: float  # kW, applies to both directions
    eta_charge: float = 0.95
    eta_discharge: float = 0.95
    soc_min: float = 0.1
    soc_max: float = 0.9
    soc_init: float = 0.5
    invest_cost: float = 250_000.0  # $
    discount_rate: float = 0.05  # per year
    ref_cycle_life: float = 3650.0  # reference-life constant at 100% DoD
    dod_exponent: float = 1.1  # empirical range 0.8 .. 2.1
    calendar_life_cap: float = 15.0  # years
    physical_efficiency: bool = False

    def __post_init__(self):
        if not (0.0 <= self.soc_min < self.soc_max <= 1.0):
            raise ValueError("need 0 <= soc_min < soc_max <= 1")
        if not (self.soc_min <= self.soc_init <= self.soc_max):
            raise ValueError("soc_init outside [soc_min, soc_max]")
        if self.p_max <= 0 or self.capacity <= 0:
            raise ValueError("capacity and p_max must be positive")
        if not (0.8 <= self.dod_exponent <= 2.1):
            raise ValueError("dod_exponent outside the empirical range [0.8, 2.1]")
        for eta in (self.eta_charge, self.eta_discharge):
            if not (0.0 < eta <= 1.0):
                raise ValueError("efficiencies must lie in (0, 1]")


@dataclass(frozen=True)
class SocExcursion:
    slot: int  # index of the trajectory entry that breached its bound
    magnitude: float  # how far outside [soc_min, soc_max]


@dataclass(frozen=True)
class SocTrajectory:
    soc: np.ndarray  # length horizon + 1; soc[0] == soc_init
    excursions: tuple[SocExcursion, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.excursions


@dataclass(frozen=True)
class DodEvent:
    start_slot: int
    end_slot: int
    depth: float  # |delta SoC| of the monotone segment
    direction: str  # "charge" | "discharge"


def soc_step(soc: float, p_discharge: float, p_charge: float,
             params: BessParams, dt: float) -> float:
    """One slot of SoC dynamics.  At most one of charge/discharge may be
    nonzero; bound breaches are the caller's to detect (never clamped here).
    """
    if p_discharge < 0 or p_charge < 0:
        raise ValueError("powers must be non-negative")
    if p_discharge > 0 and p_charge > 0:
        raise ComplementarityError("simultaneous charge and discharge")
    if params.physical_efficiency:
        gain = dt * params.eta_charge * p_charge / params.capacity
    else:
        gain = dt * p_charge / (params.eta_charge * params.capacity)
    return soc - dt * p_discharge / (params.eta_discharge * params.capacity) + gain


def simulate_soc(schedule_kw: np.ndarray, params: BessParams,
                 dt: float) -> SocTrajectory:
    """Fold :func:`soc_step` over a signed power schedule (positive kW =
    discharge).  Excursions outside the SoC band are recorded, not clamped;
    the first entry of ``excursions`` is the earliest offending slot.
    """
    schedule_kw = np.asarray(schedule_kw, dtype=float)
    soc = np.empty(len(schedule_kw) + 1)
    soc[0] = params.soc_init
    for t, p in enumerate(schedule_kw):
        soc[t + 1] = soc_step(soc[t], max(p, 0.0), max(-p, 0.0), params, dt)
    excursions = []
    for t, s in enumerate(soc):
        over = max(s - params.soc_max, params.soc_min - s)
        if over > 1e-12:
            excursions.append(SocExcursion(slot=t, magnitude=over))
    return SocTrajectory(soc=soc, excursions=tuple(excursions))


def extract_dod_events(trajectory: SocTrajectory,
                       noise_floor: float = 0.01) -> list[DodEvent]:
    """Split the trajectory into maximal monotone segments, one event each.

    Zero-change slots extend the running segment; segments shallower than
    ``noise_floor`` are dropped so solver jitter does not register as cycling.
    """
    soc = np.asarray(trajectory.soc, dtype=float)
    deltas = np.diff(soc)
    events: list[DodEvent] = []
    start = 0
    sign = 0
    for t, d in enumerate(deltas):
        s = 0 if d == 0 else (1 if d > 0 else -1)
        if s == 0:
            continue
        if sign == 0:
            sign = s
            start = t
        elif s != sign:
            _close_event(events, soc, start, t, sign, noise_floor)
            sign = s
            start = t
    if sign != 0:
        _close_event(events, soc, start, len(deltas), sign, noise_floor)
    return events


def _close_event(events, soc, start, end, sign, noise_floor):
    depth = abs(soc[end] - soc[start])
    if depth >= noise_floor:
        events.append(DodEvent(start_slot=start, end_slot=end, depth=depth,
                               direction="charge" if sign > 0 else "discharge"))


def cycle_life(events: list[DodEvent], params: BessParams,
               horizon_hours: float = HOURS_PER_DAY) -> float:
    """Estimated battery life in years from one representative period.

    Each event counts as half a cycle; depths are weighted by the DoD
    exponent.  Horizons longer than a day are normalized per day.  An idle
    battery (no events) lives exactly ``calendar_life_cap`` years, which also
    caps every other estimate.
    """
    stress = sum(e.depth ** params.dod_exponent for e in events)
    stress /= horizon_hours / HOURS_PER_DAY  # per-day equivalent
    if stress <= 0.0:
        return params.calendar_life_cap
    years = params.ref_cycle_life / (DAILY_CYCLE_SCALE * stress)
    return min(years, params.calendar_life_cap)


def degradation_cost(params: BessParams, t_cycle: float) -> float:
    """Annuitized degradation cost: the capital-recovery payment that repays
    the battery investment over its estimated life."""
    if t_cycle <= 0:
        raise ValueError("t_cycle must be positive")
    r = params.discount_rate
    if r == 0.0:
        return params.invest_cost / t_cycle
    # r/(1-(1+r)^-T) form stays finite for very long lives
    return params.invest_cost * r / (1.0 - (1.0 + r) ** (-t_cycle))


def schedule_degradation(schedule_kw: np.ndarray, params: BessParams,
                         dt: float, noise_floor: float = 0.01) -> tuple[float, float]:
    """Convenience: (cycle life in years, degradation cost in $) for one
    BESS schedule row."""
    traj = simulate_soc(schedule_kw, params, dt)
    events = extract_dod_events(traj, noise_floor=noise_floor)
    life = cycle_life(events, params, horizon_hours=len(schedule_kw) * dt)
    return life, degradation_cost(params, life)
