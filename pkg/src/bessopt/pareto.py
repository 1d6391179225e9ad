"""Pareto enumeration over (F1, F2) and fuzzy compromise selection.

The front is built by capping F2 at a grid of epsilon values between the two
single-objective anchors and re-minimizing F1 at each cap.  Each surviving
point gets a linear membership per objective; the compromise maximizes the
normalized aggregate membership.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .objectives import ObjectiveValues, Scenario
from .optimizer import Schedule, SolverConfig, solve_single

THREADS_ENV = "BESSOPT_THREADS"


class ParetoError(RuntimeError):
    """Sweep could not produce a usable front."""


@dataclass(frozen=True)
class ParetoPoint:
    schedule: Schedule
    objectives: ObjectiveValues
    epsilon: float | None = None
    membership: tuple[float, float] = (0.0, 0.0)  # (mu_F1, mu_F2)
    normalized: float = 0.0  # normalized aggregate membership


@dataclass(frozen=True)
class PayoffTable:
    f1_min: float
    f1_max: float
    f2_min: float
    f2_max: float


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[ParetoPoint, ...]  # ordered by F2
    payoff: PayoffTable
    selected: int  # index of the compromise point

    @property
    def compromise(self) -> ParetoPoint:
        return self.points[self.selected]


def fuzzy_membership(f: float, f_min: float, f_max: float) -> float:
    """Linear compatibility of an objective value: 1 at (or below) the best
    value seen on the front, 0 at (or above) the worst."""
    if f_min > f_max:
        raise ValueError("f_min must not exceed f_max")
    if f_min == f_max or f <= f_min:
        return 1.0
    if f >= f_max:
        return 0.0
    return (f_max - f) / (f_max - f_min)


def dominance_filter(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Keep exactly the points not dominated in (F1, F2); a point dominates
    another when it is <= in both objectives and < in at least one.
    Output is sorted by F2 (stable)."""
    kept = []
    for p in points:
        dominated = False
        for q in points:
            if q is p:
                continue
            if (q.objectives.f1 <= p.objectives.f1
                    and q.objectives.f2 <= p.objectives.f2
                    and (q.objectives.f1 < p.objectives.f1
                         or q.objectives.f2 < p.objectives.f2)):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    # duplicates in both objectives are mutually non-dominating; keep one
    unique: list[ParetoPoint] = []
    for p in kept:
        if not any(p.objectives.f1 == u.objectives.f1
                   and p.objectives.f2 == u.objectives.f2 for u in unique):
            unique.append(p)
    return sorted(unique, key=lambda p: (p.objectives.f2, p.objectives.f1))


def select_compromise(points: list[ParetoPoint]) -> tuple[int, list[ParetoPoint]]:
    """Attach memberships and pick the point with the largest normalized
    aggregate membership; ties go to the lower-F1 point."""
    if not points:
        raise ParetoError("empty front")
    f1s = [p.objectives.f1 for p in points]
    f2s = [p.objectives.f2 for p in points]
    bounds = (min(f1s), max(f1s), min(f2s), max(f2s))
    mus = [(fuzzy_membership(p.objectives.f1, bounds[0], bounds[1]),
            fuzzy_membership(p.objectives.f2, bounds[2], bounds[3]))
           for p in points]
    sums = [m1 + m2 for m1, m2 in mus]
    denom = sum(sums)
    normalized = [s / denom if denom > 0 else 1.0 / len(points) for s in sums]
    decorated = [replace(p, membership=mu, normalized=nk)
                 for p, mu, nk in zip(points, mus, normalized)]
    best = max(range(len(points)),
               key=lambda k: (normalized[k], -f1s[k]))
    return best, decorated


def payoff_table(scenario: Scenario, lam1: float = 1.0, lam2: float = 1.0,
                 config: SolverConfig = SolverConfig()
                 ) -> tuple[tuple[Schedule, ObjectiveValues],
                            tuple[Schedule, ObjectiveValues]]:
    """Anchor solves: (F1-optimal point, F2-optimal point).  F2_max is read
    at the F1 optimum and F1_max at the F2 optimum."""
    f1_point = solve_single(scenario, target="F1", lam1=lam1, lam2=lam2,
                            config=config)
    f2_point = solve_single(scenario, target="F2", lam1=lam1, lam2=lam2,
                            config=replace(config, seed=config.seed + 1))
    return f1_point, f2_point


def epsilon_sweep(scenario: Scenario, lam1: float = 1.0, lam2: float = 1.0,
                  n_points: int = 20,
                  config: SolverConfig = SolverConfig()) -> ParetoFront:
    """Enumerate the front with a uniform epsilon grid over [F2_min, F2_max].

    Each grid solve runs with seed = base seed + grid index and is warm
    started from both anchors, so the sweep is reproducible and independent
    of how many worker threads execute it (set via $BESSOPT_THREADS).
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    (s1, o1), (s2, o2) = payoff_table(scenario, lam1, lam2, config)
    # min/max guards keep the table well ordered even under solver noise
    payoff = PayoffTable(f1_min=min(o1.f1, o2.f1), f1_max=max(o1.f1, o2.f1),
                         f2_min=min(o1.f2, o2.f2), f2_max=max(o1.f2, o2.f2))
    eps_grid = np.linspace(payoff.f2_min, payoff.f2_max, n_points)
    warm = (s1, s2) + tuple(
        Schedule(a * s1.power + (1 - a) * s2.power) for a in (0.25, 0.5, 0.75))

    def solve_at(idx_eps):
        idx, eps = idx_eps
        cfg = replace(config, seed=config.seed + 100 + idx)
        try:
            sched, obj = solve_single(scenario, target="F1", epsilon=float(eps),
                                      lam1=lam1, lam2=lam2, config=cfg,
                                      warm_starts=warm)
        except Exception as exc:  # recorded, sweep continues
            return idx, None, str(exc)
        return idx, ParetoPoint(sched, obj, epsilon=float(eps)), None

    workers = max(int(os.environ.get(THREADS_ENV, "1")), 1)
    tasks = list(enumerate(eps_grid))
    if workers == 1:
        results = [solve_at(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_at, tasks))
    results.sort(key=lambda r: r[0])  # deterministic aggregation order

    candidates = [ParetoPoint(s1, o1, epsilon=None),
                  ParetoPoint(s2, o2, epsilon=None)]
    failures = []
    for idx, point, err in results:
        if point is None:
            failures.append((idx, err))
        elif point.objectives.feasible:
            candidates.append(point)
    front_points = dominance_filter([p for p in candidates
                                     if p.objectives.feasible])
    if len(front_points) < 2:
        raise ParetoError(
            f"fewer than 2 non-dominated feasible points survived "
            f"({len(failures)} solve failures: {failures[:3]})")
    selected, decorated = select_compromise(front_points)
    return ParetoFront(points=tuple(decorated), payoff=payoff, selected=selected)
