"""Backward/forward-sweep load flow for radial feeders.

Current-summation variant: load currents are aggregated leaf-to-root, then
voltages are propagated root-to-leaf.  Voltage-dependent loads follow the
exponential model p = p* (v/v*)^kappa and are re-evaluated every iteration
(reactive demand uses the same exponent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Injections, NetworkModel

DEFAULT_TOL = 1e-8  # p.u. voltage change between sweeps
DEFAULT_MAX_ITER = 100
VOLTAGE_FLOOR = 0.5  # p.u.; below this the solve is declared collapsed


class PowerFlowError(RuntimeError):
    """Non-convergence or voltage collapse; carries the worst mismatch."""

    def __init__(self, message: str, worst_mismatch: float = float("nan")):
        super().__init__(message)
        self.worst_mismatch = worst_mismatch


@dataclass(frozen=True)
class CompiledNetwork:
    """Topology arrays precomputed once; reused across thousands of solves."""
    network: NetworkModel
    order: np.ndarray  # bus indices in BFS order from the slack
    parent: np.ndarray  # parent bus index (-1 at slack)
    z_pu: np.ndarray  # complex impedance of the line feeding each bus
    line_r_pu: np.ndarray  # resistance feeding each bus (0 at slack)
    v_star: np.ndarray
    kappa: np.ndarray
    slack_index: int
    line_of_bus: np.ndarray  # index into network.lines, -1 at slack


def compile_network(net: NetworkModel) -> CompiledNetwork:
    n = net.n_bus
    index = net.bus_index()
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for li, ln in enumerate(net.lines):
        a, b = index[ln.from_bus], index[ln.to_bus]
        adj[a].append((b, li))
        adj[b].append((a, li))

    root = index[net.slack.id]
    parent = np.full(n, -1, dtype=int)
    line_of_bus = np.full(n, -1, dtype=int)
    order = [root]
    seen = {root}
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v, li in adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                line_of_bus[v] = li
                order.append(v)

    z_pu = np.zeros(n, dtype=complex)
    for b in range(n):
        if line_of_bus[b] >= 0:
            ln = net.lines[line_of_bus[b]]
            z_pu[b] = (ln.resistance + 1j * ln.reactance) / net.z_base
    return CompiledNetwork(
        network=net,
        order=np.array(order, dtype=int),
        parent=parent,
        z_pu=z_pu,
        line_r_pu=z_pu.real.copy(),
        v_star=np.array([b.v_nominal for b in net.buses]),
        kappa=np.array([b.load_exponent for b in net.buses]),
        slack_index=root,
        line_of_bus=line_of_bus,
    )


@dataclass(frozen=True)
class PowerFlowSolution:
    voltages: np.ndarray  # |v| per bus, p.u.
    slack_active: float  # kW injected at the slack
    loss_active: float  # kW, sum of I^2 R over branches
    branch_apparent: np.ndarray  # kVA per line, sending end
    bus_apparent: np.ndarray  # kVA net demand magnitude per bus
    converged: bool
    iterations: int
    worst_mismatch: float  # p.u. voltage change of the last sweep
    bus_active: np.ndarray  # kW consumed per bus at the solved voltages
    bus_reactive: np.ndarray  # kvar


def solve_slot(net: NetworkModel | CompiledNetwork, injections: Injections,
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PowerFlowSolution:
    """Solve a single time slot; see :func:`solve_slots` for batches."""
    sols = solve_slots(net, _as_matrix(injections), tol=tol, max_iter=max_iter)
    return sols[0]


def _as_matrix(inj: Injections) -> Injections:
    def col(a):
        a = np.asarray(a, dtype=float)
        return a[:, None] if a.ndim == 1 else a
    return Injections(col(inj.p_const), col(inj.q_const),
                      col(inj.p_vdep), col(inj.q_vdep))


def solve_slots(net: NetworkModel | CompiledNetwork, injections: Injections,
                tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> list[PowerFlowSolution]:
    """Solve every column of ``injections`` (shape (n_bus, n_slots)) at once.

    All slots share the sweep loop; results are identical to solving each
    slot on its own because the columns never interact.
    """
    comp = net if isinstance(net, CompiledNetwork) else compile_network(net)
    model = comp.network
    inj = _as_matrix(injections)
    n, T = inj.p_const.shape
    if n != model.n_bus:
        raise ValueError(f"injections for {n} buses, network has {model.n_bus}")

    s_base = model.s_base_kva  # kVA
    p_const = inj.p_const / s_base
    q_const = inj.q_const / s_base
    p_vdep = inj.p_vdep / s_base
    q_vdep = inj.q_vdep / s_base

    order = comp.order
    parent = comp.parent
    z = comp.z_pu
    v_star = comp.v_star[:, None]
    kappa = comp.kappa[:, None]
    down = order[1:][::-1]  # leaves first

    v = np.ones((n, T), dtype=complex)
    converged = False
    mismatch = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        vm = np.abs(v)
        scale = (vm / v_star) ** kappa
        s_load = (p_const + p_vdep * scale) + 1j * (q_const + q_vdep * scale)
        i_br = np.conj(s_load / v)
        for b in down:
            i_br[parent[b]] += i_br[b]
        v_new = v.copy()
        v_new[comp.slack_index] = comp.v_star[comp.slack_index]
        for b in order[1:]:
            v_new[b] = v_new[parent[b]] - z[b] * i_br[b]
        mismatch = float(np.max(np.abs(v_new - v)))
        v = v_new
        if np.min(np.abs(v)) < VOLTAGE_FLOOR:
            raise PowerFlowError(
                f"voltage collapse below {VOLTAGE_FLOOR} p.u. after {it} sweeps",
                worst_mismatch=mismatch)
        if mismatch < tol:
            converged = True
            break

    # final quantities at the converged voltages
    vm = np.abs(v)
    scale = (vm / v_star) ** kappa
    s_load = (p_const + p_vdep * scale) + 1j * (q_const + q_vdep * scale)
    i_br = np.conj(s_load / v)
    for b in down:
        i_br[parent[b]] += i_br[b]

    loss = np.zeros(T)
    branch_s = np.zeros((len(model.lines), T))
    for b in order[1:]:
        loss += np.abs(i_br[b]) ** 2 * z[b].real
        branch_s[comp.line_of_bus[b]] = np.abs(v[parent[b]] * np.conj(i_br[b]))

    slack_children = [b for b in range(n) if parent[b] == comp.slack_index]
    s_slack = v[comp.slack_index] * np.conj(sum(i_br[c] for c in slack_children))

    bus_p = s_load.real * s_base
    bus_q = s_load.imag * s_base
    bus_s = np.abs(s_load) * s_base
    bus_s[comp.slack_index] = np.abs(s_slack)  # slack bus carries the feeder head

    out = []
    for t in range(T):
        out.append(PowerFlowSolution(
            voltages=vm[:, t].copy(),
            slack_active=float(s_slack[t].real) * s_base,
            loss_active=float(loss[t]) * s_base,
            branch_apparent=branch_s[:, t] * s_base,
            bus_apparent=bus_s[:, t].copy(),
            converged=converged,
            iterations=it,
            worst_mismatch=mismatch,
            bus_active=bus_p[:, t].copy(),
            bus_reactive=bus_q[:, t].copy(),
        ))
    return out


@dataclass(frozen=True)
class LimitViolation:
    kind: str  # "voltage_low" | "voltage_high" | "bus_apparent" | "branch_apparent"
    where: int  # bus id, or line index for branch violations
    magnitude: float  # p.u. for voltage, kVA for apparent power


def check_limits(net: NetworkModel, solution: PowerFlowSolution) -> list[LimitViolation]:
    """Itemize every voltage-band and apparent-power breach in a solution."""
    if not solution.converged:
        raise PowerFlowError("check_limits requires a converged solution",
                             solution.worst_mismatch)
    report: list[LimitViolation] = []
    for i, bus in enumerate(net.buses):
        v = solution.voltages[i]
        if v < bus.v_min:
            report.append(LimitViolation("voltage_low", bus.id, bus.v_min - v))
        elif v > bus.v_max:
            report.append(LimitViolation("voltage_high", bus.id, v - bus.v_max))
        if solution.bus_apparent[i] > bus.s_max:
            report.append(LimitViolation("bus_apparent", bus.id,
                                         solution.bus_apparent[i] - bus.s_max))
    for li, ln in enumerate(net.lines):
        # branch caps reported against the receiving bus's rating; bus caps
        # are what gates feasibility, branch entries are informational
        cap = next(b.s_max for b in net.buses if b.id == ln.to_bus)
        if solution.branch_apparent[li] > cap:
            report.append(LimitViolation("branch_apparent", li,
                                         solution.branch_apparent[li] - cap))
    return report


def voltage_dependent_load(p_star: float, v: float, v_star: float,
                           kappa: float) -> float:
    """Exponential load model: demand at voltage ``v`` given nominal demand
    ``p_star`` at ``v_star``."""
    if v <= 0 or v_star <= 0:
        raise ValueError("voltages must be positive")
    return p_star * (v / v_star) ** kappa
