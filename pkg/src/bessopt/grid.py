"""Distribution network model, device fleet, and scenario time series.

The network file is a sectioned CSV (see README): a ``[meta]`` section with
the per-unit bases, a ``[buses]`` table and a ``[lines]`` table.  All powers
are kW/kvar, impedances are ohms, voltages per-unit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

CUSTOMER_CLASSES = ("commercial", "residential", "industrial")
EV_LEVELS = (1, 2)


class NetworkFormatError(ValueError):
    """Malformed row or unparseable field in a network/profile file."""


class TopologyError(ValueError):
    """Network graph is not a tree rooted at the slack bus."""


class LimitError(ValueError):
    """Inconsistent operating limits (e.g. v_min >= v_max)."""


@dataclass(frozen=True)
class Bus:
    id: int
    kind: str = "load"  # "slack" or "load"
    base_active_load: float = 0.0  # kW at nominal voltage
    base_reactive_load: float = 0.0  # kvar at nominal voltage
    customer_class: str = "residential"
    v_nominal: float = 1.0
    v_min: float = 0.90
    v_max: float = 1.05
    s_max: float = 1000.0  # kVA
    load_exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("slack", "load"):
            raise NetworkFormatError(f"bus {self.id}: unknown kind {self.kind!r}")
        if self.customer_class not in CUSTOMER_CLASSES:
            raise NetworkFormatError(
                f"bus {self.id}: unknown class {self.customer_class!r}")
        if not (self.v_min < self.v_nominal <= self.v_max):
            raise LimitError(
                f"bus {self.id}: need v_min < v_nominal <= v_max, got "
                f"[{self.v_min}, {self.v_nominal}, {self.v_max}]")
        if self.s_max <= 0:
            raise LimitError(f"bus {self.id}: s_max must be positive")
        if self.load_exponent < 0:
            raise LimitError(f"bus {self.id}: load_exponent must be >= 0")


@dataclass(frozen=True)
class Line:
    from_bus: int
    to_bus: int
    resistance: float  # ohms
    reactance: float  # ohms

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise TopologyError(f"self-loop at bus {self.from_bus}")
        if self.resistance < 0 or self.reactance < 0:
            raise NetworkFormatError(
                f"line {self.from_bus}-{self.to_bus}: negative impedance")


@dataclass(frozen=True)
class NetworkModel:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    base_voltage: float = 12.66  # kV
    base_power: float = 10.0  # MVA

    def __post_init__(self):
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise NetworkFormatError("duplicate bus ids")
        slacks = [b for b in self.buses if b.kind == "slack"]
        if len(slacks) != 1:
            raise TopologyError(f"need exactly one slack bus, found {len(slacks)}")
        _check_radial(self)

    @property
    def slack(self) -> Bus:
        return next(b for b in self.buses if b.kind == "slack")

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    def bus_index(self) -> dict[int, int]:
        return {b.id: i for i, b in enumerate(self.buses)}

    @property
    def z_base(self) -> float:
        """Impedance base in ohms."""
        return self.base_voltage ** 2 / self.base_power

    @property
    def s_base_kva(self) -> float:
        return self.base_power * 1000.0


def _check_radial(net: NetworkModel) -> None:
    n = len(net.buses)
    if len(net.lines) != n - 1:
        raise TopologyError(
            f"radial network needs {n - 1} lines for {n} buses, "
            f"got {len(net.lines)}")
    index = {b.id: i for i, b in enumerate(net.buses)}
    adj: list[list[int]] = [[] for _ in range(n)]
    for ln in net.lines:
        if ln.from_bus not in index or ln.to_bus not in index:
            raise TopologyError(
                f"line {ln.from_bus}-{ln.to_bus} references unknown bus")
        adj[index[ln.from_bus]].append(index[ln.to_bus])
        adj[index[ln.to_bus]].append(index[ln.from_bus])
    root = index[net.slack.id]
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if len(seen) != n:
        missing = [b.id for b in net.buses if index[b.id] not in seen]
        raise TopologyError(f"buses unreachable from slack: {missing}")
    # |E| = |V|-1 and connected => tree; cycles are impossible past here.


@dataclass(frozen=True)
class DeviceFleet:
    pv_units: tuple[tuple[int, float], ...] = ()  # (bus id, capacity kW)
    ev_stations: tuple[tuple[int, int], ...] = ()  # (bus id, level)
    bess_units: tuple = ()  # BessParams, ordered; order defines schedule rows

    def __post_init__(self):
        for bus, cap in self.pv_units:
            if cap <= 0:
                raise ValueError(f"PV at bus {bus}: capacity must be > 0")
        for bus, level in self.ev_stations:
            if level not in EV_LEVELS:
                raise ValueError(f"EV at bus {bus}: unknown level {level}")

    def validate_against(self, net: NetworkModel) -> None:
        known = {b.id for b in net.buses}
        for bus, _ in self.pv_units:
            if bus not in known:
                raise TopologyError(f"PV references unknown bus {bus}")
        for bus, _ in self.ev_stations:
            if bus not in known:
                raise TopologyError(f"EV station references unknown bus {bus}")
        for params in self.bess_units:
            if params.bus not in known:
                raise TopologyError(f"BESS references unknown bus {params.bus}")


@dataclass(frozen=True)
class ScenarioProfiles:
    horizon: int
    dt: float  # hours
    price: np.ndarray  # $/kWh
    pv_fraction: np.ndarray  # [0, 1]
    ev_load: dict[int, np.ndarray] = field(default_factory=dict)  # kW per level
    load_multiplier: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        series = {"price": self.price, "pv_fraction": self.pv_fraction}
        for lvl, s in self.ev_load.items():
            series[f"ev_load[{lvl}]"] = s
        for cls, s in self.load_multiplier.items():
            series[f"load_multiplier[{cls}]"] = s
        for name, s in series.items():
            if len(s) != self.horizon:
                raise ValueError(
                    f"{name}: length {len(s)} != horizon {self.horizon}")
        if np.any(self.price < 0):
            raise ValueError("negative price")
        if np.any((self.pv_fraction < 0) | (self.pv_fraction > 1)):
            raise ValueError("pv_fraction outside [0, 1]")
        for cls, s in self.load_multiplier.items():
            if np.any(s < 0):
                raise ValueError(f"load_multiplier[{cls}]: negative entry")

    def multiplier_for(self, cls: str) -> np.ndarray:
        return self.load_multiplier.get(cls, np.ones(self.horizon))


@dataclass(frozen=True)
class Injections:
    """Per-bus demand split into a constant-power part and a
    voltage-dependent part (evaluated here at nominal voltage).
    Sign convention: positive = consumption.  Arrays are (n_bus,) for a
    single slot or (n_bus, n_slots)."""
    p_const: np.ndarray  # kW; devices (EV + BESS charge - PV - BESS discharge)
    q_const: np.ndarray  # kvar
    p_vdep: np.ndarray  # kW at v = v_nominal; scales as (v/v*)^kappa
    q_vdep: np.ndarray  # kvar, same exponent

    @property
    def p_kw(self) -> np.ndarray:
        """Net active demand at nominal voltage."""
        return self.p_const + self.p_vdep

    @property
    def q_kvar(self) -> np.ndarray:
        return self.q_const + self.q_vdep


def nodal_injections(net: NetworkModel, fleet: DeviceFleet,
                     profiles: ScenarioProfiles, schedule, t: int) -> Injections:
    """Assemble per-bus net demand for slot ``t``.

    ``schedule`` is a :class:`bessopt.optimizer.Schedule` (or None for an idle
    fleet); positive schedule power discharges the battery into the grid.
    """
    full = nodal_injections_all(net, fleet, profiles, schedule)
    return Injections(full.p_const[:, t].copy(), full.q_const[:, t].copy(),
                      full.p_vdep[:, t].copy(), full.q_vdep[:, t].copy())


def nodal_injections_all(net: NetworkModel, fleet: DeviceFleet,
                         profiles: ScenarioProfiles, schedule=None) -> Injections:
    """Vectorized injections for every slot at once, shape (n_bus, horizon)."""
    n, T = net.n_bus, profiles.horizon
    index = net.bus_index()
    p_vdep = np.zeros((n, T))
    q_vdep = np.zeros((n, T))
    for i, b in enumerate(net.buses):
        mult = profiles.multiplier_for(b.customer_class)
        p_vdep[i] = b.base_active_load * mult
        q_vdep[i] = b.base_reactive_load * mult

    p_const = np.zeros((n, T))
    for bus, cap in fleet.pv_units:
        p_const[index[bus]] -= cap * profiles.pv_fraction
    # the per-level EV profile is an aggregate, split evenly across stations
    n_by_level = {lvl: sum(1 for _, l in fleet.ev_stations if l == lvl)
                  for lvl in EV_LEVELS}
    for bus, level in fleet.ev_stations:
        series = profiles.ev_load.get(level)
        if series is not None:
            p_const[index[bus]] += series / n_by_level[level]
    if schedule is not None:
        power = np.asarray(schedule.power, dtype=float)
        for k, params in enumerate(fleet.bess_units):
            p_const[index[params.bus]] -= power[k]  # discharge feeds the bus
    q_const = np.zeros((n, T))  # PV, BESS and EV modeled at unity power factor
    return Injections(p_const, q_const, p_vdep, q_vdep)


# ---------------------------------------------------------------------------
# file I/O

_BUS_DEFAULTS = Bus(id=0)


def _parse_bus_row(row: dict[str, str], lineno: int) -> Bus:
    try:
        kwargs = dict(
            id=int(row["id"]),
            base_active_load=float(row.get("p_kw") or 0.0),
            base_reactive_load=float(row.get("q_kvar") or 0.0),
            customer_class=(row.get("class") or "residential").strip(),
            kind=(row.get("kind") or "load").strip(),
        )
        for csv_key, attr in (("v_nominal", "v_nominal"), ("v_min", "v_min"),
                              ("v_max", "v_max"), ("s_max_kva", "s_max"),
                              ("kappa", "load_exponent")):
            if row.get(csv_key):
                kwargs[attr] = float(row[csv_key])
        return Bus(**kwargs)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, (TopologyError, LimitError, NetworkFormatError)):
            raise
        raise NetworkFormatError(f"bus row {lineno}: {exc}") from exc


def load_network(path: str | Path) -> NetworkModel:
    """Read a sectioned network CSV and return a validated model."""
    path = Path(path)
    sections: dict[str, list[list[str]]] = {}
    current = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].lower()
            sections[current] = []
            continue
        if current is None:
            raise NetworkFormatError(f"{path}:{lineno}: data before any section")
        sections[current].append(next(csv.reader([line])))

    for required in ("buses", "lines"):
        if required not in sections:
            raise NetworkFormatError(f"{path}: missing [{required}] section")

    meta = {k.strip(): v.strip() for k, v, *_ in sections.get("meta", [])}
    base_kv = float(meta.get("base_kv", 12.66))
    base_mva = float(meta.get("base_mva", 10.0))

    def as_dicts(rows: list[list[str]]) -> list[dict[str, str]]:
        header = [h.strip() for h in rows[0]]
        return [dict(zip(header, (c.strip() for c in r))) for r in rows[1:]]

    buses = tuple(_parse_bus_row(row, i)
                  for i, row in enumerate(as_dicts(sections["buses"]), start=2))
    lines = []
    for i, row in enumerate(as_dicts(sections["lines"]), start=2):
        try:
            lines.append(Line(int(row["from"]), int(row["to"]),
                              float(row["r_ohm"]), float(row["x_ohm"])))
        except (KeyError, ValueError) as exc:
            if isinstance(exc, TopologyError):
                raise
            raise NetworkFormatError(f"line row {i}: {exc}") from exc
    return NetworkModel(buses, tuple(lines), base_kv, base_mva)


def write_network(net: NetworkModel, path: str | Path) -> None:
    """Serialize a model back to the sectioned CSV format (round-trips with
    :func:`load_network`)."""
    out = ["# bessopt network v1", "[meta]",
           f"base_kv,{net.base_voltage!r}", f"base_mva,{net.base_power!r}",
           "[buses]",
           "id,p_kw,q_kvar,class,kind,v_nominal,v_min,v_max,s_max_kva,kappa"]
    for b in net.buses:
        out.append(f"{b.id},{b.base_active_load!r},{b.base_reactive_load!r},"
                   f"{b.customer_class},{b.kind},{b.v_nominal!r},{b.v_min!r},"
                   f"{b.v_max!r},{b.s_max!r},{b.load_exponent!r}")
    out.append("[lines]")
    out.append("from,to,r_ohm,x_ohm")
    for ln in net.lines:
        out.append(f"{ln.from_bus},{ln.to_bus},{ln.resistance!r},{ln.reactance!r}")
    Path(path).write_text("\n".join(out) + "\n")


_PROFILE_OPTIONAL = ("pv_fraction", "ev_l1_kw", "ev_l2_kw")
_MULT_COLUMNS = {f"mult_{c}": c for c in CUSTOMER_CLASSES}


def load_profiles(path: str | Path, horizon: int, dt: float = 1.0) -> ScenarioProfiles:
    """Read a one-row-per-slot profile CSV.

    Required column: ``price``.  Optional: ``pv_fraction``, ``ev_l1_kw``,
    ``ev_l2_kw`` (default to zero series) and ``mult_<class>`` load
    multipliers (default to all-ones).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if any(v.strip() for v in r.values())]
    if len(rows) != horizon:
        raise ValueError(f"{path}: {len(rows)} rows but horizon {horizon}")

    def column(name: str, default: float | None) -> np.ndarray:
        if rows and name in rows[0]:
            try:
                return np.array([float(r[name]) for r in rows])
            except ValueError as exc:
                raise NetworkFormatError(f"{path}: column {name}: {exc}") from exc
        if default is None:
            raise NetworkFormatError(f"{path}: missing required column {name!r}")
        return np.full(horizon, default)

    ev = {1: column("ev_l1_kw", 0.0), 2: column("ev_l2_kw", 0.0)}
    mult = {cls: column(col, 1.0) for col, cls in _MULT_COLUMNS.items()}
    return ScenarioProfiles(horizon=horizon, dt=dt,
                            price=column("price", None),
                            pv_fraction=column("pv_fraction", 0.0),
                            ev_load=ev, load_multiplier=mult)


def scale_loads(net: NetworkModel, alpha: float) -> NetworkModel:
    """Return a copy with every base load scaled by ``alpha`` (test helper)."""
    buses = tuple(replace(b, base_active_load=b.base_active_load * alpha,
                          base_reactive_load=b.base_reactive_load * alpha)
                  for b in net.buses)
    return NetworkModel(buses, net.lines, net.base_voltage, net.base_power)
