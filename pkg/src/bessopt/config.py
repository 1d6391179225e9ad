"""Scenario configuration: one TOML file pins a whole run.

Documented keys (see README for the full schema):

    network = "ieee33_network.csv"     profiles = "profiles_24h.csv"
    horizon = 24                       dt = 1.0
    lambda1 = 1.0                      lambda2 = 1.0
    n_pareto_points = 20               output_dir = "out"
    [[pv]]   bus = 9   capacity_kw = 500.0
    [[ev]]   bus = 8   level = 1
    [[bess]] bus = 18  capacity_kwh = 1000.0  p_max_kw = 250.0  ...
    [solver] population = 32  max_evals = 20000  seed = 1  ...

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import tomli

from .degradation import BessParams
from .grid import DeviceFleet, load_network, load_profiles
from .objectives import Scenario
from .optimizer import SolverConfig


class ConfigError(ValueError):
    """Missing, malformed, or inconsistent configuration."""


_BESS_KEYS = {
    "capacity_kwh": "capacity",
    "p_max_kw": "p_max",
    "eta_charge": "eta_charge",
    "eta_discharge": "eta_discharge",
    "soc_min": "soc_min",
    "soc_max": "soc_max",
    "soc_init": "soc_init",
    "invest_cost": "invest_cost",
    "discount_rate": "discount_rate",
    "ref_cycle_life": "ref_cycle_life",
    "dod_exponent": "dod_exponent",
    "calendar_life_cap": "calendar_life_cap",
    "physical_efficiency": "physical_efficiency",
}


@dataclass
class ScenarioConfig:
    network_path: Path
    profiles_path: Path
    fleet: DeviceFleet
    horizon: int = 24
    dt: float = 1.0
    lam1: float = 1.0
    lam2: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    n_pareto_points: int = 20
    output_dir: Path = Path("out")

    def __post_init__(self):
        if self.lam1 < 0 or self.lam2 < 0:
            raise ConfigError("lambda weights must be >= 0")
        for p in (self.network_path, self.profiles_path):
            if not Path(p).exists():
                raise ConfigError(f"referenced file does not exist: {p}")

    def load_scenario(self) -> Scenario:
        network = load_network(self.network_path)
        profiles = load_profiles(self.profiles_path, self.horizon, self.dt)
        self.fleet.validate_against(network)
        return Scenario(network, self.fleet, profiles)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomli.load(fh)
    except (OSError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    base = path.parent
    try:
        pv = tuple((int(e["bus"]), float(e["capacity_kw"]))
                   for e in raw.get("pv", []))
        ev = tuple((int(e["bus"]), int(e["level"]))
                   for e in raw.get("ev", []))
        bess = []
        for entry in raw.get("bess", []):
            kwargs = {"bus": int(entry["bus"])}
            for toml_key, attr in _BESS_KEYS.items():
                if toml_key in entry:
                    kwargs[attr] = entry[toml_key]
            bess.append(BessParams(**kwargs))
        fleet = DeviceFleet(pv_units=pv, ev_stations=ev, bess_units=tuple(bess))

        solver_kwargs = raw.get("solver", {})
        known = {f.name for f in fields(SolverConfig)}
        unknown = set(solver_kwargs) - known
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        solver = SolverConfig(**solver_kwargs)

        return ScenarioConfig(
            network_path=base / raw["network"],
            profiles_path=base / raw["profiles"],
            fleet=fleet,
            horizon=int(raw.get("horizon", 24)),
            dt=float(raw.get("dt", 1.0)),
            lam1=float(raw.get("lambda1", 1.0)),
            lam2=float(raw.get("lambda2", 1.0)),
            solver=solver,
            n_pareto_points=int(raw.get("n_pareto_points", 20)),
            output_dir=base / raw.get("output_dir", "out"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc
