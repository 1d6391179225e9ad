from pathlib import Path

import numpy as np
import pytest

from bessopt.degradation import BessParams
from bessopt.grid import (Bus, DeviceFleet, Line, NetworkModel,
                          ScenarioProfiles, load_network, load_profiles)
from bessopt.objectives import Scenario

DATA = Path(__file__).resolve().parents[1] / "src" / "bessopt" / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def net33() -> NetworkModel:
    return load_network(DATA / "ieee33_network.csv")


@pytest.fixture(scope="session")
def profiles24() -> ScenarioProfiles:
    return load_profiles(DATA / "profiles_24h.csv", 24)


@pytest.fixture(scope="session")
def scenario33(net33, profiles24) -> Scenario:
    fleet = DeviceFleet(
        pv_units=((9, 500.0), (13, 500.0), (25, 500.0), (30, 500.0)),
        ev_stations=((8, 1), (14, 1), (18, 1), (2, 2), (19, 2), (27, 2)),
        bess_units=(
            BessParams(bus=18, capacity=1000.0, p_max=250.0, invest_cost=3000.0),
            BessParams(bus=33, capacity=1000.0, p_max=250.0, invest_cost=3000.0),
        ),
    )
    return Scenario(net33, fleet, profiles24)


def two_bus_network(r_pu: float = 0.05, x_pu: float = 0.0,
                    load_kw: float = 100.0, q_kvar: float = 0.0,
                    kappa: float = 0.0) -> NetworkModel:
    """2-bus feeder on a 1 MVA base so r_pu/load map directly to p.u."""
    base_kv, base_mva = 12.66, 1.0
    z_base = base_kv ** 2 / base_mva
    buses = (
        Bus(id=1, kind="slack", customer_class="commercial"),
        Bus(id=2, base_active_load=load_kw, base_reactive_load=q_kvar,
            load_exponent=kappa),
    )
    lines = (Line(1, 2, r_pu * z_base, x_pu * z_base),)
    return NetworkModel(buses, lines, base_kv, base_mva)


@pytest.fixture(scope="session")
def net2() -> NetworkModel:
    return two_bus_network()


TOY_PRICE = np.array([1.0, 1.0, 0.0, 0.0])


def toy_bess(**overrides) -> BessParams:
    kwargs = dict(bus=2, capacity=400.0, p_max=100.0, eta_charge=1.0,
                  eta_discharge=1.0, soc_min=0.0, soc_max=1.0, soc_init=0.5,
                  invest_cost=100.0, discount_rate=0.05, ref_cycle_life=3650.0,
                  dod_exponent=1.1, calendar_life_cap=10.0)
    kwargs.update(overrides)
    return BessParams(**kwargs)


@pytest.fixture(scope="session")
def toy_scenario() -> Scenario:
    """1 BESS, 4 slots, price spike first, fixed 100 kW load."""
    net = two_bus_network()
    profiles = ScenarioProfiles(horizon=4, dt=1.0, price=TOY_PRICE.copy(),
                                pv_fraction=np.zeros(4))
    return Scenario(net, DeviceFleet(bess_units=(toy_bess(),)), profiles)


@pytest.fixture(scope="session")
def toy_enumeration(toy_scenario):
    """All 5^4 = 625 schedules on the 5-level power grid, fully evaluated."""
    from itertools import product

    from bessopt.objectives import evaluate_schedule
    from bessopt.optimizer import Schedule

    p_max = toy_scenario.fleet.bess_units[0].p_max
    levels = np.linspace(-p_max, p_max, 5)
    out = []
    for combo in product(levels, repeat=toy_scenario.profiles.horizon):
        sched = Schedule(np.array([combo]))
        obj = evaluate_schedule(None, None, None, sched,
                                scenario=toy_scenario)
        out.append((sched, obj))
    return out


@pytest.fixture(scope="session")
def sens_scenario() -> Scenario:
    """Small 4-bus feeder with midday PV export and an evening peak; used
    for the lambda sensitivity trends."""
    base_kv, base_mva = 12.66, 1.0
    z_base = base_kv ** 2 / base_mva
    buses = (
        Bus(id=1, kind="slack", customer_class="commercial"),
        Bus(id=2, base_active_load=100.0, base_reactive_load=40.0,
            load_exponent=0.5),
        Bus(id=3, base_active_load=150.0, base_reactive_load=60.0,
            load_exponent=0.5),
        Bus(id=4, base_active_load=200.0, base_reactive_load=80.0,
            load_exponent=0.5),
    )
    lines = (Line(1, 2, 0.04 * z_base, 0.02 * z_base),
             Line(2, 3, 0.04 * z_base, 0.02 * z_base),
             Line(3, 4, 0.04 * z_base, 0.02 * z_base))
    net = NetworkModel(buses, lines, base_kv, base_mva)
    price = np.array([0.05, 0.05, 0.06, 0.08, 0.10, 0.10,
                      0.08, 0.08, 0.10, 0.16, 0.20, 0.08])
    pv = np.array([0.0, 0.0, 0.1, 0.5, 0.9, 1.0,
                   0.9, 0.5, 0.1, 0.0, 0.0, 0.0])
    mult = np.array([0.6, 0.6, 0.7, 0.8, 0.8, 0.8,
                     0.8, 0.9, 1.0, 1.2, 1.2, 0.8])
    profiles = ScenarioProfiles(
        horizon=12, dt=2.0, price=price, pv_fraction=pv,
        load_multiplier={c: mult for c in ("residential", "commercial",
                                           "industrial")})
    fleet = DeviceFleet(
        pv_units=((3, 500.0),),
        bess_units=(BessParams(bus=4, capacity=800.0, p_max=250.0,
                               soc_min=0.05, soc_max=0.95,
                               invest_cost=2000.0),),
    )
    return Scenario(net, fleet, profiles)
