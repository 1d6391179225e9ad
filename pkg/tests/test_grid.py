import numpy as np
import pytest

from bessopt.grid import (Bus, DeviceFleet, Line, LimitError, NetworkModel,
                          NetworkFormatError, ScenarioProfiles, TopologyError,
                          load_network, load_profiles, nodal_injections,
                          nodal_injections_all, write_network)
from bessopt.optimizer import Schedule

from conftest import toy_bess, two_bus_network


class TestLoadNetwork:
    def test_bundled_33bus(self, net33):
        assert net33.n_bus == 33
        assert len(net33.lines) == 32
        assert net33.slack.id == 1
        assert net33.base_voltage == 12.66

    def test_two_bus_minimal_tree(self, net2):
        assert net2.n_bus == 2
        assert net2.slack.id == 1

    def test_self_loop_rejected(self):
        with pytest.raises(TopologyError):
            Line(5, 5, 0.1, 0.1)

    def test_cycle_rejected(self):
        buses = (Bus(id=1, kind="slack"), Bus(id=2), Bus(id=3))
        lines = (Line(1, 2, 1, 1), Line(2, 3, 1, 1), Line(3, 1, 1, 1))
        with pytest.raises(TopologyError):
            NetworkModel(buses, lines)

    def test_disconnected_bus_rejected(self):
        buses = (Bus(id=1, kind="slack"), Bus(id=2), Bus(id=3), Bus(id=4))
        lines = (Line(1, 2, 1, 1), Line(3, 4, 1, 1), Line(4, 3, 1, 2))
        with pytest.raises(TopologyError):
            NetworkModel(buses, lines)

    def test_limit_error(self):
        with pytest.raises(LimitError):
            Bus(id=1, v_min=1.1, v_max=1.05)

    def test_malformed_row(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("[buses]\nid,p_kw\n1,not-a-number\n[lines]\nfrom,to\n")
        with pytest.raises(NetworkFormatError):
            load_network(bad)

    def test_round_trip(self, net33, tmp_path):
        path = tmp_path / "net.csv"
        write_network(net33, path)
        assert load_network(path) == net33


class TestLoadProfiles:
    def test_bundled_24_slots(self, data_dir):
        prof = load_profiles(data_dir / "profiles_24h.csv", 24)
        assert prof.horizon == 24
        assert prof.dt == 1.0
        assert prof.price.shape == (24,)

    def test_length_mismatch(self, data_dir, tmp_path):
        lines = (data_dir / "profiles_24h.csv").read_text().splitlines()
        short = tmp_path / "short.csv"
        short.write_text("\n".join(lines[:-1]) + "\n")  # 23 rows
        with pytest.raises(ValueError, match="23 rows"):
            load_profiles(short, 24)

    def test_pv_fraction_out_of_range(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("slot,price,pv_fraction\n0,0.1,1.2\n")
        with pytest.raises(ValueError, match="pv_fraction"):
            load_profiles(p, 1)

    def test_negative_price(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("slot,price\n0,-0.1\n")
        with pytest.raises(ValueError, match="price"):
            load_profiles(p, 1)

    def test_missing_optional_columns_default(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("slot,price\n0,0.1\n1,0.2\n")
        prof = load_profiles(p, 2)
        assert np.all(prof.pv_fraction == 0)
        assert np.all(prof.ev_load[1] == 0)
        assert np.all(prof.multiplier_for("residential") == 1.0)


def _flat_profiles(horizon=4):
    return ScenarioProfiles(horizon=horizon, dt=1.0,
                            price=np.full(horizon, 0.1),
                            pv_fraction=np.full(horizon, 0.5))


class TestNodalInjections:
    def test_plain_bus_is_base_load(self):
        net = two_bus_network(load_kw=60.0, q_kvar=20.0)
        inj = nodal_injections(net, DeviceFleet(), _flat_profiles(), None, 0)
        assert inj.p_kw[1] == pytest.approx(60.0)
        assert inj.q_kvar[1] == pytest.approx(20.0)

    def test_pv_scales_linearly(self):
        net = two_bus_network(load_kw=0.0)
        fleet = DeviceFleet(pv_units=((2, 500.0),))
        inj = nodal_injections(net, fleet, _flat_profiles(), None, 0)
        assert inj.p_kw[1] == pytest.approx(-250.0)

    def test_bess_charging_adds(self):
        net = two_bus_network(load_kw=60.0)
        fleet = DeviceFleet(bess_units=(toy_bess(),))
        sched = Schedule(np.array([[-100.0, 0.0, 0.0, 0.0]]))
        inj = nodal_injections(net, fleet, _flat_profiles(), sched, 0)
        assert inj.p_kw[1] == pytest.approx(160.0)

    def test_ev_aggregate_split(self):
        net = two_bus_network(load_kw=0.0)
        fleet = DeviceFleet(ev_stations=((1, 1), (2, 1)))
        prof = ScenarioProfiles(horizon=2, dt=1.0, price=np.zeros(2),
                                pv_fraction=np.zeros(2),
                                ev_load={1: np.array([100.0, 50.0])})
        inj = nodal_injections(net, fleet, prof, None, 0)
        assert inj.p_kw[0] == pytest.approx(50.0)
        assert inj.p_kw[1] == pytest.approx(50.0)

    def test_additivity_in_schedule(self, scenario33):
        rng = np.random.default_rng(7)
        a = rng.uniform(-100, 100, (2, 24))
        b = rng.uniform(-100, 100, (2, 24))
        args = (scenario33.network, scenario33.fleet, scenario33.profiles)
        inj_a = nodal_injections_all(*args, Schedule(a))
        inj_b = nodal_injections_all(*args, Schedule(b))
        inj_ab = nodal_injections_all(*args, Schedule(a + b))
        inj_0 = nodal_injections_all(*args, Schedule(np.zeros((2, 24))))
        np.testing.assert_allclose(inj_ab.p_kw,
                                   inj_a.p_kw + inj_b.p_kw - inj_0.p_kw,
                                   atol=1e-9)
