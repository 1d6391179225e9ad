import numpy as np
import pytest

from bessopt.grid import DeviceFleet, ScenarioProfiles
from bessopt.objectives import Scenario
from bessopt.optimizer import (Schedule, SolverConfig, feasibility,
                               solve_single)

from conftest import toy_bess, two_bus_network

TOY_CONFIG = SolverConfig(population=16, max_evals=2500, seed=7)


class TestSchedule:
    def test_signed_split(self):
        s = Schedule(np.array([[50.0, -30.0, 0.0]]))
        np.testing.assert_allclose(s.discharge_kw(), [[50, 0, 0]])
        np.testing.assert_allclose(s.charge_kw(), [[0, 30, 0]])


class TestFeasibility:
    def test_idle_no_load_empty(self, toy_scenario):
        net = two_bus_network(load_kw=0.0)
        sc = Scenario(net, toy_scenario.fleet, toy_scenario.profiles)
        report = feasibility(sc, Schedule(np.zeros((1, 4))))
        assert report.items == ()
        assert report.feasible

    def test_power_bound_entry(self, toy_scenario):
        sched = Schedule(np.array([[110.0, 0.0, 0.0, 0.0]]))  # p_max = 100
        report = feasibility(toy_scenario, sched)
        bound = [i for i in report.items if i.kind == "power_bound"]
        assert len(bound) == 1
        assert bound[0].slot == 0
        assert bound[0].magnitude == pytest.approx(10.0)

    def test_soc_drain_entry(self, toy_scenario):
        sched = Schedule(np.full((1, 4), 100.0))  # drains 400 kWh from 200
        report = feasibility(toy_scenario, sched)
        soc = [i for i in report.items if i.kind == "soc"]
        assert soc
        assert soc[0].magnitude > 0
        assert not report.feasible

    def test_f2_cap_entry(self, toy_scenario):
        report = feasibility(toy_scenario, Schedule(np.zeros((1, 4))),
                             epsilon=1e-6)
        kinds = [i.kind for i in report.items]
        assert "f2_cap" in kinds


class TestSolveSingle:
    def test_idle_grid_near_zero_schedule(self, toy_scenario):
        net = two_bus_network(load_kw=0.0)
        prof = ScenarioProfiles(horizon=4, dt=1.0, price=np.zeros(4),
                                pv_fraction=np.zeros(4))
        sc = Scenario(net, toy_scenario.fleet, prof)
        sched, obj = solve_single(sc, target="F2", config=TOY_CONFIG)
        assert obj.feasible
        assert obj.f2 == pytest.approx(0.0, abs=1e-3)
        assert np.max(np.abs(sched.power)) < 25.0  # essentially idle

    def test_within_2pct_of_bruteforce(self, toy_scenario, toy_enumeration):
        best = min(o.f1 for _, o in toy_enumeration if o.feasible)
        sched, obj = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        assert obj.feasible
        assert obj.f1 <= best * 1.02 + 1e-9

    def test_arbitrage_direction(self, toy_scenario):
        # price [1,1,0,0]: discharge lives in the expensive half
        sched, obj = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        assert sched.power[0, :2].sum() > sched.power[0, 2:].sum()

    def test_deterministic(self, toy_scenario):
        a = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        b = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        np.testing.assert_array_equal(a[0].power, b[0].power)
        assert a[1] == b[1]

    def test_reported_feasible_is_feasible(self, toy_scenario):
        sched, obj = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        assert obj.feasible
        assert feasibility(toy_scenario, sched).total < 1e-6

    def test_epsilon_monotonicity(self, toy_scenario):
        _, o_free = solve_single(toy_scenario, target="F2", config=TOY_CONFIG)
        _, o_loose = solve_single(toy_scenario, target="F1", config=TOY_CONFIG)
        eps_values = np.linspace(o_free.f2, o_loose.f2, 4)
        f1s = []
        for i, eps in enumerate(eps_values):
            cfg = SolverConfig(population=16, max_evals=2500, seed=7 + i)
            _, obj = solve_single(toy_scenario, target="F1",
                                  epsilon=float(eps), config=cfg)
            assert obj.f2 <= eps * (1 + 1e-9)
            f1s.append(obj.f1)
        band = TOY_CONFIG.noise_band
        for a, b in zip(f1s, f1s[1:]):
            assert b <= a * (1 + band)  # non-increasing within solver noise

    def test_bad_target_rejected(self, toy_scenario):
        with pytest.raises(ValueError):
            solve_single(toy_scenario, target="F3")
        with pytest.raises(ValueError):
            solve_single(toy_scenario, target="F2", epsilon=1.0)
