"""Degradation-aware battery scheduling for radial distribution networks."""

from .config import ConfigError, ScenarioConfig, load_config
from .degradation import (BessParams, DodEvent, SocTrajectory, cycle_life,
                          degradation_cost, extract_dod_events, simulate_soc,
                          soc_step)
from .grid import (Bus, DeviceFleet, Injections, Line, NetworkModel,
                   ScenarioProfiles, load_network, load_profiles,
                   nodal_injections, nodal_injections_all, write_network)
from .objectives import (ObjectiveValues, Scenario, energy_purchase_cost,
                         evaluate_schedule, loss_total, voltage_deviation)
from .optimizer import Schedule, SolverConfig, feasibility, solve_single
from .pareto import (ParetoFront, ParetoPoint, dominance_filter,
                     epsilon_sweep, fuzzy_membership, payoff_table,
                     select_compromise)
from .powerflow import (PowerFlowSolution, check_limits, compile_network,
                        solve_slot, solve_slots, voltage_dependent_load)

__version__ = "0.1.0"
