"""Optimal timing of a one-off, damage-reducing intervention.

The damage rate follows a geometric Brownian motion whose drift and
volatility drop permanently once the intervention is made; the intervention
costs ``K e^{qt}``. The package gives the closed-form optimal barrier and
value function, the first-passage law, and Monte Carlo distributions of the
realized discounted total damage under any barrier strategy.
"""

from ._core import BACKEND
from .closed_form import (
    Branch,
    ClosedFormSolution,
    DeterministicSolution,
    characteristic_roots,
    deterministic_solution,
    expected_hitting_time,
    hitting_time_density,
    optimal_barrier,
    pv_no_action,
    pv_with_action,
    value_function,
)
from .model import (
    CostSchedule,
    DamageDynamics,
    DomainError,
    Strategy,
    StrategyKind,
    TemperatureModel,
    ValidationError,
    calibrate,
    critical_temperature,
    damage_rate_from_temperature,
)
from .montecarlo import DamageDistribution, PathOutcome, SimConfig, run_ensemble, run_ensembles, simulate_path

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Branch",
    "ClosedFormSolution",
    "CostSchedule",
    "DamageDistribution",
    "DamageDynamics",
    "DeterministicSolution",
    "DomainError",
    "PathOutcome",
    "SimConfig",
    "Strategy",
    "StrategyKind",
    "TemperatureModel",
    "ValidationError",
    "calibrate",
    "characteristic_roots",
    "critical_temperature",
    "damage_rate_from_temperature",
    "deterministic_solution",
    "expected_hitting_time",
    "hitting_time_density",
    "optimal_barrier",
    "pv_no_action",
    "pv_with_action",
    "run_ensemble",
    "run_ensembles",
    "simulate_path",
    "value_function",
]
