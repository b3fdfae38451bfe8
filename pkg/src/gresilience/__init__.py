"""Resilience-vs-green coordination game and a simulator of the robot/human cell it steers."""

from .decision import (
    AlwaysHuman,
    AlwaysRobot,
    Decision,
    Gresilience,
    RandomSource,
    Rationale,
    SamplingMode,
    Threshold,
    decide,
    sampling_probability,
)
from .errors import (
    DegenerateGameError,
    DomainError,
    GresilienceError,
    IntegrityError,
    InvariantError,
    ValidationError,
)
from .game import (
    Action,
    ActionProfile,
    BimatrixPayoffs,
    EquilibriumSolution,
    MixedStrategyProfile,
    P2ScaleMode,
    Player,
    SystemFactors,
    build_bimatrix,
    expected_utility_action,
    find_psne,
    msne,
    msne_expected_payoffs,
    payoff_p1,
    payoff_p2,
    solve,
)
from .green import CO2Report, EnergyLedger, Source, co2e, record
from .metrics import RunReport, aggregate, build_report, detect_episodes
from .scenario import ScenarioConfig, load_scenario, reference_scenario
from .sim import run_scenario

__version__ = "0.1.0"
