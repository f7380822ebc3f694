"""cogmesh: deterministic simulator and analytic toolkit for an autonomic
cognitive-radio secondary user carrying video-conference traffic."""

from .config import LearningConfig, ScenarioConfig, SuConfig, load_scenario
from .engine import RunMetrics, RunResult, compare_learning, run, simulate_occupancy
from .errors import (
    CapacityError,
    CogmeshError,
    InputDomainError,
    NumericalError,
    ProtocolError,
    TraceParseError,
    UndefinedMetricError,
    UnknownEntityError,
    ValidationError,
)
from .knowledge import KnowledgeBase
from .markov import OccupancyModel, blocking_probability, noncompletion_probability, stationary
from .qos import QosClass, QosMeasurement, classify, classify_parameter
from .selfmgmt import NegotiationOutcome, SuMode, SuState
from .spectrum import Channel, PrimaryUser, SpectrumOffer, sense

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Channel",
    "CogmeshError",
    "InputDomainError",
    "KnowledgeBase",
    "LearningConfig",
    "NegotiationOutcome",
    "NumericalError",
    "OccupancyModel",
    "PrimaryUser",
    "ProtocolError",
    "QosClass",
    "QosMeasurement",
    "RunMetrics",
    "RunResult",
    "ScenarioConfig",
    "SpectrumOffer",
    "SuConfig",
    "SuMode",
    "SuState",
    "TraceParseError",
    "UndefinedMetricError",
    "UnknownEntityError",
    "ValidationError",
    "blocking_probability",
    "classify",
    "classify_parameter",
    "compare_learning",
    "load_scenario",
    "noncompletion_probability",
    "run",
    "sense",
    "simulate_occupancy",
    "stationary",
    "__version__",
]
