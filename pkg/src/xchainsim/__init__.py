"""Deterministic simulator for cross-chain fungible token standards."""
from .chain import Address, ChainId, TokenLedger
from .errors import ConfigError, InvariantViolation, SimulationError
from .harness import Harness, InvariantReport, build_report, module_snapshot, oracle_replay
from .sim import Event, Simulation

__version__ = "0.1.0"

__all__ = ["Address", "ChainId", "TokenLedger", "ConfigError", "InvariantViolation",
           "SimulationError", "Harness", "InvariantReport", "build_report", "module_snapshot",
           "oracle_replay", "Event", "Simulation", "__version__"]
