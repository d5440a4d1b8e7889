"""
Core module for the navigation learning harness
Provides unified configuration, the error hierarchy, seed derivation and run records
"""

from .config_manager import ConfigManager, ExperimentConfig
from .errors import (
    CheckpointVersionError,
    ConfigurationError,
    ContractViolationError,
    DimensionError,
    InvalidStateError,
    NavigationError,
    TrainingDivergenceError,
)
from .records import EpisodeRecord, EvalSummary
from .seeding import derive_rng

__all__ = [
    'ConfigManager', 'ExperimentConfig',
    'CheckpointVersionError', 'ConfigurationError', 'ContractViolationError', 'DimensionError',
    'InvalidStateError', 'NavigationError', 'TrainingDivergenceError',
    'EpisodeRecord', 'EvalSummary', 'derive_rng',
]
