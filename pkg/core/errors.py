"""
Error hierarchy shared by every package of the navigation trainer
"""

from typing import Optional


class NavigationError(Exception):
    """Base class for all errors raised by the trainer"""


class InvalidStateError(NavigationError):
    """Non-finite or out-of-arena simulation state"""


class ConfigurationError(NavigationError):
    """Bad configuration value, unknown key, or infeasible world"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        location = ""
        if path is not None and line is not None:
            location = f"{path}:{line}: "
        elif line is not None:
            location = f"line {line}: "
        super().__init__(f"{location}{message}")


class DimensionError(NavigationError):
    """Array shapes do not agree"""


class ContractViolationError(NavigationError):
    """Operation called outside of its precondition (terminated episode, stale cache)"""


class TrainingDivergenceError(NavigationError):
    """Non-finite gradients or loss during training"""


class CheckpointVersionError(NavigationError):
    """Checkpoint written by an unsupported format version"""

    def __init__(self, expected: int, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"unsupported checkpoint format_version: expected {expected}, got {actual}")
