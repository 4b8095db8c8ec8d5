"""
Error hierarchy for the lab
Every error carries the process exit code the CLI reports for it
"""

from typing import Optional


class LabError(Exception):
    """Base class for all lab errors"""
    exit_code: int = 1

    def __init__(self, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


# ----------------------------
# Configuration errors (exit 2)
# ----------------------------

class ConfigError(LabError):
    """Invalid or unparseable experiment configuration"""
    exit_code = 2


class SpecError(ConfigError):
    """Generator spec violates its invariants"""


class DomainError(ConfigError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class DegenerateProfileError(ConfigError):
    """Variance profile with no positive prefix sum where one is required"""


class ScheduleInfeasibleError(ConfigError):
    """No admissible start level for a schedule within the horizon"""


# ----------------------------
# Horizon / capacity errors (exit 3)
# ----------------------------

class RangeError(LabError, IndexError):
    """Index outside the represented range"""
    exit_code = 3


class HorizonExceededError(RangeError):
    """Variance level beyond the largest representable level"""

    def __init__(self, level: float, max_level: float, what: str = "variance level"):
        super().__init__(
            f"{what} {level!r} exceeds horizon (largest representable level {max_level!r})",
            {"level": level, "max_level": max_level},
        )
        self.level = level
        self.max_level = max_level


class CapacityError(LabError):
    """Requested table does not fit the configured memory bound"""
    exit_code = 3


# ----------------------------
# Internal invariants (exit 4)
# ----------------------------

class InvariantViolation(LabError):
    """An invariant the mathematics guarantees failed at runtime"""
    exit_code = 4
