"""Error taxonomy of the lab.

Each error carries the exit status the command line surfaces for it, and an
optional ``details`` mapping that ends up in the structured error document.
"""

from typing import Any, Optional


class InflowLabError(Exception):
    """Base class for all lab errors."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_dict(self) -> dict[str, Any]:
        """Structured form written to ``error.json`` and stderr."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ConfigurationError(InflowLabError):
    """Unknown preset, invalid parameter range or inconsistent data."""
    exit_code = 2


class SchemaMismatchError(ConfigurationError):
    """Two reports cannot be compared."""


class DomainError(ConfigurationError):
    """A flux was evaluated outside its domain of definition."""


class UnsupportedConfigurationError(ConfigurationError):
    """The requested combination is outside what the solvers handle."""


class PreconditionError(ConfigurationError):
    """An operation was called with inputs violating its hypotheses."""


class NoSolutionError(ConfigurationError):
    """The boundary value problem has no solution for the given data."""


class HyperbolicityError(InflowLabError):
    """Complex or defective eigenstructure."""
    exit_code = 3


class CharacteristicDegeneracyError(InflowLabError):
    """An eigenvalue fell below the configured floor."""
    exit_code = 3


class DivergenceError(InflowLabError):
    """An iteration stopped contracting."""
    exit_code = 3


class StabilityBudgetError(InflowLabError):
    """An induction bound of the iteration was violated."""
    exit_code = 3


class SolverFailureError(InflowLabError):
    """A solve finished but its residual check failed."""
    exit_code = 3
