"""Exception hierarchy for the toolkit.

Errors split into three families that the CLI maps to distinct exit codes:
configuration problems, invalid input objects, and numerical invariant
violations detected during a computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(ToolkitError):
    """Operands do not fit the declared space dimensions."""


class ValidationError(ToolkitError):
    """An input object violates its construction invariants."""


@dataclass
class Violation:
    """One failed invariant check, with the measured residual."""

    check: str
    residual: float
    detail: str = ""
    indices: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "residual": self.residual,
            "detail": self.detail,
            "indices": list(self.indices),
        }


class ProjectorSetError(ValidationError):
    """A candidate projector family is not an exhaustive orthonormal set."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(
            f"{v.check} (residual {v.residual:.3e}{', ' + v.detail if v.detail else ''})"
            for v in violations
        )
        super().__init__(f"invalid projector set: {lines}")


class StateError(ValidationError):
    """A matrix or coefficient array is not a valid quantum state."""


class UnoccupiedSectorError(ToolkitError):
    """Selection of an outcome whose probability is numerically zero."""


class AlgebraError(ToolkitError):
    """Operator-algebra machinery could not produce a consistent result."""


class InvariantViolationError(ToolkitError):
    """A numerical invariant that should hold by construction failed."""


class MaxEntropyCounterexampleError(InvariantViolationError):
    """A sampled class member exceeded the canonical representative's entropy."""

    def __init__(self, message: str, sigma, entropy: float, entropy_rep: float):
        super().__init__(message)
        self.sigma = sigma
        self.entropy = entropy
        self.entropy_rep = entropy_rep


class ConfigError(ToolkitError):
    """A scenario configuration file is missing, unreadable, or inconsistent."""

    def __init__(self, message: str, violations: list[Violation] | None = None):
        super().__init__(message)
        self.violations = violations or []
