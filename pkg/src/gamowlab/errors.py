"""Exception hierarchy.

Errors split into two families because the CLI maps them to different exit
codes: ``ValidationError`` subclasses are caller mistakes (exit 1), while
``NumericalError`` subclasses report that a computation could not be carried
out to the requested accuracy (exit 2).
"""

from __future__ import annotations


class GamowLabError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(GamowLabError, ValueError):
    """Invalid input supplied by the caller."""


class NumericalError(GamowLabError, ArithmeticError):
    """A numerical procedure failed or could not certify its result."""


class DomainError(ValidationError):
    """Non-finite or otherwise inadmissible argument."""


class SemigroupDomainError(ValidationError):
    """Time argument outside the admissible half-line of a semigroup."""


class ParseError(ValidationError):
    """Configuration text could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ConfigError(ValidationError):
    """Parsed configuration violates one or more invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.field}: {v.message}" for v in self.violations))


class PoleError(NumericalError):
    """Evaluation requested exactly at a pole."""


class OracleError(NumericalError):
    """The ODE oracle did not converge under step refinement."""


class ConvergenceError(NumericalError):
    """Iterative root finding did not converge."""


class NotAResonance(NumericalError):
    """A Jost zero was found but it is a bound or virtual state."""

    def __init__(self, message: str, k: complex):
        self.k = k
        super().__init__(message)


class BoundaryError(NumericalError):
    """A zero lies on (or too close to) an integration contour."""


class QuadratureError(NumericalError):
    """Quadrature failed to reach the requested accuracy."""

    def __init__(self, message: str, error_estimate: float | None = None):
        self.error_estimate = error_estimate
        super().__init__(message)


class IncompleteScanError(NumericalError):
    """Pole scan disagrees with the argument-principle count."""

    def __init__(self, message: str, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(message)


class DegeneratePoleError(NumericalError):
    """Jost derivative vanishes at a pole, so it is not simple."""


class ContourError(NumericalError):
    """Integration contour passes too close to a singularity."""


class DecompositionError(NumericalError):
    """Pole terms plus background fail to reproduce the direct amplitude."""

    def __init__(self, message: str, reconstructed: complex, direct: complex):
        self.reconstructed = reconstructed
        self.direct = direct
        super().__init__(message)


class NoResonanceError(NumericalError):
    """No resonance pole was found where one was required."""
