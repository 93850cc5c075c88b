"""
Error hierarchy for pwlrec.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class PwlRecError(Exception):
    """Base class for all numerical and model errors."""
    exit_code = 3


class DimensionError(PwlRecError, ValueError):
    """Matrix or vector shapes are incompatible."""


class NonFiniteError(PwlRecError, ValueError):
    """A matrix contains NaN or Inf entries."""


class DomainError(PwlRecError, ValueError):
    """A scalar argument lies outside its admissible range."""


class SingularMatrix(PwlRecError):
    """Matrix is singular within tolerance."""


class NoRealPrincipalLog(PwlRecError):
    """Matrix has an eigenvalue on the closed negative real axis."""


class NoUniquePeriodicOrbit(PwlRecError):
    """The one-period map has an eigenvalue at 1."""


class UnsupportedTopology(PwlRecError):
    """Operation is only defined for a different number of subintervals."""


class PoleHit(PwlRecError):
    """Transfer function evaluated at (or numerically on) a pole."""


class ComplexEigenvalues(PwlRecError):
    """A 2x2 spectrum is complex where a real pair was required."""


class NotLiftable(PwlRecError):
    """The 2x2 map does not admit the minimal real lift."""


class ProbeInfeasible(PwlRecError):
    """The order probe hit a step size without a real principal logarithm."""


class SpecParseError(PwlRecError):
    """The cycle specification file is malformed or inconsistent."""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
