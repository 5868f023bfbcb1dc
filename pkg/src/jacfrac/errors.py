"""Exception and warning classes shared across the package."""

from __future__ import annotations


class JacfracError(Exception):
    """Base class for all errors raised by jacfrac."""


class DomainError(JacfracError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """A Gamma-type function was evaluated at one of its poles."""


class IndexRangeError(JacfracError, IndexError):
    """A polynomial or derivative index is out of range."""


class BasisMismatchError(JacfracError, ValueError):
    """Two objects defined on different Jacobi bases were combined."""


class ResourceError(JacfracError, ValueError):
    """A requested size exceeds a configured maximum."""


class NonConvergenceError(JacfracError, RuntimeError):
    """An adaptive procedure hit its refinement limit."""


class InterpolationError(JacfracError, ValueError):
    """Sampled data cannot support the requested expansion order."""


class DegenerateFitError(JacfracError, ValueError):
    """Too few usable points for a least-squares fit."""


class ScopeWarning(UserWarning):
    """Inputs fall outside the parameter window where the theory applies."""


class StabilityWarning(UserWarning):
    """Results may be inaccurate in double precision."""


class AccuracyWarning(UserWarning):
    """A lower-accuracy numerical path was taken."""


class ParseError(JacfracError, ValueError):
    """Malformed input file; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)
