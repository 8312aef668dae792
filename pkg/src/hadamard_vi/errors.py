"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class HVIError(Exception):
    """Base class for all errors raised by hadamard_vi."""


class ManifoldMismatch(HVIError):
    """Two objects live on different manifolds."""


class BasePointMismatch(HVIError):
    """Tangent vectors are attached to different base points."""


class InvalidPoint(HVIError, ValueError):
    """Coordinates violate the manifold's embedding constraint."""


class InvalidTangent(HVIError, ValueError):
    """Components are not tangent at the stated base point."""


class TOutOfRange(HVIError, ValueError):
    """Geodesic parameter outside [0, 1]."""


class InvalidSet(HVIError, ValueError):
    """A convex set descriptor is malformed (zero normal, bad radius, ...)."""


class InfeasibleSet(InvalidSet):
    """The feasibility probe of an intersection did not find a common point."""


class NoConvergence(HVIError):
    """Cyclic projection ran out of sweeps; ``best`` holds the last iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class PointNotInSet(HVIError, ValueError):
    """A point required to lie in a convex set does not."""


class NegativeEpsilon(HVIError, ValueError):
    """Enlargement parameter below zero."""


class PreconditionViolated(HVIError, ValueError):
    """Inputs do not satisfy an operation's precondition."""


class ZeroVector(HVIError, ValueError):
    """A nonzero tangent vector was required."""


class SelectionFailure(HVIError):
    """No element of the enlargement satisfied the selection inequality."""

    def __init__(self, message: str, candidate=None, margin: float = float("nan")):
        super().__init__(message)
        self.candidate = candidate
        self.margin = margin


class BacktrackExhausted(HVIError):
    """The step-size search exceeded ``max_backtracks`` halvings."""

    def __init__(self, message: str, last_margin: float = float("nan")):
        super().__init__(message)
        self.last_margin = last_margin


class ScheduleViolation(HVIError, ValueError):
    """A drawn step-size parameter left its admissible interval."""


class InvalidConfig(HVIError, ValueError):
    """Solver constants violate their required ordering."""


class EmptySample(HVIError, ValueError):
    """A sampling-based estimator was asked for zero samples."""


class OracleNotAvailable(HVIError):
    """No independent reference solver exists for this field."""


class InvalidProblem(HVIError, ValueError):
    """A problem file failed to parse or validate."""
