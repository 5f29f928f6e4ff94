"""Exceptions raised by menger_energy.

Every library error derives from MengerError, so callers (and the CLI) can tell validation
failures apart from internal errors.
"""
from typing import Any, Optional


class MengerError(ValueError):
    """Base for all menger_energy validation errors."""


class InvalidParameter(MengerError):
    pass


# grassmann
class DegenerateBasis(MengerError):
    def __init__(self, index: int, residual: float) -> None:
        super().__init__(f"Gram-Schmidt residual of vector {index} is {residual:.3e}; the basis is linearly dependent.")
        self.index = index
        self.residual = residual


class DimensionMismatch(MengerError):
    pass


class ConstantUndefined(MengerError):
    pass


class AngleTooLarge(MengerError):
    pass


class NotInDomain(MengerError):
    pass


class HypothesisViolated(MengerError):
    def __init__(self, hypothesis: str, detail: str = "") -> None:
        super().__init__(f"Hypothesis '{hypothesis}' violated. {detail}".strip())
        self.hypothesis = hypothesis


# cones
class IntersectionNotWitnessed(MengerError):
    pass


class NotInCone(MengerError):
    pass


class MaxStagesExceeded(MengerError):
    def __init__(self, stages: int, log: Optional[Any] = None) -> None:
        super().__init__(f"No convergence after {stages} stages.")
        self.stages = stages
        self.log = log


# simplex
class ZeroDiameter(MengerError):
    pass


class TooManyVertices(MengerError):
    pass


# pointcloud
class ParseError(MengerError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class HeaderMismatch(MengerError):
    pass


class EmptySet(MengerError):
    pass


class TooFewPoints(MengerError):
    pass


# flatness
class EmptyBall(MengerError):
    pass


class InsufficientPoints(MengerError):
    def __init__(self, message: str, radius: Optional[float] = None) -> None:
        super().__init__(message)
        self.radius = radius


class MultiSheet(MengerError):
    def __init__(self, node: Any, spread: float, threshold: float) -> None:
        super().__init__(
            f"Fiber over node {node} holds points {spread:.4g} apart (threshold {threshold:.4g}); "
            "the radius is too large."
        )
        self.node = node
        self.spread = spread
        self.threshold = threshold


class InsufficientPairs(MengerError):
    pass


# energy
class BudgetExceeded(MengerError):
    pass


class SubcriticalExponent(MengerError):
    def __init__(self, m: int, p: float) -> None:
        super().__init__(f"p={p} must exceed the critical exponent m(m+2)={m * (m + 2)}.")
        self.m = m
        self.p = p


class NoValidH0(MengerError):
    pass


class TargetPointMissing(MengerError):
    def __init__(self, stage: int, axis: int, log: Optional[Any] = None) -> None:
        super().__init__(f"No cloud point near the target on axis {axis} at stage {stage}.")
        self.stage = stage
        self.axis = axis
        self.log = log


# generators
class InvalidSpec(MengerError):
    pass
