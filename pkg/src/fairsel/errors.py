"""Semantic exception hierarchy for fairsel.

Callers that want to distinguish "you gave me a bad value" from "the
computation fell apart" can catch ``DomainError`` vs ``NumericError``;
everything derives from ``FairselError``.
"""


class FairselError(Exception):
    """Base class for all fairsel errors."""


class DomainError(FairselError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BoundaryError(DomainError):
    """A rate sits on {0, 1} where thresholds are infinite."""


class DegenerateModelError(FairselError, ValueError):
    """Model parameters collapse a distribution to a point mass."""


class ConstraintError(FairselError, ValueError):
    """A feasibility constraint cannot be satisfied."""


class NumericError(FairselError, ArithmeticError):
    """A numerical routine failed to converge or produced garbage."""


class ScoringError(FairselError, ValueError):
    """A scoring mode is incompatible with the cohort's prior."""


class ConfigurationError(FairselError, ValueError):
    """Invalid run configuration (sizes, paths, column schemas...)."""


class SchemaError(ConfigurationError):
    """Input data does not match the declared schema."""
