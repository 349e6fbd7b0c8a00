"""Exception hierarchy for the torusharmonics package.

Every error raised deliberately by this package derives from TorusError,
so callers can distinguish contract violations from genuine bugs.
"""


class TorusError(Exception):
    """Base class for all torusharmonics errors."""


class ParseError(TorusError):
    """Malformed decimal literal.  Carries the offset of the first bad byte."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class PrecisionMismatchError(TorusError):
    """Two objects built under different precision contexts were combined."""


class ArithmeticDomainError(TorusError):
    """Elementary function evaluated outside its domain (log 0, x/0, ...)."""


class GeometryError(TorusError):
    """Invalid domain geometry: colinear periods, overlapping or degenerate
    holes, holes too large for the torus, or hopeless rejection sampling."""


class ConditioningError(TorusError):
    """Computation rejected or failed because the inputs are too close to a
    degenerate configuration (|q| near 1, non-convergent iteration)."""


class PoleError(TorusError):
    """Evaluation point is within pole_guard of a lattice point."""


class RankDeficiencyError(TorusError):
    """Least-squares matrix is numerically rank deficient.  `column` is the
    index (in the original column order) of the first dependent column."""

    def __init__(self, message, column):
        super().__init__(f"{message} (first dependent column {column})")
        self.column = column


class ReductionError(TorusError):
    """The kernel-block Schur reduction of a pencil hit a numerically
    singular or indefinite block; the caller may retry at a perturbed sigma."""


class DegenerateCandidateError(TorusError):
    """An approximate eigenfunction has (numerically) zero boundary norm."""


class ConfigError(TorusError):
    """Job configuration failed validation before any compute started."""
