"""Exception hierarchy.

Every error raised on purpose by the package derives from ``GrassError``.
The two intermediate classes decide the CLI exit code: ``DataError`` (bad
input, exit 2) and ``NumericalError`` (the math broke down, exit 3).
"""


class GrassError(Exception):
    """Base class for all package errors."""


class DataError(GrassError, ValueError):
    """Malformed or inconsistent input data."""


class NumericalError(GrassError, ArithmeticError):
    """A numerical procedure could not produce a valid result."""


class DimensionMismatchError(DataError):
    pass


class ParseError(DataError):
    pass


class RankDeficiencyError(NumericalError):
    """A matrix that must have full column rank does not.

    ``column`` is the index of the first column found to be dependent,
    ``None`` when the offending object has no column structure.
    """

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class DecompositionError(NumericalError):
    pass


class CutLocusError(NumericalError):
    """Two subspaces have a principal angle at (or numerically at) pi/2."""


class NumericalKernelError(NumericalError):
    pass


class ObjectiveEvaluationError(NumericalError):
    """Objective returned a non-finite value; ``iterate`` holds the point."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class ClusteringDegeneracyError(NumericalError):
    pass


class SeparationError(DataError):
    """A generator could not draw data satisfying its separation constraint."""


class TrainingError(NumericalError):
    pass
