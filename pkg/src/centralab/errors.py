"""Exception hierarchy shared by every module."""


class CentralabError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(CentralabError, ValueError):
    pass


class InvalidMatrixError(CentralabError, ValueError):
    """Input is not a finite square matrix."""


class PreconditionError(CentralabError, ValueError):
    """An operation was called outside its stated domain."""


class PolarizationBudgetError(CentralabError):
    """Too many symmetrized constraint operators would be required."""


class HullIntegrityError(CentralabError):
    """Two independent routes to the same algebra disagreed."""


class MatrixFileError(CentralabError):
    """A matrix file could not be read or failed schema validation."""


class MissingMatrixFileError(MatrixFileError):
    pass


class MalformedMatrixFileError(MatrixFileError):
    pass


class RaggedMatrixError(MatrixFileError):
    pass


class NonFiniteMatrixError(MatrixFileError):
    pass


class BatchConfigError(CentralabError, ValueError):
    """A batch configuration is missing fields or violates its invariants."""
