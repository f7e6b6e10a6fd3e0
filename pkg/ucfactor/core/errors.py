"""Exception hierarchy for ucfactor."""

from typing import Any, Optional


class UCFactorError(Exception):
    """Base class for every error raised by ucfactor."""


class InvalidSequenceError(UCFactorError, ValueError):
    """A vector, scalar sequence or matrix violates its type invariants."""


class DimensionMismatchError(UCFactorError, ValueError):
    """Operands live in spaces of different dimension or have different lengths."""


class EnumerationCapError(UCFactorError, ValueError):
    """Exhaustive enumeration requested above the configured cap."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"exact enumeration needs N <= {cap}, got N = {size}")
        self.size = size
        self.cap = cap


class NotHermitianError(UCFactorError, ValueError):
    """A Gram matrix is not square, not finite or not Hermitian."""


class NotPositiveSemidefiniteError(NotHermitianError):
    """A Gram matrix has an eigenvalue below the PSD tolerance."""


class ProblemTooLargeError(UCFactorError, ValueError):
    """Input size exceeds what a solver or oracle accepts."""


class CertificationError(UCFactorError):
    """The SDP solver did not reach its gap tolerance; ``solution`` holds the best iterate."""

    def __init__(self, message: str, solution: Optional[Any] = None):
        super().__init__(message)
        self.solution = solution


class RowNormError(UCFactorError, ValueError):
    """A row of the norm-one operator B has l1 norm above 1."""

    def __init__(self, index: int, norm: float):
        super().__init__(f"row {index} of B has l1 norm {norm!r} > 1")
        self.index = index
        self.norm = norm


class OrthonormalityError(UCFactorError, ValueError):
    """A basis handed to from_operator is not orthonormal."""


class ZeroVectorError(UCFactorError, ValueError):
    """A vector that must be nonzero is zero."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class WitnessMarginError(UCFactorError):
    """The weak witness does not reach margin 1."""

    def __init__(self, margin: float, index: int):
        super().__init__(f"witness margin {margin!r} < 1 (attained at index {index})")
        self.margin = margin
        self.index = index


class DegenerateMeasureError(UCFactorError):
    """The measure integrates |<g, Phi_n>|^2 to zero at an index with nonzero symbol."""

    def __init__(self, index: int, value: float = 0.0):
        super().__init__(f"degenerate measure at index {index}: integral of |<g, Phi_n>|^2 is {value!r}")
        self.index = index
        self.value = value


class ProblemFileError(UCFactorError, ValueError):
    """A problem file is missing fields or is malformed."""
