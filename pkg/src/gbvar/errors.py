"""Exception hierarchy.

Two branches matter to the CLI: UserInputError maps to exit code 2,
NumericalError to exit code 3. Everything else is a programming error.
"""


class GbvarError(Exception):
    """Base class for all package-specific errors."""


class UserInputError(GbvarError):
    """Invalid parameters, files, or flags supplied by the caller."""


class NumericalError(GbvarError):
    """A numerical procedure failed beyond recovery."""


# -- parameter validation ---------------------------------------------------

class ConstraintViolation(UserInputError):
    # row is 1-based, matching how panels report coordinates
    def __init__(self, row: int, residual: float):
        self.row = row
        self.residual = residual
        super().__init__(
            f"row {row}: |coefficients| + beta must sum to 1 "
            f"(residual {residual:.3e})"
        )


class NonpositiveBeta(UserInputError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row}: beta must be > 0")


class InnovationMeanOutOfRange(UserInputError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"row {index}: innovation mean must lie in (0, 1)")


class SingularSystem(NumericalError):
    """(I - A) is numerically singular."""


# -- data / moments ---------------------------------------------------------

class PanelTooShort(UserInputError):
    """Fewer observations than the operation requires."""


class NotBinary(UserInputError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"entry at row {row}, column {col} is not 0/1")


class SingularCovariance(NumericalError):
    """Lag-0 covariance is not invertible; use the sparse estimator."""


# -- estimation / bootstrap -------------------------------------------------

class ShapeMismatch(UserInputError):
    """Matrix arguments have incompatible shapes."""


class CovarianceNotPSD(NumericalError):
    """Multiplier covariance failed Cholesky even with jitter."""


class InvalidLevel(UserInputError):
    """Nominal level alpha outside (0, 1)."""


# -- oracle -----------------------------------------------------------------

class DimensionTooLarge(UserInputError):
    """Exact-chain enumeration is limited to small dimensions."""


class NotIrreducible(UserInputError):
    """Exact chain has a degenerate conditional probability."""


# -- cli / ingestion --------------------------------------------------------

class UnknownPreset(UserInputError):
    def __init__(self, name: str):
        super().__init__(f"unknown preset {name!r}")


class NonNumericCell(UserInputError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-numeric cell at row {row}, column {col}")


class EmptyColumn(UserInputError):
    """Input column has no usable values."""
