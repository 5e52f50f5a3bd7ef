"""Exception hierarchy shared across the package.

Two families matter for callers: ``ValidationError`` (bad inputs, CLI exit
code 2) and ``NumericalError`` (a computation that cannot proceed for
numerical reasons, CLI exit code 3).
"""


class VarselError(Exception):
    """Base class for all package errors."""


class ValidationError(VarselError):
    """An input violates a documented precondition."""


class NumericalError(VarselError):
    """A numerically degenerate situation that must not be papered over."""


class ZeroColumnError(ValidationError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has (near-)zero Euclidean norm")


class NotSymmetricError(ValidationError):
    def __init__(self, asymmetry: float):
        self.asymmetry = asymmetry
        super().__init__(f"matrix is not symmetric (max |m - m.T| = {asymmetry:.3e})")


class EmptySupportError(ValidationError):
    def __init__(self):
        super().__init__("support set is empty")


class FullSupportError(ValidationError):
    def __init__(self):
        super().__init__("support covers every column; there is no noise block")


class IndexOutOfRangeError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class KOutOfRangeError(ValidationError):
    def __init__(self, k: int, p: int):
        super().__init__(f"k = {k} outside valid range [1, {p}]")


class NotUnitDiagonalError(ValidationError):
    def __init__(self, max_dev: float):
        super().__init__(f"matrix diagonal deviates from 1 by {max_dev:.3e}")


class DiagonalMatrixError(ValidationError):
    def __init__(self):
        super().__init__("matrix is diagonal; no coefficient vector with the "
                         "required cancellation exists")


class NearSingularError(NumericalError):
    """Signals a failed positive-definiteness requirement instead of silently
    regularizing."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"matrix is near singular (min eigenvalue {min_eigenvalue:.3e})")


class NoValidRowError(NumericalError):
    def __init__(self):
        super().__init__("no row with a strictly dominant diagonal and nonzero "
                         "off-diagonal entries; construction degenerates")


class ExponentOverflowError(NumericalError):
    def __init__(self, max_arg: float):
        self.max_arg = max_arg
        super().__init__(f"exponent argument {max_arg:.3e} exceeds 700; shrink t")


class AllOverflowError(NumericalError):
    def __init__(self):
        super().__init__("every grid point overflows; no usable t value")


class DegenerateRegressionError(NumericalError):
    def __init__(self):
        super().__init__("a mean Hamming distance of 0 makes the exponent "
                         "not estimable")
