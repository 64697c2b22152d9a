"""Exception hierarchy shared by all bushgeo modules.

Exit-code mapping used by the CLI: InputError -> 2, BudgetError -> 3,
validation failures are reported (exit 1), everything else is a bug.
"""


class BushgeoError(Exception):
    """Base class for all errors raised by this package."""


class InputError(BushgeoError):
    """Malformed or inconsistent input data."""


class DimensionMismatch(InputError):
    """Vector/functional length does not match the space dimension."""

    def __init__(self, expected, got, what="vector"):
        super().__init__(f"{what} has length {got}, expected {expected}")
        self.expected = expected
        self.got = got


class StructuralError(InputError):
    """A bush fails a structural precondition (e.g. partition overlap/gap)."""


class PastingError(InputError):
    """Pieces cannot be pasted into a geodesic at the given breakpoints."""


class BushIndexError(InputError):
    """A (level, index) reference points outside the bush."""


class BudgetError(BushgeoError):
    """A depth or combinatorial budget was exhausted."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NumericalError(BushgeoError):
    """A numerical routine failed to converge within its iteration budget."""
