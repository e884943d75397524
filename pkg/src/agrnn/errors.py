"""Exception and warning types shared across the package."""


class InputError(ValueError):
    """User-supplied data or parameters violate an operation's contract."""


class NumericalError(ArithmeticError):
    """A computation produced a non-finite intermediate value."""


class ConstantColumnWarning(UserWarning):
    """A constant feature column was mapped to zeros by the scaler."""


class DroppedRowsWarning(UserWarning):
    """Rows with unparsable or missing values were dropped during CSV ingestion."""
