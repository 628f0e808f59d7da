"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two quantile grids (or SPD dimensions) that must agree do not."""


class NotPositiveDefiniteError(ValueError):
    """A matrix handed to the Cholesky routine is not positive definite."""


class DegenerateInputError(ValueError):
    """Input with zero dispersion where a positive one is required."""


class SeriesFormatError(ValueError):
    """A series file or record stream could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
