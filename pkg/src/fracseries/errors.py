"""Exception hierarchy shared by all fracseries modules."""


class FracSeriesError(Exception):
    """Base class for every error raised by this package."""


class PoleError(FracSeriesError, ValueError):
    """Gamma evaluated at a nonpositive integer."""


class DomainError(FracSeriesError, ValueError):
    """Argument outside the range where an evaluation is trusted."""


class DivergenceError(FracSeriesError, ValueError):
    """Transform integral does not converge for the requested (s, u)."""


class AdmissibilityError(FracSeriesError, ValueError):
    """A time signal violates its declared exponential growth bound."""


class RepresentationError(FracSeriesError, ValueError):
    """Result leaves the class of fractional-rational transform images."""


class LatticeError(FracSeriesError, ValueError):
    """Time exponent is not an integer multiple of the series order."""


class AlphaMismatchError(FracSeriesError, ValueError):
    """Two series with different fractional orders were combined."""


class DimensionError(FracSeriesError, ValueError):
    """Spatial expressions of different ambient dimension were combined."""


class MissingIterateError(FracSeriesError, LookupError):
    """A He polynomial needs an iterate that has not been computed."""


class ParseError(FracSeriesError, ValueError):
    """Syntax, semantic or order error in equation or expression text.

    ``position`` is the 0-based character offset into ``text`` (or None).
    """

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if text is not None and position is not None:
            message = f"{message} at column {position + 1}: {text!r}"
        super().__init__(message)


class ProblemFileError(FracSeriesError, ValueError):
    """Malformed problem file; carries the 1-based line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = path or "<problem>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")


class DomainMismatchError(FracSeriesError, ValueError):
    """Series and oracle grid describe different problems."""
