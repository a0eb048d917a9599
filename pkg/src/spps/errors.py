"""Exception hierarchy shared by all modules."""


class SPPSError(Exception):
    """Base class for every error raised by this package."""


class InputError(SPPSError):
    """Malformed user input (problem files, CSV tables, expressions)."""


class NumericalError(SPPSError):
    """A computation could not be completed reliably."""


class GridMismatch(InputError):
    pass


class ZeroOnMesh(InputError):
    pass


class SeedVanishes(NumericalError):
    pass


class NonconvergedSeed(NumericalError):
    pass


class DivisionBlowup(NumericalError):
    pass


class OrderMismatch(InputError):
    pass


class BasepointNotLeft(InputError):
    pass


class DegenerateZeroPolynomial(NumericalError):
    pass


class EvanescentRegime(NumericalError):
    pass


class NoSignChange(NumericalError):
    pass


class IndexOutOfRange(InputError):
    pass


class ExprSyntaxError(InputError):
    """Parse failure, carrying the byte offset and the set of expected tokens."""

    def __init__(self, offset: int, expected, found: str = ""):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        msg = f"syntax error at offset {offset}: expected {' or '.join(self.expected)}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class EvalError(InputError):
    """Expression evaluation failed at a mesh point."""

    def __init__(self, x: float, cause: str):
        self.x = x
        self.cause = cause
        super().__init__(f"evaluation failed at x={x!r}: {cause}")
