"""Exception types shared across the package."""


class RidgestreamError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(RidgestreamError, ValueError):
    """A configuration parameter is outside its legal range (e.g. a <= 0)."""


class DimensionError(RidgestreamError, ValueError):
    """Operands have incompatible shapes or lengths."""


class NumericError(RidgestreamError, ArithmeticError):
    """Non-finite input or a numerically invalid state (e.g. matrix not SPD)."""


class InputError(RidgestreamError, ValueError):
    """Stream data violates a bound declared for a check (e.g. |y| > Y)."""


class ParseError(RidgestreamError, ValueError):
    """Malformed file content; the message carries the row/column location."""
