"""Exception types shared across the package."""

from __future__ import annotations


class TangentGeomError(Exception):
    """Base class for all package errors."""


class OrderError(TangentGeomError):
    """Jet orders disagree, or an operation would exceed the maximum order."""


class DimensionError(TangentGeomError):
    """A map or point has the wrong number of coordinates."""


class DomainError(TangentGeomError, ValueError):
    """A primitive was evaluated outside its real domain."""

    def __init__(self, primitive: str, value):
        self.primitive = primitive
        self.value = value
        super().__init__(f"{primitive} is undefined at base value {value!r}")


class ParseError(TangentGeomError):
    """Lexical or syntax error in a map expression."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class ArityError(TangentGeomError):
    """Expression references an undeclared variable or has the wrong component count."""


class MissingHorizontalError(TangentGeomError):
    """A check needs a horizontal connection that was never synthesized."""


class ConfigError(TangentGeomError):
    """Suite configuration is malformed."""


class InverseError(TangentGeomError):
    """A supplied inverse map does not invert its partner at sampled points."""
