class TessLabError(Exception):
    """Base class of every failure raised by tesslab."""


class InvalidParameterError(TessLabError, ValueError):
    """A parameter lies outside the domain of the operation."""


class DegenerateInputError(InvalidParameterError):
    """The input is geometrically degenerate (coincident points, empty box)."""


class GuardTooSmallError(TessLabError):
    """
    A cell that may contribute to an estimate is not certified by the
    carrier of the configuration.
    """

    def __init__(self, message: str, radius: float = float("inf")) -> None:
        super().__init__(message)
        self.radius = radius
        """Certification radius 2D + mu that the carrier failed to cover."""


class NotStabilizedError(TessLabError):
    """The guard cap was reached or the carrier cannot certify a cell."""


class DegenerateSampleError(TessLabError, ArithmeticError):
    """A Monte Carlo sample has no spread (zero variance)."""


class ConfigParseError(TessLabError):
    """The configuration text is not well-formed."""

    def __init__(self, message: str, fields: list[dict[str, str]] | None = None) -> None:
        super().__init__(message)
        self.fields = fields or []
        """Offending locations as {"loc", "msg"} entries."""
