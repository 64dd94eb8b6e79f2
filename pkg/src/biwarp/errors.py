"""Exception hierarchy.

Everything raised on purpose derives from :class:`BiwarpError` so the CLI can
map it to an exit code. ``ConfigError`` subclasses mean "the input is not a
chart this engine accepts" (exit 2); the rest are numerical/geometric
rejections discovered while evaluating a valid input.
"""


class BiwarpError(Exception):
    """Base class for all deliberate failures."""


class ConfigError(BiwarpError):
    """Malformed input: expressions, chart configs, catalog names."""


class ExprSyntaxError(ConfigError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownFunction(ExprSyntaxError):
    pass


class UnknownIdentifier(ConfigError):
    pass


class UnknownFixture(ConfigError):
    pass


class DomainError(BiwarpError):
    """Evaluation left the domain of a function or of a chart."""


class DimensionMismatch(BiwarpError):
    pass


class RankDeficient(BiwarpError):
    pass


class ConvergenceFailure(BiwarpError):
    pass


class NotPositiveDefinite(BiwarpError):
    pass


class NotNormal(BiwarpError):
    pass


class HigherOrder(ConfigError):
    """Two or more distinct intermediate slant angles: order k > 1."""


class Unclassifiable(BiwarpError):
    """Spectrum of -T^2 does not split cleanly at this point."""


class NotBlockDiagonal(BiwarpError):
    pass


class InconsistentScaling(BiwarpError):
    """Fiber block is not a base-dependent multiple of a fixed fiber metric."""


class ImproperSplit(ConfigError):
    """theta reaches 0 or pi/2, or a required block is empty: the audit's precondition fails."""
