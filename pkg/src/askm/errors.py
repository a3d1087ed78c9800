"""Exception types raised across the package."""


class LFError(Exception):
    """Base class for errors raised by this package."""


class ZeroRow(LFError, ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"row {index} has (near) zero norm")


class DimensionMismatch(LFError, ValueError):
    pass


class RankDeficient(LFError, ValueError):
    pass


class BadSampleSize(LFError, ValueError):
    pass


class TooManySubsets(LFError, ValueError):
    pass


class PreconditionViolated(LFError, ValueError):
    pass


class NonFiniteParameter(LFError, ArithmeticError):
    pass


class ScheduleInvariantError(LFError, AssertionError):
    """A schedule invariant failed to hold after a gamma update."""


class DegenerateLambda(LFError, ValueError):
    pass


class ParseError(LFError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class Unsupported(LFError, ValueError):
    def __init__(self, feature):
        self.feature = feature
        super().__init__(f"unsupported MPS feature: {feature}")
