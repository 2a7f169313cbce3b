class FranError(Exception):
    """Base class for all engine errors."""


class InvalidParams(FranError, ValueError):
    pass


class Infeasible(FranError):
    """No finite NDT exists (cache-only system without enough cache)."""


class OutOfRange(FranError):
    pass


class CacheTooSmall(FranError):
    pass


class InvalidWeights(FranError):
    pass


class BudgetExceeded(FranError):
    pass


class Undeliverable(FranError):
    pass


class CausalityViolation(FranError):
    pass


class IndivisibleL(FranError):
    def __init__(self, message: str, suggested_L: int):
        super().__init__(message)
        self.suggested_L = suggested_L


class GapViolation(FranError):
    """An achievable/lower-bound ratio fell outside [1, 2]."""
