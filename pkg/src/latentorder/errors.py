"""Exception types raised across the package."""


class LatentOrderError(ValueError):
    """Base class for all errors raised by latentorder."""


class InvalidSizeError(LatentOrderError):
    pass


class InfeasibleError(LatentOrderError):
    """A parameter set cannot be realised with probabilities in [0, 1]."""


class DegenerateChainError(LatentOrderError):
    """Stationary or marginal law is undefined (0/0 or a unit divisor)."""


class SizeGuardError(LatentOrderError):
    """Exhaustive search requested on an instance that is too large."""


class UndefinedBlockError(LatentOrderError):
    pass


class InsufficientSupportError(LatentOrderError):
    pass
