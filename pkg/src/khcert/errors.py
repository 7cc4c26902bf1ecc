"""Exception hierarchy shared by every khcert module."""


class KHError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(KHError, ValueError):
    pass


class UnsupportedDimensionError(KHError, ValueError):
    pass


class ParseError(KHError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RangeError(KHError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionMismatchError(KHError, ValueError):
    pass


class RegionError(KHError, ValueError):
    """Region lies outside the unit cube or cannot be represented."""


class SizeGuardError(KHError, ValueError):
    """Problem too large for an exact algorithm; use a search mode instead."""


class UnsupportedOrderError(KHError, ValueError):
    pass


class ScanFailedError(KHError, RuntimeError):
    pass


class DegenerateThetaError(KHError, ValueError):
    def __init__(self, theta, indices):
        self.theta = theta
        self.indices = list(indices)
        shown = ", ".join(str(n) for n in self.indices[:20])
        more = "" if len(self.indices) <= 20 else f" (+{len(self.indices) - 20} more)"
        super().__init__(
            f"cap coefficient vanishes at theta={theta!r} for n = {shown}{more}"
        )


class ZeroCoefficientError(KHError, ValueError):
    """A kernel coefficient that must be non-vanishing is zero."""


class UndefinedPairingError(KHError, ValueError):
    """The integrand is singular on the region, so the quadrature error is undefined."""


class ConfigError(KHError, ValueError):
    pass
