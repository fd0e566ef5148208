"""Exception hierarchy shared across the package."""


class WVAError(Exception):
    """Base class for all wvasim errors."""


class NotGuidingError(WVAError, ValueError):
    """Core index does not exceed the cladding index."""


class ConvergenceError(WVAError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual={residual:.3e})")
        self.residual = residual


class CutoffError(WVAError, ValueError):
    """Requested mode is not guided at (part of) the requested operating range."""


class ResolutionError(WVAError, ValueError):
    def __init__(self, message, minimum):
        super().__init__(f"{message}; minimum is {minimum}")
        self.minimum = minimum


class GridTooCoarseError(WVAError, ValueError):
    """Phase changes too much between neighbouring grid points to unwrap safely."""


class BandGapError(WVAError, ValueError):
    """Frequency lies inside a photonic band gap where no propagating phase exists."""


class UndefinedSignalError(WVAError, ArithmeticError):
    """A normalized readout signal has a vanishing denominator."""


class DivergentInformationError(WVAError, ArithmeticError):
    """Zero-probability outcome with nonzero derivative: Fisher information diverges."""


class InsufficientDataError(WVAError, ValueError):
    pass


class ConfigError(WVAError, ValueError):
    pass
