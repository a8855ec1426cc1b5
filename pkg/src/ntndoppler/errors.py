"""Exception hierarchy shared by all modules."""


class NtnDopplerError(Exception):
    """Base class for package errors."""


class ConfigurationError(NtnDopplerError, ValueError):
    """Invalid configuration or parameter combination."""


class InputError(NtnDopplerError, ValueError):
    """Signal or array input does not satisfy an operation's precondition."""


class EstimationError(NtnDopplerError, RuntimeError):
    """Estimation could not produce a result (signal absent, rank deficient system)."""
