class KPZLabError(Exception):
    """Base class for errors raised by kpzlab."""


class DomainError(KPZLabError, ValueError):
    """A query falls outside the domain of a field, support or simulated box."""


class ConfigError(KPZLabError, ValueError):
    """Invalid model or harness parameters."""


class AccuracyError(KPZLabError, ArithmeticError):
    """A numerical routine failed its own convergence check."""


class FitError(KPZLabError, ValueError):
    """A statistical fit is degenerate (e.g. zero variance)."""
