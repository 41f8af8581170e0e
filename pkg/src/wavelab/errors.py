"""Exception types shared across the package."""


class WavelabError(Exception):
    """Base class for all package errors."""


class InvalidMediumError(WavelabError):
    """Medium parameters violate positivity/definiteness requirements."""


class DegenerateBranchError(WavelabError):
    """A dispersion branch is repeated at the requested wave vector."""


class NumericalFailureError(WavelabError):
    """An iterative or algebraic solve failed to converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ConfigurationError(WavelabError):
    """A scenario file or override violates the configuration schema."""


class UnstableRunError(WavelabError):
    """Non-finite values appeared during time stepping.

    Carries the blow-up time and the partial run record so that growth
    histories remain observable.
    """

    def __init__(self, message, time=None, record=None):
        super().__init__(message)
        self.time = time
        self.record = record
