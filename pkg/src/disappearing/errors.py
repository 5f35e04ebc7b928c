class ParameterError(ValueError):
    """An argument lies outside the range an operation accepts."""


class UnsupportedOrderError(ValueError):
    pass


class DomainError(ValueError):
    """A stencil or evaluation point left the region where fields are defined."""


class ContractViolation(ValueError):
    pass


class ConstructionError(RuntimeError):
    """The time-dependent boundary coefficient cannot be built for these parameters."""


class DivergenceError(RuntimeError):
    pass


class AccuracyWarning(UserWarning):
    pass
