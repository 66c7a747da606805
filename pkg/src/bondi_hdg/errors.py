"""Exception types raised by the solver."""


class ConfigurationError(ValueError):
    """Invalid user-supplied parameters (mesh size, degree, scenario, ...)."""


class NumericalBlowup(RuntimeError):
    """Non-finite values appeared during reconstruction or time stepping."""

    def __init__(self, message, *, time=None, element=None):
        super().__init__(message)
        self.time = time
        self.element = element


class InvariantViolation(AssertionError):
    """A discrete invariant failed during an audited run."""

    def __init__(self, message, *, tag, step=None, element=None, quantity=None):
        super().__init__(message)
        self.tag = tag
        self.step = step
        self.element = element
        self.quantity = quantity
