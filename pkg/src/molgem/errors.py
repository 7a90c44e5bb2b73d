"""Exception types raised by the simulation modules."""


class ConvergenceError(RuntimeError):
    """A numerical tolerance could not be met within configured limits."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NoEmissionError(RuntimeError):
    """No re-emitted pulse was found above the detection threshold."""
