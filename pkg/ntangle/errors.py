"""Exceptions raised by ntangle operations."""


class StateSpecError(ValueError):
    """A state description that cannot become a QState."""


class QubitCountError(ValueError):
    """The qubit count is outside what an operation is defined for."""


class BudgetExceededError(ValueError):
    """A brute-force evaluation was requested beyond its size budget."""


class InvalidDensityMatrixError(ValueError):
    """A density matrix whose spectrum is not physical within tolerance."""


class NonConvergenceError(RuntimeError):
    """The polynomial root iteration did not settle.

    `residuals` holds |p(z)| at each returned approximation.
    """

    def __init__(self, message: str, residuals: list[float]):
        super().__init__(f"{message} (residuals: {residuals})")
        self.residuals = residuals
