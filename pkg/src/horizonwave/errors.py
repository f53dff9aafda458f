"""Exception types shared across the package."""


class HorizonWaveError(Exception):
    """Base class for all library errors."""


class ValidationError(HorizonWaveError):
    """Bad construction parameters or malformed configuration."""


class OrderShortfallError(HorizonWaveError):
    """Taylor data of a coefficient is too short for the requested order."""


class DegenerateDivision(HorizonWaveError):
    """Division by the degeneracy function where it is numerically zero."""

    def __init__(self, t: float, psi: float):
        super().__init__(f"psi({t}) = {psi} is too small to divide by")
        self.t = t
        self.psi = psi


class NonPositiveAlpha(HorizonWaveError):
    """Flow quadrature requires a strictly positive damping coefficient."""


class NotAdmissible(HorizonWaveError):
    """A pipeline that requires an admissible operator received one that is not."""

    def __init__(self, details):
        super().__init__(f"operator is not admissible: {details}")
        self.details = details


class StepSizeUnderflow(HorizonWaveError):
    """The adaptive integrator could not proceed within the step budget."""

    def __init__(self, t_reached: float, h: float):
        super().__init__(f"step size underflow at t = {t_reached} (h = {h})")
        self.t_reached = t_reached
        self.h = h


class NoConvergence(HorizonWaveError):
    """Fixed-point iteration failed to contract within the iteration budget."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NoFiniteConstant(HorizonWaveError):
    """No constant on the search grid satisfies the energy inequality."""


class ZeroState(HorizonWaveError):
    """An operation received an identically zero state where a ratio is required."""
