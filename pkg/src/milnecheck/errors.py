"""Exception hierarchy."""


class MilneCheckError(Exception):
    """Base class for all errors raised by milnecheck."""


class StepSizeUnderflow(MilneCheckError):
    """The adaptive integrator needed a step below the representable minimum."""


class NonFiniteState(MilneCheckError):
    """A NaN or Inf appeared in the integrated state."""


class GridTooSmall(MilneCheckError):
    pass


class GridMismatch(MilneCheckError):
    pass


class AmplitudeCollapse(MilneCheckError):
    """The Milne amplitude reached zero or the c^2/u^3 term overflowed."""


class DegeneratePair(MilneCheckError):
    """Two solutions are proportional (vanishing Wronskian)."""


class NodeEncountered(MilneCheckError):
    """|psi| hit zero, so no smooth polar form with u > 0 exists."""


class PhaseUnresolved(MilneCheckError):
    """The grid is too coarse to follow the phase (|dS| >= pi per step)."""


class InvalidConfig(MilneCheckError):
    pass
