"""Numerical checks of the amplitude-phase (Milne) form of the 1D Schroedinger equation."""
__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AmplitudeCollapse,
    DegeneratePair,
    GridMismatch,
    GridTooSmall,
    InvalidConfig,
    MilneCheckError,
    NodeEncountered,
    NonFiniteState,
    PhaseUnresolved,
    StepSizeUnderflow,
)
from .ode import Grid, IntegratorConfig, Method, TrajectorySamples, integrate  # noqa: F401
from .reports import ResidualReport  # noqa: F401
