"""Variable-phase solutions of psi'' + k^2 psi = c1^2 / psi^3.

Take S solving the pendulum-type equation S'' + c1^2 sin(4S) = 0 and set
psi = exp(iS) with k^2 = S'^2 + c1^2 cos(4S).  Then psi solves the nonlinear
equation, yet the quantity calK = c1^2 (u/psi)^2 = c1^2 exp(-2iS) / N^2 moves
along the unit circle with S, so it is not constant.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import kernels
from .errors import NodeEncountered, NonFiniteState
from .milne import DEGENERACY_THRESHOLD, KSamples, MilneSolution, evaluate_K
from .ode import Grid, IntegratorConfig, Method, fd_derivative, integrate
from .reports import ResidualReport
from .schrodinger import ComplexWaveFunction, KSquaredProfile, Provenance


class Regime(str, enum.Enum):
    CONSTANT = "constant-phase"
    LIBRATION = "libration"
    ROTATION = "rotation"


@dataclass(frozen=True, eq=False)
class PendulumPhase:
    grid: Grid
    S: np.ndarray
    S_prime: np.ndarray
    c1: float

    def __post_init__(self):
        for name in ("S", "S_prime"):
            a = np.array(getattr(self, name), dtype=float)
            if a.shape != (self.grid.n_points,):
                raise ValueError(f"{name} needs {self.grid.n_points} samples")
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def energy(self) -> np.ndarray:
        """First integral S'^2/2 - (c1^2/4) cos(4S) at every sample."""
        return 0.5 * self.S_prime**2 - 0.25 * self.c1**2 * np.cos(4.0 * self.S)

    @property
    def S_double_prime(self) -> np.ndarray:
        return -self.c1**2 * np.sin(4.0 * self.S)

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.S == self.S[0]) and np.all(self.S_prime == 0))

    @property
    def regime(self) -> Regime:
        if self.is_constant:
            return Regime.CONSTANT
        # separatrix energy is the maximum of -(c1^2/4) cos(4S)
        return Regime.ROTATION if self.energy[0] > 0.25 * self.c1**2 else Regime.LIBRATION

    def energy_report(self, rtol: float = 1e-8) -> ResidualReport:
        e = self.energy
        return ResidualReport.from_residual("pendulum-energy", e - e[0], rtol * (1.0 + abs(e[0])))


def is_equilibrium(S0: float, dS0: float) -> bool:
    """True when (S0, 0) is a rest point, i.e. 4*S0 is a multiple of pi up to rounding."""
    return dS0 == 0 and abs(math.sin(4.0 * S0)) <= 8 * np.finfo(float).eps * max(1.0, abs(4.0 * S0))


def solve_pendulum_phase(c1: float, S0: float, dS0: float, grid: Grid,
                         cfg: IntegratorConfig | None = None) -> PendulumPhase:
    """Integrate S'' + c1^2 sin(4S) = 0.

    Rest points are returned as exactly constant samples; integrating them
    would let rounding in sin(4*S0) push S off an unstable equilibrium.
    """
    cfg = cfg or IntegratorConfig()
    n = grid.n_points
    if is_equilibrium(S0, dS0):
        return PendulumPhase(grid, np.full(n, float(S0)), np.zeros(n), c1)
    c1sq = float(c1) ** 2
    if cfg.method is Method.RK4:
        m = cfg.substeps(grid.h)
        S, dS, bad = kernels.rk4_pendulum(c1sq, float(S0), float(dS0), grid.h / m, m, n)
        if bad >= 0:
            raise NonFiniteState(f"non-finite phase at x = {grid.x[bad]:.6g}")
    else:
        traj = integrate(lambda x, y: (y[1], -c1sq * math.sin(4.0 * y[0])), grid.x_start, [S0, dS0], grid, cfg)
        S, dS = traj.values[:, 0], traj.values[:, 1]
    return PendulumPhase(grid, S, dS, c1)


def k_squared_from_phase(phase: PendulumPhase) -> KSquaredProfile:
    """k^2 = S'^2 + c1^2 cos(4S), callable between samples.

    S and S' are each interpolated by cubic Hermite splines that use their
    exact derivatives (S' and S'' = -c1^2 sin 4S), so node values are exact.
    """
    x = phase.grid.x
    c1sq = phase.c1**2
    if phase.is_constant:
        value = c1sq * math.cos(4.0 * phase.S[0])
        return KSquaredProfile(lambda t: np.full_like(t, value), Provenance.PHASE, phase)
    s_spline = CubicHermiteSpline(x, phase.S, phase.S_prime, extrapolate=False)
    ds_spline = CubicHermiteSpline(x, phase.S_prime, phase.S_double_prime, extrapolate=False)

    def evaluator(t):
        return ds_spline(t) ** 2 + c1sq * np.cos(4.0 * s_spline(t))

    return KSquaredProfile(evaluator, Provenance.PHASE, phase)


def compose_counterexample_psi(phase: PendulumPhase) -> ComplexWaveFunction:
    """psi = e^{iS}, psi' = i S' e^{iS}."""
    e = np.exp(1j * phase.S)
    return ComplexWaveFunction(phase.grid, e, 1j * phase.S_prime * e)


def _check_nodeless(psi: ComplexWaveFunction):
    mod = np.abs(psi.psi)
    if mod.min() <= DEGENERACY_THRESHOLD * mod.max():
        raise NodeEncountered(f"|psi| vanishes near x = {psi.grid.x[int(np.argmin(mod))]:.6g}")


def nonlinear_milne_residual(psi: ComplexWaveFunction, k2: KSquaredProfile, c1: float,
                             tolerance: float = 1e-6) -> ResidualReport:
    """Residual of psi'' + k^2 psi - c1^2 / psi^3, psi'' from sampled psi'."""
    _check_nodeless(psi)
    d2 = fd_derivative(psi.psi_prime, psi.grid, 1)
    r = d2 + k2(psi.grid.x) * psi.psi - c1**2 / psi.psi**3
    return ResidualReport.from_residual("nonlinear-milne", r, tolerance)


@dataclass(frozen=True, eq=False)
class CalKSamples:
    grid: Grid
    values: np.ndarray
    modulus_report: ResidualReport
    constancy_report: ResidualReport

    @property
    def spread(self) -> float:
        """max |calK - mean(calK)|."""
        return self.constancy_report.max_abs


def evaluate_calK(psi: ComplexWaveFunction, c1: float, N: float = 1.0, rtol: float = 1e-9) -> CalKSamples:
    """calK = c1^2 (u/psi)^2 with u = |psi| / N.

    ``modulus_report`` compares |calK| with c1^2/N^2; ``constancy_report``
    compares calK with its mean.  Both use tolerance ``rtol * c1^2 / N^2``.
    For a nonconstant phase the second report is expected to fail.
    """
    _check_nodeless(psi)
    scale = c1**2 / N**2
    u = np.abs(psi.psi) / N
    values = c1**2 * (u / psi.psi) ** 2
    values.flags.writeable = False
    modulus = ResidualReport.from_residual("calK-modulus", np.abs(values) - scale, rtol * scale)
    constancy = ResidualReport.from_residual("calK-constancy", values - values.mean(), rtol * scale)
    return CalKSamples(psi.grid, values, modulus, constancy)


@dataclass(frozen=True, eq=False)
class CounterexampleRun:
    """Every artefact of one construction, plus its checks."""

    phase: PendulumPhase
    k2: KSquaredProfile
    psi: ComplexWaveFunction
    closure: ResidualReport
    energy: ResidualReport
    calK: CalKSamples
    K: KSamples

    @property
    def regime(self) -> Regime:
        return self.phase.regime


def run_counterexample(c1: float, S0: float, dS0: float, grid: Grid, cfg: IntegratorConfig | None = None,
                       closure_tol: float = 1e-6, energy_rtol: float = 1e-8, calK_rtol: float = 1e-9) -> CounterexampleRun:
    """Phase solve -> k^2 -> psi -> residual, energy drift, calK and K."""
    if c1 == 0:
        raise ValueError("c1 must be nonzero")
    phase = solve_pendulum_phase(c1, S0, dS0, grid, cfg)
    k2 = k_squared_from_phase(phase)
    psi = compose_counterexample_psi(phase)
    closure = nonlinear_milne_residual(psi, k2, c1, closure_tol)
    calK = evaluate_calK(psi, c1, 1.0, calK_rtol)
    # K with u = 1, c = c1 is not expected to vanish here
    K = evaluate_K(psi, MilneSolution(grid, np.ones(grid.n_points), np.zeros(grid.n_points), c1))
    return CounterexampleRun(phase, k2, psi, closure, phase.energy_report(energy_rtol), calK, K)
