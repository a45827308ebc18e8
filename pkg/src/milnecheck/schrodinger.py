"""The linear equation psi'' + k^2(x) psi = 0: coefficient profiles, solves,
Wronskians and superpositions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import GridMismatch, NonFiniteState
from .ode import Grid, IntegratorConfig, Method, fd_derivative, integrate
from .reports import ResidualReport


@dataclass(frozen=True)
class PhysicalParams:
    mass: float = 1.0
    hbar: float = 1.0
    energy: float = 0.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0):
            raise ValueError("mass and hbar must be positive")
        if not np.isfinite(self.energy):
            raise ValueError("energy must be finite")


# Potentials are callables V(x, mass) -> array.

@dataclass(frozen=True)
class Free:
    def __call__(self, x, mass=1.0):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Constant:
    v0: float

    def __call__(self, x, mass=1.0):
        return np.full_like(np.asarray(x, dtype=float), self.v0)


@dataclass(frozen=True)
class Harmonic:
    omega: float = 1.0

    def __call__(self, x, mass=1.0):
        x = np.asarray(x, dtype=float)
        return 0.5 * mass * self.omega**2 * x * x


@dataclass(frozen=True)
class Linear:
    slope: float = 1.0

    def __call__(self, x, mass=1.0):
        return self.slope * np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Piecewise-linear potential through samples on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,) or not np.all(np.isfinite(values)):
            raise ValueError("tabulated potential needs one finite value per grid point")
        object.__setattr__(self, "values", values)

    def __call__(self, x, mass=1.0):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid.x_start, self.grid.x_end
        slack = 1e-12 * (hi - lo)
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise ValueError(f"tabulated potential evaluated outside [{lo}, {hi}]")
        return np.interp(x, self.grid.x, self.values)


Potential = Free | Constant | Harmonic | Linear | Tabulated


class Provenance(str, enum.Enum):
    POTENTIAL = "potential"
    PHASE = "phase"
    DIRECT = "direct"


@dataclass(frozen=True, eq=False)
class KSquaredProfile:
    """Callable coefficient k^2(x); ``source`` records where it came from."""

    evaluator: Callable
    provenance: Provenance = Provenance.DIRECT
    source: object = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.evaluator(x), dtype=float), x.shape)

    @classmethod
    def direct(cls, func: Callable) -> "KSquaredProfile":
        return cls(func, Provenance.DIRECT, func)

    @classmethod
    def constant(cls, value: float) -> "KSquaredProfile":
        return cls(lambda x: np.full_like(x, value), Provenance.DIRECT, value)


def k_squared(pot: Potential, params: PhysicalParams = PhysicalParams()) -> KSquaredProfile:
    """k^2(x) = 2 m (E - V(x)) / hbar^2."""
    m, hbar, energy = params.mass, params.hbar, params.energy

    def evaluator(x):
        return 2.0 * m * (energy - pot(x, m)) / hbar**2

    return KSquaredProfile(evaluator, Provenance.POTENTIAL, (pot, params))


@dataclass(frozen=True, eq=False)
class ComplexWaveFunction:
    grid: Grid
    psi: np.ndarray
    psi_prime: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        psi = np.asarray(self.psi, dtype=np.complex128)
        dpsi = np.asarray(self.psi_prime, dtype=np.complex128)
        if psi.shape != (n,) or dpsi.shape != (n,):
            raise ValueError(f"psi and psi_prime need {n} samples each")
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(dpsi))):
            raise NonFiniteState("wave function samples must be finite")
        psi.flags.writeable = False
        dpsi.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psi_prime", dpsi)

    @property
    def real(self) -> "ComplexWaveFunction":
        return ComplexWaveFunction(self.grid, self.psi.real, self.psi_prime.real)

    @property
    def imag(self) -> "ComplexWaveFunction":
        return ComplexWaveFunction(self.grid, self.psi.imag, self.psi_prime.imag)

    def is_real(self, rtol: float = 0.0) -> bool:
        scale = max(np.abs(self.psi).max(), np.abs(self.psi_prime).max())
        return bool(max(np.abs(self.psi.imag).max(), np.abs(self.psi_prime.imag).max()) <= rtol * scale)


def _check_same_grid(*wfs):
    g = wfs[0].grid
    for wf in wfs[1:]:
        if wf.grid != g:
            raise GridMismatch(f"grids differ: {g} vs {wf.grid}")


def solve_linear(k2: KSquaredProfile, psi0: complex, dpsi0: complex, grid: Grid,
                 cfg: IntegratorConfig | None = None) -> ComplexWaveFunction:
    """Integrate psi'' + k^2 psi = 0 from (psi0, dpsi0) at grid.x_start."""
    cfg = cfg or IntegratorConfig()
    if psi0 == 0 and dpsi0 == 0:
        raise ValueError("initial data (psi0, dpsi0) must not both vanish")
    if cfg.method is Method.RK4:
        m = cfg.substeps(grid.h)
        coeff = np.ascontiguousarray(k2(grid.lattice(m)))
        psi, dpsi, bad = kernels.rk4_linear(coeff, complex(psi0), complex(dpsi0), grid.h / m, m, grid.n_points)
        if bad >= 0:
            raise NonFiniteState(f"non-finite state at x = {grid.x[bad]:.6g}")
    else:
        def rhs(x, y):
            return (y[1], -k2(x) * y[0])

        traj = integrate(rhs, grid.x_start, np.array([psi0, dpsi0], dtype=np.complex128), grid, cfg)
        psi, dpsi = traj.values[:, 0], traj.values[:, 1]
    return ComplexWaveFunction(grid, psi, dpsi)


def fundamental_pair(k2: KSquaredProfile, grid: Grid, cfg: IntegratorConfig | None = None):
    """Real solutions with (1, 0) and (0, 1) initial data; their Wronskian is 1."""
    return solve_linear(k2, 1.0, 0.0, grid, cfg), solve_linear(k2, 0.0, 1.0, grid, cfg)


@dataclass(frozen=True, eq=False)
class WronskianSamples:
    values: np.ndarray
    mean: complex
    max_deviation: float

    def is_constant(self, rtol: float = 1e-7) -> bool:
        return self.max_deviation <= rtol * (1.0 + abs(self.values[0]))


def wronskian(f: ComplexWaveFunction, g: ComplexWaveFunction) -> WronskianSamples:
    """W = f g' - f' g sampled on the shared grid."""
    _check_same_grid(f, g)
    w = f.psi * g.psi_prime - f.psi_prime * g.psi
    mean = complex(w.mean())
    return WronskianSamples(w, mean, float(np.abs(w - mean).max()))


def superpose(f: ComplexWaveFunction, g: ComplexWaveFunction, alpha: complex, beta: complex) -> ComplexWaveFunction:
    _check_same_grid(f, g)
    return ComplexWaveFunction(
        f.grid,
        alpha * f.psi + beta * g.psi,
        alpha * f.psi_prime + beta * g.psi_prime,
    )


def linear_residual(wf: ComplexWaveFunction, k2: KSquaredProfile, tolerance: float = 1e-6) -> ResidualReport:
    """Residual of psi'' + k^2 psi with psi'' differentiated from sampled psi'."""
    d2 = fd_derivative(wf.psi_prime, wf.grid, 1)
    return ResidualReport.from_residual("schrodinger", d2 + k2(wf.grid.x) * wf.psi, tolerance)
