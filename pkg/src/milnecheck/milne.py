"""Amplitude-phase form psi = N u exp(iS) of the linear equation.

The amplitude obeys the Milne (Ermakov-Pinney) equation
``u'' + k^2 u = c^2 / u^3`` and the phase obeys ``S' = c / u^2``.  This module
builds such triples, moves between them and sampled wave functions, and
evaluates the combination ``K = c^2 (psi/u)^2 + (psi' u - u' psi)^2``, which
is identically zero for any consistent triple.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AmplitudeCollapse, DegeneratePair, GridMismatch, NodeEncountered, PhaseUnresolved
from .ode import Grid, IntegratorConfig, Method, fd_derivative, integrate
from .reports import ResidualReport
from .schrodinger import ComplexWaveFunction, KSquaredProfile, wronskian

# relative size below which |psi| or |W| counts as zero
DEGENERACY_THRESHOLD = 1e-12


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class MilneSolution:
    """Positive amplitude ``u`` with derivative and Milne constant ``c``.

    ``c == 0`` is allowed and marks the degenerate real-psi case.
    """

    grid: Grid
    u: np.ndarray
    u_prime: np.ndarray
    c: float

    def __post_init__(self):
        u = _readonly(self.u)
        du = _readonly(self.u_prime)
        n = self.grid.n_points
        if u.shape != (n,) or du.shape != (n,):
            raise ValueError(f"u and u_prime need {n} samples each")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du))):
            raise AmplitudeCollapse("amplitude samples are not finite")
        if not np.all(u > 0):
            i = int(np.argmin(u > 0))
            raise AmplitudeCollapse(f"amplitude not positive at x = {self.grid.x[i]:.6g}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "u_prime", du)
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Continuous (unwrapped) phase samples."""

    grid: Grid
    S: np.ndarray
    S_prime: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "S", _readonly(self.S))
        object.__setattr__(self, "S_prime", _readonly(self.S_prime))
        n = self.grid.n_points
        if self.S.shape != (n,) or self.S_prime.shape != (n,):
            raise ValueError(f"S and S_prime need {n} samples each")


@dataclass(frozen=True, eq=False)
class PolarTriple:
    N: float
    amp: MilneSolution
    phase: PhaseFunction

    def __post_init__(self):
        if not self.N > 0:
            raise ValueError("normalisation N must be positive")
        if self.amp.grid != self.phase.grid:
            raise GridMismatch("amplitude and phase live on different grids")

    @property
    def grid(self) -> Grid:
        return self.amp.grid

    @property
    def c(self) -> float:
        return self.amp.c

    def compatibility(self, rtol: float = 1e-9) -> ResidualReport:
        """How far ``u^2 S'`` strays from ``c``, relative to ``|c|``."""
        flux = self.amp.u**2 * self.phase.S_prime
        return ResidualReport.from_residual("phase-flux", flux - self.c, rtol * max(abs(self.c), np.finfo(float).tiny))


def solve_milne(k2: KSquaredProfile, c: float, u0: float, du0: float, grid: Grid,
                cfg: IntegratorConfig | None = None) -> MilneSolution:
    """Integrate u'' + k^2 u = c^2 / u^3 from (u0, du0) at grid.x_start."""
    cfg = cfg or IntegratorConfig()
    if not u0 > 0:
        raise ValueError(f"u0 must be positive, got {u0}")
    c2 = float(c) ** 2
    if cfg.method is Method.RK4:
        m = cfg.substeps(grid.h)
        coeff = np.ascontiguousarray(k2(grid.lattice(m)))
        u, du, bad = kernels.rk4_milne(coeff, c2, float(u0), float(du0), grid.h / m, m, grid.n_points)
        if bad >= 0:
            raise AmplitudeCollapse(f"amplitude collapsed near x = {grid.x[bad]:.6g}")
    else:
        def rhs(x, y):
            u = y[0]
            if u <= 0:
                return (np.nan, np.nan)
            return (y[1], -k2(x) * u + c2 / u**3)

        try:
            traj = integrate(rhs, grid.x_start, [u0, du0], grid, cfg)
        except Exception as exc:
            raise AmplitudeCollapse(f"amplitude integration failed: {exc}") from exc
        u, du = traj.values[:, 0], traj.values[:, 1]
    return MilneSolution(grid, u, du, c)


def amplitude_from_pair(f: ComplexWaveFunction, g: ComplexWaveFunction, N: float = 1.0) -> MilneSolution:
    """Amplitude of psi = f + i g for two real solutions of the same linear equation.

    ``u = sqrt(f^2 + g^2) / N`` and ``c = W(f, g) / N^2``.
    """
    if not (f.is_real() and g.is_real()):
        raise ValueError("amplitude_from_pair expects real-valued solutions")
    w = wronskian(f, g)
    a, da = f.psi.real, f.psi_prime.real
    b, db = g.psi.real, g.psi_prime.real
    scale = float(np.max(np.abs(a * db) + np.abs(da * b)))
    if abs(w.mean) <= DEGENERACY_THRESHOLD * scale:
        raise DegeneratePair(f"Wronskian {abs(w.mean):.3g} vanishes relative to scale {scale:.3g}")
    r = np.hypot(a, b)
    return MilneSolution(f.grid, r / N, (a * da + b * db) / (r * N), w.mean.real / N**2)


def integrate_phase(amp: MilneSolution, S0: float = 0.0) -> PhaseFunction:
    """Phase with S' = c / u^2 and S(x_start) = S0.

    The quadrature uses the endpoint values of S' and of
    S'' = -2 c u' / u^3 (Hermite-corrected trapezoid), fourth order in h.
    """
    c, u, du, h = amp.c, amp.u, amp.u_prime, amp.grid.h
    dS = c / u**2
    d2S = -2.0 * c * du / u**3
    steps = 0.5 * h * (dS[:-1] + dS[1:]) + (h * h / 12.0) * (d2S[:-1] - d2S[1:])
    S = np.empty_like(u)
    S[0] = S0
    np.cumsum(steps, out=S[1:])
    S[1:] += S0
    return PhaseFunction(amp.grid, S, dS)


def compose_psi(triple: PolarTriple) -> ComplexWaveFunction:
    """psi = N u e^{iS}, psi' = N (u' + i u S') e^{iS}."""
    amp, ph = triple.amp, triple.phase
    e = np.exp(1j * ph.S)
    psi = triple.N * amp.u * e
    dpsi = triple.N * (amp.u_prime + 1j * amp.u * ph.S_prime) * e
    return ComplexWaveFunction(triple.grid, psi, dpsi)


def unwrap_phase(psi: np.ndarray, dphase: np.ndarray, h: float) -> np.ndarray:
    """Continuous argument of ``psi`` guided by the sampled phase derivative.

    Each increment is moved onto the 2*pi branch nearest the trapezoid
    prediction ``h (S'_i + S'_{i+1}) / 2``.
    """
    wrapped = np.angle(psi)
    if wrapped[0] == -np.pi:
        wrapped[0] = np.pi
    predicted = 0.5 * h * (dphase[:-1] + dphase[1:])
    if np.any(np.abs(predicted) >= np.pi):
        i = int(np.argmax(np.abs(predicted) >= np.pi))
        raise PhaseUnresolved(f"phase advances by >= pi over one step near index {i}; refine the grid")
    raw = np.diff(wrapped)
    turns = np.round((predicted - raw) / (2 * np.pi))
    mismatch = np.abs(raw + 2 * np.pi * turns - predicted)
    if np.any(mismatch > np.pi / 2):
        raise PhaseUnresolved("sampled phase disagrees with its derivative; refine the grid")
    k = np.concatenate(([0.0], np.cumsum(turns)))
    return wrapped + 2 * np.pi * k


def polar_decompose(psi: ComplexWaveFunction, N: float = 1.0) -> PolarTriple:
    """Split a nodeless psi into N u e^{iS}; c is recovered from psi' u - u' psi."""
    if not N > 0:
        raise ValueError("normalisation N must be positive")
    mod = np.abs(psi.psi)
    if mod.min() <= DEGENERACY_THRESHOLD * mod.max():
        i = int(np.argmin(mod))
        raise NodeEncountered(f"|psi| vanishes near x = {psi.grid.x[i]:.6g}")
    log_deriv = psi.psi_prime / psi.psi
    u = mod / N
    du = u * log_deriv.real
    dS = log_deriv.imag
    S = unwrap_phase(psi.psi, dS, psi.grid.h)
    # (psi' u - u' psi) / (i N e^{iS}) = u^2 S'
    c = float(np.mean(u**2 * dS))
    return PolarTriple(N, MilneSolution(psi.grid, u, du, c), PhaseFunction(psi.grid, S, dS))


def _check_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class KSamples:
    values: np.ndarray
    phase_term: np.ndarray
    wronskian_term: np.ndarray
    report: ResidualReport
    rounding_floor: float


def evaluate_K(psi: ComplexWaveFunction, amp: MilneSolution, N: float = 1.0, rtol: float = 1e-7) -> KSamples:
    """K = c^2 (psi/u)^2 + (psi' u - u' psi)^2 for any (psi, u, c), consistent or not.

    The report tolerance is ``rtol * c^2 N^2``, the size of each cancelling term.
    ``rounding_floor`` estimates the error that float64 storage of the samples
    alone puts into K: the difference psi' u - u' psi cancels terms as large as
    max(|psi'| u + |u'| |psi|), so K cannot be resolved below
    eps * |c| N * max(|psi'| u + |u'| |psi|).
    """
    _check_grid(psi, amp)
    t1 = amp.c**2 * (psi.psi / amp.u) ** 2
    t2 = (psi.psi_prime * amp.u - amp.u_prime * psi.psi) ** 2
    K = t1 + t2
    report = ResidualReport.from_residual("K", K, rtol * amp.c**2 * N**2)
    cross = np.abs(psi.psi_prime) * amp.u + np.abs(amp.u_prime) * np.abs(psi.psi)
    floor = float(np.finfo(float).eps * abs(amp.c) * N * cross.max())
    return KSamples(K, t1, t2, report, floor)


def wronskian_identity_residual(triple: PolarTriple, psi: ComplexWaveFunction, rtol: float = 1e-8) -> ResidualReport:
    """|psi' u - u' psi - i c N e^{iS}| against ``rtol * |c| N``."""
    _check_grid(psi, triple.amp)
    amp, N = triple.amp, triple.N
    lhs = psi.psi_prime * amp.u - amp.u_prime * psi.psi
    rhs = 1j * amp.c * N * np.exp(1j * triple.phase.S)
    return ResidualReport.from_residual("wronskian-identity", lhs - rhs, rtol * abs(amp.c) * N)


def polar_equation_residuals(triple: PolarTriple, k2: KSquaredProfile, tolerance: float = 1e-6):
    """Residuals of u'' + (k^2 - S'^2) u = 0 and u S'' + 2 u' S' = 0.

    Second derivatives are finite differences of the sampled first derivatives.
    """
    amp, ph, grid = triple.amp, triple.phase, triple.grid
    d2u = fd_derivative(amp.u_prime, grid, 1)
    d2S = fd_derivative(ph.S_prime, grid, 1)
    amplitude = d2u + (k2(grid.x) - ph.S_prime**2) * amp.u
    phase = amp.u * d2S + 2.0 * amp.u_prime * ph.S_prime
    return (
        ResidualReport.from_residual("polar-amplitude", amplitude, tolerance),
        ResidualReport.from_residual("polar-phase", phase, tolerance),
    )


def milne_residual(amp: MilneSolution, k2: KSquaredProfile, tolerance: float = 1e-7) -> ResidualReport:
    """Residual of u'' + k^2 u - c^2 / u^3."""
    d2u = fd_derivative(amp.u_prime, amp.grid, 1)
    r = d2u + k2(amp.grid.x) * amp.u - amp.c**2 / amp.u**3
    return ResidualReport.from_residual("milne", r, tolerance)


def consistent_triple(psi: ComplexWaveFunction, N: float = 1.0) -> PolarTriple:
    """The pipeline amplitude_from_pair -> integrate_phase applied to psi = f + i g."""
    amp = amplitude_from_pair(psi.real, psi.imag, N)
    S0 = float(np.angle(psi.psi[0]))
    return PolarTriple(N, amp, integrate_phase(amp, S0))
