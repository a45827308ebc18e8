"""Initial-value integration on a uniform output grid and finite-difference
tools for residual checks.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import GridTooSmall, NonFiniteState, StepSizeUnderflow


@dataclass(frozen=True)
class Grid:
    """Uniform sample points ``x_i = x_start + i * h``."""

    x_start: float
    x_end: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_start) and math.isfinite(self.x_end)):
            raise ValueError("grid bounds must be finite")
        if not self.x_end > self.x_start:
            raise ValueError(f"x_end ({self.x_end}) must exceed x_start ({self.x_start})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_end - self.x_start) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_start + np.arange(self.n_points) * self.h
        x.flags.writeable = False
        return x

    def refined(self) -> "Grid":
        """Same interval with the step halved."""
        return Grid(self.x_start, self.x_end, 2 * self.n_points - 1)

    def lattice(self, substeps: int) -> np.ndarray:
        """Every abscissa visited by RK4 with ``substeps`` substeps per interval."""
        count = 2 * substeps * (self.n_points - 1) + 1
        return self.x_start + np.arange(count) * (self.h / (2 * substeps))


def halvings(grid: Grid, levels: int) -> list[Grid]:
    """``grid`` followed by ``levels`` successive step halvings."""
    grids = [grid]
    for _ in range(levels):
        grids.append(grids[-1].refined())
    return grids


class Method(str, enum.Enum):
    RK4 = "rk4"
    DOPRI45 = "dopri45"


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RK4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")

    def substeps(self, h: float) -> int:
        """RK4 substeps per grid interval so that no step exceeds max_step."""
        if math.isinf(self.max_step):
            return 1
        return max(1, math.ceil(h / self.max_step * (1 - 1e-12)))


@dataclass(frozen=True)
class TrajectorySamples:
    grid: Grid
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        if self.values.shape[0] != n or self.derivatives.shape != self.values.shape:
            raise ValueError("values and derivatives must have one row per grid point")

    @property
    def state_dim(self) -> int:
        return self.values.shape[1]


RHS = Callable[[float, np.ndarray], Sequence]


def integrate(rhs: RHS, x0: float, y0, grid: Grid, cfg: IntegratorConfig | None = None) -> TrajectorySamples:
    """Integrate ``y' = rhs(x, y)`` from ``x0 = grid.x_start`` and sample on ``grid``.

    Complex initial data gives a complex trajectory.
    """
    cfg = cfg or IntegratorConfig()
    if x0 != grid.x_start:
        raise ValueError(f"x0 ({x0}) must equal grid.x_start ({grid.x_start})")
    y0 = np.atleast_1d(np.asarray(y0))
    dtype = np.complex128 if np.iscomplexobj(y0) else np.float64
    y0 = y0.astype(dtype)
    f = lambda x, y: np.asarray(rhs(x, y), dtype=dtype)

    if cfg.method is Method.RK4:
        values = _rk4(f, y0, grid, cfg.substeps(grid.h))
    else:
        values = _dopri45(f, y0, grid, cfg)
    derivatives = np.array([f(x, y) for x, y in zip(grid.x, values)], dtype=dtype)
    _freeze(values, derivatives)
    return TrajectorySamples(grid, values, derivatives)


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


def _check_finite(y, x):
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"non-finite state at x = {x:.6g}")


def _rk4(f, y0, grid, m):
    n = grid.n_points
    hs = grid.h / m
    out = np.empty((n, y0.size), dtype=y0.dtype)
    out[0] = y = y0
    for i in range(1, n):
        x = grid.x[i - 1]
        for j in range(m):
            xs = x + j * hs
            k1 = f(xs, y)
            k2 = f(xs + hs / 2, y + hs / 2 * k1)
            k3 = f(xs + hs / 2, y + hs / 2 * k2)
            k4 = f(xs + hs, y + hs * k3)
            y = y + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_finite(y, grid.x[i])
        out[i] = y
    return out


def _dopri45(f, y0, grid, cfg):
    # scipy's RK45 is the Dormand-Prince 5(4) pair; t_eval samples its
    # 4th-order continuous extension, so the grid never constrains the steps
    span = (grid.x_start, max(grid.x_end, float(grid.x[-1])))
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(f, span, y0, method="RK45", t_eval=grid.x,
                        rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step)
    if sol.status != 0:
        x = sol.t[-1] if sol.t.size else grid.x_start
        raise StepSizeUnderflow(f"step size underflow near x = {x:.6g}: {sol.message}")
    out = np.ascontiguousarray(sol.y.T, dtype=y0.dtype)
    bad = ~np.all(np.isfinite(out), axis=1)
    if bad.any():
        _check_finite(out[np.argmax(bad)], grid.x[np.argmax(bad)])
    return out


def _stencil_weights(offsets, order):
    offsets = np.asarray(offsets, dtype=float)
    p = np.arange(len(offsets))
    vander = offsets[None, :] ** p[:, None]
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vander, rhs)


# left-boundary stencils keyed by (order, row); order 2 uses six points to stay O(h^4)
_LEFT = {
    (1, 0): (np.arange(5), _stencil_weights(range(0, 5), 1)),
    (1, 1): (np.arange(5), _stencil_weights(range(-1, 4), 1)),
    (2, 0): (np.arange(6), _stencil_weights(range(0, 6), 2)),
    (2, 1): (np.arange(6), _stencil_weights(range(-1, 5), 2)),
}


def richardson_residual_derivative(samples, grid: Grid, order: int = 1) -> np.ndarray:
    """Fourth-order finite-difference derivative of sampled data.

    Central five-point stencils in the interior; one-sided stencils at the two
    points nearest each boundary.  Works on real or complex samples.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    f = np.asarray(samples)
    n = grid.n_points
    if f.shape[0] != n:
        raise ValueError("samples do not match grid")
    width = 5 if order == 1 else 6
    if n < width:
        raise GridTooSmall(f"need at least {width} points for order-{order} stencils, got {n}")
    h = grid.h ** order
    out = np.empty_like(f, dtype=np.result_type(f, float))
    # grouped so that constant samples give exactly zero
    if order == 1:
        out[2:-2] = (8.0 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12.0 * h)
    else:
        out[2:-2] = (16.0 * (f[3:-1] + f[1:-3]) - (f[4:] + f[:-4]) - 30.0 * f[2:-2]) / (12.0 * h)
    sign = -1.0 if order == 1 else 1.0
    for row in (0, 1):
        idx, wb = _LEFT[(order, row)]
        out[row] = wb @ f[idx] / h
        # mirrored stencil at the right edge; odd derivatives flip sign
        out[n - 1 - row] = sign * (wb @ f[n - 1 - idx]) / h
    return out


fd_derivative = richardson_residual_derivative


def observed_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Slope of log(error) against log(step) by least squares."""
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(steps) < 2:
        raise ValueError("need at least two refinement levels")
    if np.any(errors <= 0):
        return math.inf
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    return float(slope)
