from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ResidualReport:
    """Max/RMS statistics of a sampled residual and its pass/fail verdict.

    ``passed`` is true exactly when ``max_abs <= tolerance``.
    """

    name: str
    max_abs: float
    rms: float
    tolerance: float
    passed: bool
    grid_points: int

    @classmethod
    def from_residual(cls, name: str, residual, tolerance: float) -> "ResidualReport":
        r = np.abs(np.asarray(residual))
        max_abs = float(r.max())
        rms = float(np.sqrt(np.mean(r**2)))
        return cls(name, max_abs, rms, float(tolerance), bool(max_abs <= tolerance), int(r.size))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "grid_points": self.grid_points,
        }
