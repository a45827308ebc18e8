"""Command-line front end.

    milnecheck verify-k --potential harmonic --cases 20 --seed 0
    milnecheck counterexample --c1 1 --s0 0 --ds0 0.5 --format csv --out run.csv
    milnecheck sweep --c1 0.5 1 1.5 --s0 0 0.1 0.2 --ds0 0 0.5 3 --format csv
    milnecheck milne-solve --potential free --c 1 --u0 2
    milnecheck schrodinger-solve --potential harmonic --psi0 1 --dpsi0 0

Exit status is 0 when every case behaves as expected, 1 when a check does
not, and 2 for bad arguments or unwritable output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .counterexample import Regime, run_counterexample
from .errors import InvalidConfig, MilneCheckError
from .milne import (
    amplitude_from_pair,
    compose_psi,
    consistent_triple,
    evaluate_K,
    milne_residual,
    polar_equation_residuals,
    solve_milne,
    wronskian_identity_residual,
)
from .ode import Grid, IntegratorConfig, halvings, observed_order
from .reports import ResidualReport
from .schrodinger import (
    Constant,
    Free,
    Harmonic,
    Linear,
    PhysicalParams,
    Tabulated,
    k_squared,
    linear_residual,
    solve_linear,
    wronskian,
)

COMMANDS = ("verify-k", "counterexample", "milne-solve", "schrodinger-solve", "sweep")
POTENTIALS = ("free", "constant", "harmonic", "linear", "tabulated")
MIN_POINTS = 33

# (x_start, x_end, n_points) per command when not given on the command line
DEFAULT_GRIDS = {
    "verify-k": (-5.0, 5.0, 4001),
    "schrodinger-solve": (-5.0, 5.0, 4001),
    "milne-solve": (0.0, 10.0, 8001),
    "counterexample": (0.0, 10.0, 4001),
    "sweep": (0.0, 10.0, 4001),
}
DEFAULT_TOL = {
    "verify-k": 1e-7,
    "schrodinger-solve": 1e-6,
    "milne-solve": 1e-7,
    "counterexample": 1e-6,
    "sweep": 1e-6,
}


@dataclass
class RunConfig:
    command: str
    potential: list[str] = field(default_factory=lambda: ["free"])
    energy: list[float] | None = None
    v0: float = 0.3
    omega: float = 1.0
    slope: float = 1.0
    table: str | None = None
    mass: float = 1.0
    hbar: float = 1.0
    c1: list[float] = field(default_factory=lambda: [1.0])
    s0: list[float] = field(default_factory=lambda: [0.0])
    ds0: list[float] = field(default_factory=lambda: [0.5])
    c: float = 1.0
    u0: float = 1.0
    du0: float = 0.0
    psi0: complex = 1.0
    dpsi0: complex = 1j
    norm: float = 1.0
    x_start: float | None = None
    x_end: float | None = None
    n_points: int | None = None
    tol: float | None = None
    method: str = "rk4"
    seed: int = 0
    cases: int = 20
    family: str = "counterexample"
    inconsistent: bool = False
    refine: int = 0
    format: str = "json"
    out: str | None = None
    samples: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidConfig(f"unknown command {self.command!r}")
        key = "verify-k" if self.command == "sweep" and self.family == "schrodinger" else self.command
        x0, x1, n = DEFAULT_GRIDS[key]
        self.x_start = x0 if self.x_start is None else self.x_start
        self.x_end = x1 if self.x_end is None else self.x_end
        self.n_points = n if self.n_points is None else self.n_points
        self.tol = DEFAULT_TOL[key] if self.tol is None else self.tol
        self.validate()

    def validate(self):
        numbers = [self.v0, self.omega, self.slope, self.mass, self.hbar, self.c, self.u0, self.du0,
                   self.norm, self.x_start, self.x_end, self.tol, *self.c1, *self.s0, *self.ds0,
                   *(self.energy or []), self.psi0.real, self.psi0.imag, self.dpsi0.real, self.dpsi0.imag]
        if not all(math.isfinite(v) for v in numbers):
            raise InvalidConfig("all numeric parameters must be finite")
        if self.n_points < MIN_POINTS:
            raise InvalidConfig(f"--n-points must be at least {MIN_POINTS}")
        if not self.x_end > self.x_start:
            raise InvalidConfig("--x-end must exceed --x-start")
        if self.tol <= 0 or self.norm <= 0 or self.mass <= 0 or self.hbar <= 0:
            raise InvalidConfig("--tol, --norm, --mass and --hbar must be positive")
        if self.cases < 1 or self.refine < 0 or self.seed < 0:
            raise InvalidConfig("--cases must be >= 1, --refine and --seed >= 0")
        for p in self.potential:
            if p not in POTENTIALS:
                raise InvalidConfig(f"unknown potential {p!r}")
            if p == "tabulated" and not self.table:
                raise InvalidConfig("--potential tabulated needs --table PATH")
        if self.command != "sweep":
            for name in ("potential", "c1", "s0", "ds0"):
                if len(getattr(self, name)) != 1:
                    raise InvalidConfig(f"--{name.replace('_', '-')} takes a single value outside sweep")
            if self.energy is not None and len(self.energy) != 1:
                raise InvalidConfig("--energy takes a single value outside sweep")
        if self.command in ("counterexample", "sweep") and any(c == 0 for c in self.c1):
            raise InvalidConfig("--c1 must be nonzero")
        if self.command == "milne-solve" and self.u0 <= 0:
            raise InvalidConfig("--u0 must be positive")
        if self.command == "schrodinger-solve" and self.psi0 == 0 and self.dpsi0 == 0:
            raise InvalidConfig("--psi0 and --dpsi0 must not both vanish")

    @property
    def grid(self) -> Grid:
        return Grid(self.x_start, self.x_end, self.n_points)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(method=self.method)

    def echo(self) -> dict:
        d = asdict(self)
        for key in ("psi0", "dpsi0"):
            d[key] = [d[key].real, d[key].imag]
        for key in ("out", "samples"):
            d.pop(key)
        return d


def default_energy(potential: str) -> float:
    return 0.0 if potential == "linear" else 0.5


def load_table(path: str) -> Tabulated:
    """Two-column (x, V) table on a uniform grid; a header line is optional."""
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#",
                          skiprows=_header_rows(path))
    except (OSError, ValueError) as exc:
        raise InvalidConfig(f"cannot read potential table {path}: {exc}") from exc
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidConfig("potential table must have two columns and at least two rows")
    x, v = data[:, 0], data[:, 1]
    grid = Grid(float(x[0]), float(x[-1]), len(x))
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * (grid.x_end - grid.x_start)):
        raise InvalidConfig("potential table abscissae must be uniformly spaced")
    return Tabulated(grid, v)


def _header_rows(path: str) -> int:
    with open(path) as fh:
        first = fh.readline()
    try:
        [float(t) for t in first.split(",")]
        return 0
    except ValueError:
        return 1


def make_potential(name: str, cfg: RunConfig):
    if name == "free":
        return Free()
    if name == "constant":
        return Constant(cfg.v0)
    if name == "harmonic":
        return Harmonic(cfg.omega)
    if name == "linear":
        return Linear(cfg.slope)
    return load_table(cfg.table)


def _profile(cfg: RunConfig, potential: str, energy: float):
    params = PhysicalParams(cfg.mass, cfg.hbar, energy)
    return k_squared(make_potential(potential, cfg), params)


def _energy(cfg: RunConfig, potential: str) -> float:
    return cfg.energy[0] if cfg.energy else default_energy(potential)


def _tabulated_relaxation(potential: str) -> float:
    # piecewise-linear k^2 limits smoothness, so residual tolerances loosen tenfold
    return 10.0 if potential == "tabulated" else 1.0


# ---------------------------------------------------------------- cases


def _case(index: int, label: str, params: dict, checks: list[tuple[ResidualReport, bool]],
          metrics: dict, status: str | None = None) -> dict:
    ok = all(rep.passed == expected for rep, expected in checks)
    return {
        "index": index,
        "label": label,
        "params": params,
        "reports": [dict(rep.to_dict(), expected=expected) for rep, expected in checks],
        "metrics": metrics,
        "status": status or ("pass" if ok else "fail"),
        "pass": ok,
    }


def random_initial_conditions(seed: int, count: int):
    """(psi0, dpsi0) pairs with moduli in [0.5, 2] and uniform phases."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        r0, r1 = rng.uniform(0.5, 2.0, size=2)
        p0, p1 = rng.uniform(0.0, 2 * np.pi, size=2)
        out.append((complex(r0 * np.exp(1j * p0)), complex(r1 * np.exp(1j * p1))))
    return out


def _k_params(potential, energy, psi0, dpsi0, N) -> dict:
    return {"potential": potential, "energy": energy, "psi0": [psi0.real, psi0.imag],
            "dpsi0": [dpsi0.real, dpsi0.imag], "N": N}


def k_case(cfg: RunConfig, index: int, potential: str, energy: float, psi0: complex, dpsi0: complex) -> dict:
    """One consistent triple through the K pipeline (or the negative control)."""
    grid, integ, N = cfg.grid, cfg.integrator, cfg.norm
    k2 = _profile(cfg, potential, energy)
    psi = solve_linear(k2, psi0, dpsi0, grid, integ)
    triple = consistent_triple(psi, N)
    composed = compose_psi(triple)
    c = triple.c
    scale = c**2 * N**2
    params = _k_params(potential, energy, psi0, dpsi0, N)
    raw_K = evaluate_K(psi, triple.amp, N, cfg.tol)
    metrics = {"c": c, "K_raw_rel": raw_K.report.max_abs / scale}

    if cfg.inconsistent:
        amp = solve_milne(k2, 2.0 * c, triple.amp.u[0], triple.amp.u_prime[0], grid, integ)
        bad = evaluate_K(composed, amp, N, cfg.tol)
        margin = ResidualReport.from_residual("K-control-margin", bad.values, 1e-2 * amp.c**2 * N**2)
        metrics.update(c_mismatched=amp.c, K_rel=bad.report.max_abs / (amp.c**2 * N**2))
        checks = [(bad.report, False), (margin, False)]
        return _case(index, f"{potential}/inconsistent/{index}", params, checks, metrics)

    K = evaluate_K(composed, triple.amp, N, cfg.tol)
    term = ResidualReport.from_residual("K-term-scale", np.abs(K.phase_term).max() - scale, 1e-9)
    ident = wronskian_identity_residual(triple, composed)
    flux = triple.compatibility()
    metrics.update(K_rel=K.report.max_abs / scale, K_rounding_floor=K.rounding_floor / scale)
    checks = [(K.report, True), (term, True), (ident, True), (flux, True)]
    if cfg.refine:
        metrics.update(_polar_orders(cfg, k2, psi0, dpsi0))
    return _case(index, f"{potential}/{index}", params, checks, metrics)


def _polar_orders(cfg, k2, psi0, dpsi0) -> dict:
    hs, amp_err, ph_err = [], [], []
    for g in halvings(cfg.grid, cfg.refine):
        triple = consistent_triple(solve_linear(k2, psi0, dpsi0, g, cfg.integrator), cfg.norm)
        a, p = polar_equation_residuals(triple, k2)
        hs.append(g.h)
        amp_err.append(a.max_abs)
        ph_err.append(p.max_abs)
    return {"order_polar_amplitude": observed_order(hs, amp_err),
            "order_polar_phase": observed_order(hs, ph_err)}


def counterexample_case(cfg: RunConfig, index: int, c1: float, S0: float, dS0: float):
    run = run_counterexample(c1, S0, dS0, cfg.grid, cfg.integrator, closure_tol=cfg.tol)
    constant = run.regime is Regime.CONSTANT
    scale = c1**2
    spread = ResidualReport.from_residual("calK-spread", run.calK.values - run.calK.values.mean(), 0.05 * scale)
    k_nonzero = ResidualReport.from_residual("K-nonvanishing", run.K.values, 1e-2 * scale)
    checks = [
        (run.closure, True),
        (run.energy, True),
        (run.calK.modulus_report, True),
        (run.calK.constancy_report, constant),
        (spread, constant),
        (k_nonzero, False),
    ]
    metrics = {
        "regime": run.regime.value,
        "S_excursion": float(np.abs(run.phase.S - run.phase.S[0]).max()),
        "calK_spread_rel": run.calK.spread / scale,
        "energy": float(run.phase.energy[0]),
    }
    if cfg.refine:
        hs, errs = [], []
        for g in halvings(cfg.grid, cfg.refine):
            r = run_counterexample(c1, S0, dS0, g, cfg.integrator, closure_tol=cfg.tol)
            hs.append(g.h)
            errs.append(r.closure.max_abs)
        metrics["order_closure"] = observed_order(hs, errs) if not constant else None
    params = {"c1": c1, "S0": S0, "dS0": dS0}
    case = _case(index, f"c1={c1:g},S0={S0:g},dS0={dS0:g}", params, checks, metrics)
    if constant and case["pass"]:
        case["status"] = Regime.CONSTANT.value
    return case, run


# ---------------------------------------------------------------- commands


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    case = out[0] if isinstance(out, tuple) else out
    case["wall_time_s"] = time.perf_counter() - t0
    return out


def _guarded(index: int, label: str, params: dict, fn, *args) -> dict:
    """Run one case of a multi-case command; a numerical breakdown becomes a failed row."""
    try:
        out = _timed(fn, *args)
    except InvalidConfig:
        raise
    except MilneCheckError as exc:
        case = _case(index, label, params, [], {"error": f"{type(exc).__name__}: {exc}"}, status="error")
        case["pass"] = False
        case["wall_time_s"] = 0.0
        return case
    return out[0] if isinstance(out, tuple) else out


def _suite(cfg: RunConfig, cases: list[dict]) -> dict:
    cases = sorted(cases, key=lambda c: c["index"])
    return {
        "version": __version__,
        "config": cfg.echo(),
        "cases": cases,
        "verdict": "pass" if all(c["pass"] for c in cases) else "fail",
    }


def cmd_verify_k(cfg: RunConfig) -> dict:
    potential = cfg.potential[0]
    energy = _energy(cfg, potential)
    ics = random_initial_conditions(cfg.seed, cfg.cases)
    cases = [_guarded(i, f"{potential}/{i}", _k_params(potential, energy, a, b, cfg.norm),
                      k_case, cfg, i, potential, energy, a, b) for i, (a, b) in enumerate(ics)]
    return _suite(cfg, cases)


def cmd_counterexample(cfg: RunConfig) -> dict:
    case, run = _timed(counterexample_case, cfg, 0, cfg.c1[0], cfg.s0[0], cfg.ds0[0])
    report = _suite(cfg, [case])
    report["samples"] = {
        "x": run.phase.grid.x, "S": run.phase.S, "S_prime": run.phase.S_prime,
        "k2": run.k2(run.phase.grid.x), "re_calK": run.calK.values.real, "im_calK": run.calK.values.imag,
    }
    return report


def cmd_milne_solve(cfg: RunConfig) -> dict:
    potential = cfg.potential[0]
    energy = _energy(cfg, potential)
    t0 = time.perf_counter()
    k2 = _profile(cfg, potential, energy)
    grid, integ = cfg.grid, cfg.integrator
    amp = solve_milne(k2, cfg.c, cfg.u0, cfg.du0, grid, integ)
    tol = cfg.tol * _tabulated_relaxation(potential)
    checks = [(milne_residual(amp, k2, tol), True)]
    metrics = {"u_min": float(amp.u.min()), "u_max": float(amp.u.max())}
    if cfg.c != 0:
        # the same amplitude from two linear solutions with matched data and W = c
        f = solve_linear(k2, cfg.u0, cfg.du0, grid, integ)
        g = solve_linear(k2, 0.0, cfg.c / cfg.u0, grid, integ)
        pair = amplitude_from_pair(f.real, g.real)
        checks.append((ResidualReport.from_residual("milne-vs-pair", amp.u - pair.u, tol), True))
    if cfg.refine:
        hs, errs = [], []
        for g in halvings(grid, cfg.refine):
            a = solve_milne(k2, cfg.c, cfg.u0, cfg.du0, g, integ)
            hs.append(g.h)
            errs.append(milne_residual(a, k2).max_abs)
        metrics["order_milne"] = observed_order(hs, errs)
    params = {"potential": potential, "energy": energy, "c": cfg.c, "u0": cfg.u0, "du0": cfg.du0}
    case = _case(0, f"milne/{potential}", params, checks, metrics)
    case["wall_time_s"] = time.perf_counter() - t0
    report = _suite(cfg, [case])
    report["samples"] = {"x": grid.x, "u": amp.u, "u_prime": amp.u_prime}
    return report


def cmd_schrodinger_solve(cfg: RunConfig) -> dict:
    potential = cfg.potential[0]
    energy = _energy(cfg, potential)
    t0 = time.perf_counter()
    k2 = _profile(cfg, potential, energy)
    grid, integ = cfg.grid, cfg.integrator
    psi = solve_linear(k2, cfg.psi0, cfg.dpsi0, grid, integ)
    tol = cfg.tol * _tabulated_relaxation(potential)
    w = wronskian(psi.real, psi.imag)
    drift = ResidualReport.from_residual("wronskian-drift", w.values - w.values[0], 1e-7 * (1 + abs(w.values[0])))
    checks = [(linear_residual(psi, k2, tol), True), (drift, True)]
    metrics = {"wronskian": w.mean.real}
    if cfg.refine:
        hs, errs = [], []
        for g in halvings(grid, cfg.refine):
            hs.append(g.h)
            errs.append(linear_residual(solve_linear(k2, cfg.psi0, cfg.dpsi0, g, integ), k2).max_abs)
        metrics["order_schrodinger"] = observed_order(hs, errs)
    params = {"potential": potential, "energy": energy, "psi0": [cfg.psi0.real, cfg.psi0.imag],
              "dpsi0": [cfg.dpsi0.real, cfg.dpsi0.imag]}
    case = _case(0, f"schrodinger/{potential}", params, checks, metrics)
    case["wall_time_s"] = time.perf_counter() - t0
    report = _suite(cfg, [case])
    report["samples"] = {"x": grid.x, "re_psi": psi.psi.real, "im_psi": psi.psi.imag,
                         "re_dpsi": psi.psi_prime.real, "im_dpsi": psi.psi_prime.imag}
    return report


def cmd_sweep(cfg: RunConfig) -> dict:
    cases = []
    if cfg.family == "counterexample":
        points = [(c1, s0, ds0) for c1 in cfg.c1 for s0 in cfg.s0 for ds0 in cfg.ds0]
        for i, (c1, s0, ds0) in enumerate(points):
            cases.append(_guarded(i, f"c1={c1:g},S0={s0:g},dS0={ds0:g}", {"c1": c1, "S0": s0, "dS0": ds0},
                                  counterexample_case, cfg, i, c1, s0, ds0))
    else:
        ics = random_initial_conditions(cfg.seed, cfg.cases)
        i = 0
        for potential in cfg.potential:
            for energy in cfg.energy or [default_energy(potential)]:
                for a, b in ics:
                    cases.append(_guarded(i, f"{potential}/{i}", _k_params(potential, energy, a, b, cfg.norm),
                                          k_case, cfg, i, potential, energy, a, b))
                    i += 1
    return _suite(cfg, cases)


HANDLERS = {
    "verify-k": cmd_verify_k,
    "counterexample": cmd_counterexample,
    "milne-solve": cmd_milne_solve,
    "schrodinger-solve": cmd_schrodinger_solve,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    if v is None:
        return ""
    return str(v)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def render_json(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "samples"}
    return json.dumps(body, indent=2, default=_json_default) + "\n"


def _write_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_samples_csv(samples: dict) -> str:
    header = list(samples)
    return _write_csv(header, zip(*(samples[k] for k in header)))


def render_cases_csv(report: dict) -> str:
    """One row per case: parameters, status, then max_abs of every report."""
    cases = report["cases"]
    param_keys = list(dict.fromkeys(k for c in cases for k in c["params"]))
    report_names = list(dict.fromkeys(r["name"] for c in cases for r in c["reports"]))
    metric_keys = list(dict.fromkeys(k for c in cases for k in c["metrics"]))
    header = ["index", *param_keys, "status", "pass", *report_names, *metric_keys]
    rows = []
    for c in cases:
        by_name = {r["name"]: r["max_abs"] for r in c["reports"]}
        params = [c["params"].get(k) for k in param_keys]
        params = [";".join(_fmt(x) for x in p) if isinstance(p, list) else p for p in params]
        rows.append([c["index"], *params, c["status"], c["pass"],
                     *(by_name.get(n) for n in report_names), *(c["metrics"].get(k) for k in metric_keys)])
    return _write_csv(header, rows)


def render(report: dict, fmt: str, command: str) -> str:
    if fmt == "json":
        return render_json(report)
    if "samples" in report and command != "sweep":
        return render_samples_csv(report["samples"])
    return render_cases_csv(report)


# ---------------------------------------------------------------- argparse


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--potential", nargs="+", choices=POTENTIALS, default=["free"])
    g.add_argument("--energy", nargs="+", type=float, default=None,
                   help="energy E (default 0.5, or 0 for the linear potential)")
    g.add_argument("--v0", type=float, default=0.3, help="height of the constant potential")
    g.add_argument("--omega", type=float, default=1.0, help="harmonic frequency")
    g.add_argument("--slope", type=float, default=1.0, help="slope a of the linear potential V = a x")
    g.add_argument("--table", help="csv file of (x, V) samples for --potential tabulated")
    g.add_argument("--mass", type=float, default=1.0)
    g.add_argument("--hbar", type=float, default=1.0)
    g.add_argument("--c1", nargs="+", type=float, default=[1.0])
    g.add_argument("--s0", nargs="+", type=float, default=[0.0])
    g.add_argument("--ds0", nargs="+", type=float, default=[0.5])
    g.add_argument("--c", type=float, default=1.0, help="Milne constant for milne-solve")
    g.add_argument("--u0", type=float, default=1.0)
    g.add_argument("--du0", type=float, default=0.0)
    g.add_argument("--psi0", type=_complex, default=1 + 0j)
    g.add_argument("--dpsi0", type=_complex, default=1j)
    g.add_argument("--norm", type=float, default=1.0, help="normalisation N of psi = N u e^{iS}")
    n = common.add_argument_group("numerics")
    n.add_argument("--x-start", type=float)
    n.add_argument("--x-end", type=float)
    n.add_argument("--n-points", type=int)
    n.add_argument("--tol", type=float, help="main residual tolerance (relative c^2 N^2 for K)")
    n.add_argument("--method", choices=("rk4", "dopri45"), default="rk4")
    n.add_argument("--refine", type=int, default=0, metavar="K",
                   help="also run K grid halvings and report observed convergence order")
    r = common.add_argument_group("run")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--cases", type=int, default=20, help="random initial conditions per potential")
    r.add_argument("--inconsistent", action="store_true",
                   help="negative control: pair psi with an amplitude solved for a mismatched c")
    r.add_argument("--family", choices=("counterexample", "schrodinger"), default="counterexample",
                   help="what sweep varies: (c1, s0, ds0) or (potential, energy)")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out", help="output file (default stdout)")
    r.add_argument("--samples", help="also write sampled curves as csv to this path")

    parser = argparse.ArgumentParser(prog="milnecheck", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(**vars(ns))


def run(cfg: RunConfig) -> dict:
    return HANDLERS[cfg.command](cfg)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 for --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
    except (InvalidConfig, ValueError) as exc:
        print(f"milnecheck: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except MilneCheckError as exc:
        print(f"milnecheck: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    try:
        _emit(render(report, cfg.format, cfg.command), cfg.out)
        if cfg.samples and "samples" in report:
            _emit(render_samples_csv(report["samples"]), cfg.samples)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    except OSError as exc:
        print(f"milnecheck: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0 if report["verdict"] == "pass" else 1
