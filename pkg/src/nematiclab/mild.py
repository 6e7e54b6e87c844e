"""Mild solutions by Picard iteration of the Duhamel map.

The map freezes the nonlinearities along a given trajectory (w, theta) and
returns the Duhamel solutions

    u(t) = e^{t P Delta} P u0 + int_0^t e^{(t - tau) P Delta} f_u(tau) dtau
    d(t) = e^{t Delta} d0     + int_0^t e^{(t - tau) Delta} f_d(tau) dtau

on a uniform time grid.  The kernel is applied exactly per mode; only the
tau-dependence of the integrand is approximated (trapezoidal rule).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .initial_data import DirectorData, EtaVector, FlowData
from .nonlinearity import assemble_rhs
from .spectral import Grid, SpectralField, heat_multiplier, leray_project, sobolev_norm
from .state import FieldSeries, SimState, Trajectory, trapezoid_weights

__all__ = [
    "PicardConfig",
    "ContractionReport",
    "NonContraction",
    "xst_norm",
    "y_norm",
    "duhamel_apply",
    "duhamel_series",
    "semigroup_flow",
    "picard_map",
    "picard_solve",
]


class NonContraction(RuntimeError):
    """Picard iteration stopped contracting; ``report`` holds the history so far."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class PicardConfig:
    T: float
    n_time: int = 21
    max_iter: int = 50
    tol: float | None = None
    s: float = 0.6

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.n_time < 8:
            raise ValueError(f"n_time must be >= 8, got {self.n_time}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.tol is not None and not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_time)


@dataclass
class ContractionReport:
    iterate_norms: list = field(default_factory=list)
    diff_norms: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    converged: bool = False
    tol: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.diff_norms)

    @property
    def last_ratio(self) -> float:
        finite = [r for r in self.ratios if np.isfinite(r)]
        return finite[-1] if finite else float("nan")

    def rows(self):
        """CSV rows ``iter, y_norm, diff_norm, ratio``."""
        return [(i + 1, y, dn, r) for i, (y, dn, r) in enumerate(zip(self.iterate_norms, self.diff_norms, self.ratios))]


# -- norms ---------------------------------------------------------------------


def _hs_sq(stack: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    """Squared H^s norms of each snapshot in a ``(n, ncomp, M, ...)`` stack."""
    power = (np.abs(stack) ** 2).sum(axis=1)
    weight = (1.0 + grid.k2) ** s
    axes = tuple(range(1, grid.dim + 1))
    return grid.volume * (power * weight).sum(axis=axes)


def _xst(stack: np.ndarray, times: np.ndarray, grid: Grid, s: float) -> float:
    peak = np.sqrt(_hs_sq(stack, grid, s).max())
    dissip = np.sqrt(max((trapezoid_weights(times) * _hs_sq(stack, grid, s + 1)).sum(), 0.0))
    return float(peak + dissip)


def xst_norm(traj, s: float, field: str = "u") -> float:
    """Discrete X^s_T norm: max_n |w_n|_{H^s} + (trapezoid int |w|_{H^{s+1}}^2 dt)^{1/2}.

    ``traj`` is a :class:`FieldSeries` or a :class:`Trajectory` (then ``field``
    selects ``"u"`` or ``"d"``).
    """
    series = traj.series(field) if isinstance(traj, Trajectory) else traj
    if len(series) == 0:
        raise ValueError("empty trajectory")
    return _xst(series.stack(), series.times, series.grid, s)


def y_norm(traj: Trajectory, s: float | None = None) -> float:
    """|(u, d)|_Y = |u|_{X^s_T} + |d|_{X^{s+1}_T}."""
    s = traj.s if s is None else s
    return xst_norm(traj, s, "u") + xst_norm(traj, s + 1, "d")


# -- Duhamel -------------------------------------------------------------------


def _project_stack(stack: np.ndarray, grid: Grid) -> np.ndarray:
    return np.stack([leray_project(SpectralField(grid, c)).coeffs for c in stack])


def duhamel_apply(w0: SpectralField, rhs: FieldSeries, t_index: int, generator: str = "heat") -> SpectralField:
    """Duhamel formula at ``rhs.times[t_index]`` by direct trapezoidal summation."""
    if generator not in ("heat", "stokes"):
        raise ValueError(f"generator must be 'heat' or 'stokes', got {generator!r}")
    if not 0 <= t_index < len(rhs):
        raise ValueError(f"t_index {t_index} outside 0..{len(rhs) - 1}")
    times = rhs.times[: t_index + 1]
    t = times[-1]
    base = leray_project(w0) if generator == "stokes" else w0
    out = heat_multiplier(base, t).coeffs.copy()
    for w, tau, f in zip(trapezoid_weights(times), times, rhs.fields[: t_index + 1]):
        if w == 0:
            continue
        g = leray_project(f) if generator == "stokes" else f
        out += w * np.exp(-w0.grid.k2 * (t - tau)) * g.coeffs
    return SpectralField(w0.grid, out)


def duhamel_series(w0: SpectralField, rhs_stack: np.ndarray, times: np.ndarray, generator: str = "heat") -> np.ndarray:
    """Duhamel solution at every node; same quadrature as :func:`duhamel_apply`.

    Uses the recursion I_{n+1} = E I_n + h/2 (E f_n + f_{n+1}), E = e^{-|k|^2 h},
    which reproduces the trapezoidal sum with the exact kernel.
    """
    grid = w0.grid
    if generator == "stokes":
        base = leray_project(w0).coeffs
        rhs_stack = _project_stack(rhs_stack, grid)
    elif generator == "heat":
        base = w0.coeffs
    else:
        raise ValueError(f"generator must be 'heat' or 'stokes', got {generator!r}")
    out = np.empty((len(times),) + base.shape, dtype=complex)
    out[0] = base
    integral = np.zeros_like(base)
    for n in range(len(times) - 1):
        h = times[n + 1] - times[n]
        E = np.exp(-grid.k2 * h)
        integral = E * integral + 0.5 * h * (E * rhs_stack[n] + rhs_stack[n + 1])
        out[n + 1] = np.exp(-grid.k2 * (times[n + 1] - times[0])) * base + integral
    return out


def semigroup_flow(u0: FlowData, d0: DirectorData, times, s: float = 0.6) -> Trajectory:
    """Linear flows (e^{t P Delta} P u0, e^{t Delta} d0) on ``times``."""
    grid = u0.u0.grid
    zeros = np.zeros((len(times),) + u0.u0.coeffs.shape, dtype=complex)
    u = duhamel_series(u0.u0, zeros, np.asarray(times), "stokes")
    d = duhamel_series(d0.d0, zeros, np.asarray(times), "heat")
    return _trajectory(times, grid, u, d, s)


def _trajectory(times, grid, u_stack, d_stack, s) -> Trajectory:
    return Trajectory.from_series(
        FieldSeries.from_stack(times, grid, u_stack), FieldSeries.from_stack(times, grid, d_stack), s
    )


def picard_map(w_traj: Trajectory, theta_traj: Trajectory, u0: FlowData, d0: DirectorData, eta: EtaVector) -> Trajectory:
    """One application of the contraction map.

    The velocity is taken from ``w_traj`` and the director deviation from
    ``theta_traj`` (these may be the same trajectory).
    """
    times = w_traj.times
    if len(times) != len(theta_traj) or not np.allclose(times, theta_traj.times, rtol=0, atol=1e-14):
        raise ValueError("input trajectories use different time grids")
    grid = w_traj.grid
    if theta_traj.grid != grid or u0.u0.grid != grid:
        raise ValueError("grid mismatch between trajectories and data")
    rhs = [assemble_rhs(a.u, b.d, eta) for a, b in zip(w_traj.states, theta_traj.states)]
    fu = np.stack([r.f_u.coeffs for r in rhs])
    fd = np.stack([r.f_d.coeffs for r in rhs])
    u = duhamel_series(u0.u0, fu, times, "stokes")
    d = duhamel_series(d0.d0, fd, times, "heat")
    return _trajectory(times, grid, u, d, w_traj.s)


def _difference(a: Trajectory, b: Trajectory) -> Trajectory:
    return Trajectory(
        [SimState(x.u - y.u, x.d - y.d, x.t) for x, y in zip(a.states, b.states)], s=a.s
    )


def picard_solve(u0: FlowData, d0: DirectorData, eta: EtaVector, cfg: PicardConfig):
    """Iterate the Duhamel map from the linear flow of the data.

    Returns ``(trajectory, report)``.  Raises :class:`NonContraction` when
    successive-difference ratios stay >= 1 for three iterations (the horizon is
    too long for the data size) or the iterates stop being finite.
    """
    s = cfg.s
    grid = u0.u0.grid
    data_norm = sobolev_norm(u0.u0, s) + sobolev_norm(d0.d0, s + 1)
    tol = cfg.tol if cfg.tol is not None else 1e-9 * (1 + data_norm)
    report = ContractionReport(tol=tol)
    current = semigroup_flow(u0, d0, cfg.times, s)
    eps = np.finfo(float).eps
    streak = 0
    new = current
    for _ in range(cfg.max_iter):
        new = picard_map(current, current, u0, d0, eta)
        y = y_norm(new, s)
        diff = y_norm(_difference(new, current), s)
        if not (np.isfinite(y) and np.isfinite(diff)):
            report.iterate_norms.append(y)
            report.diff_norms.append(diff)
            report.ratios.append(float("nan"))
            raise NonContraction("Picard iterates are no longer finite", report)
        prev = report.diff_norms[-1] if report.diff_norms else None
        scale = max(y, data_norm)
        if prev is not None and prev > 10 * eps * scale:
            ratio = diff / prev
        else:
            ratio = float("nan")
        report.iterate_norms.append(y)
        report.diff_norms.append(diff)
        report.ratios.append(ratio)
        streak = streak + 1 if (np.isfinite(ratio) and ratio >= 1) else 0
        if streak >= 3:
            raise NonContraction(
                f"successive-difference ratios >= 1 for 3 iterations (T={cfg.T:g} too long for the data)", report
            )
        current = new
        if diff <= tol:
            break
    last = report.last_ratio
    report.converged = bool(report.diff_norms[-1] <= tol and (not np.isfinite(last) or last < 1))
    return new, report
