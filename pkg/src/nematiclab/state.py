"""Simulation state containers shared by the solvers and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import Grid, SpectralField


@dataclass(frozen=True, eq=False)
class SimState:
    """Velocity ``u`` (divergence free), director deviation ``d`` and time ``t``."""

    u: SpectralField
    d: SpectralField
    t: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def stacked(self) -> SpectralField:
        """Velocity and director in one field (``ncomp = 2 * dim``), as stored in ELSF."""
        return SpectralField(self.grid, np.concatenate([self.u.coeffs, self.d.coeffs]))

    @classmethod
    def from_stacked(cls, f: SpectralField, t: float = 0.0) -> SimState:
        n = f.grid.dim
        if f.ncomp != 2 * n:
            raise ValueError(f"stacked state needs {2 * n} components, got {f.ncomp}")
        return cls(SpectralField(f.grid, f.coeffs[:n]), SpectralField(f.grid, f.coeffs[n:]), t)

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> SimState:
        return cls(SpectralField.zeros(grid, grid.dim), SpectralField.zeros(grid, grid.dim), t)


@dataclass(frozen=True, eq=False)
class FieldSeries:
    """One field sampled on a time grid."""

    times: np.ndarray
    fields: list

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if len(times) != len(self.fields):
            raise ValueError("times and fields differ in length")
        if len(times) > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.fields)

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid

    def stack(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.fields])

    @classmethod
    def from_stack(cls, times, grid: Grid, coeffs: np.ndarray) -> FieldSeries:
        return cls(times, [SpectralField(grid, c) for c in coeffs])


@dataclass(eq=False)
class Trajectory:
    """Time-ordered snapshots of (u, d) with the regularity index used for norms."""

    states: list
    s: float = 0.6
    pressures: list | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    def series(self, name: str) -> FieldSeries:
        if name not in ("u", "d"):
            raise ValueError(f"unknown field {name!r}")
        return FieldSeries(self.times, [getattr(st, name) for st in self.states])

    @classmethod
    def from_series(cls, u: FieldSeries, d: FieldSeries, s: float = 0.6) -> Trajectory:
        if not np.array_equal(u.times, d.times):
            raise ValueError("velocity and director series use different time grids")
        return cls([SimState(a, b, float(t)) for a, b, t in zip(u.fields, d.fields, u.times)], s=s)


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """Quadrature weights w with sum(w * g(times)) the trapezoidal integral of g."""
    t = np.asarray(times, dtype=float)
    w = np.zeros_like(t)
    if len(t) < 2:
        return w
    h = np.diff(t)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w
