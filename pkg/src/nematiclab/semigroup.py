"""Heat and Stokes propagators, a whole-space Gaussian reference, a reflected
half-space slab, and log-log decay fits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .initial_data import gaussian_bump
from .spectral import (
    Grid,
    SpectralField,
    derivative,
    forward_transform,
    gradient,
    heat_multiplier,
    inverse_transform,
    leray_project,
    lp_norm,
    sobolev_norm,
)

__all__ = [
    "DecaySeries",
    "DecayFit",
    "GaussianReference",
    "HalfSpaceField",
    "TorusWindowWarning",
    "stokes_propagate",
    "gaussian_reference",
    "halfspace_propagate",
    "commutation_check",
    "decay_fit",
    "derivative_sup",
    "heat_decay_series",
    "whole_space_series",
    "theory_slope",
    "normal_derivative",
    "boundary_normal_derivative",
    "halfspace_h1",
    "random_neumann_field",
]


class TorusWindowWarning(UserWarning):
    """A fit window reaches times where periodic images contaminate torus decay."""


def stokes_propagate(f: SpectralField, t: float) -> SpectralField:
    """Stokes semigroup on the torus: heat flow of the Leray projection."""
    if t < 0:
        raise ValueError(f"Stokes semigroup needs t >= 0, got {t}")
    return heat_multiplier(leray_project(f), t)


@dataclass(frozen=True)
class GaussianReference:
    """Closed form of e^{t Delta} exp(-|x|^2 / (4a)) on R^N."""

    amplitude: float
    variance: float
    l2_norm: float
    linf_norm: float


def gaussian_reference(a: float, t: float, N: int) -> GaussianReference:
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    amp = (a / (a + t)) ** (N / 2)
    l2 = np.sqrt((a / (a + t)) ** N * (2 * np.pi * (a + t)) ** (N / 2))
    return GaussianReference(amp, a + t, float(l2), amp)


def theory_slope(N: int, p: float, q: float, j: int = 0) -> float:
    """Exponent -j/2 - N/2 (1/p - 1/q) of the L^p -> L^q heat estimate."""
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    return -j / 2 - N / 2 * (1.0 / p - inv_q)


@dataclass(frozen=True, eq=False)
class DecaySeries:
    times: np.ndarray
    norms: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        n = np.asarray(self.norms, dtype=float)
        if t.shape != n.shape or t.ndim != 1:
            raise ValueError("times and norms must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(t <= 0) or np.any(n <= 0):
            raise ValueError("times and norms must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "norms", n)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual: float
    window: tuple
    npoints: int


def decay_fit(series: DecaySeries, window=None) -> DecayFit:
    """Least-squares line through (log t, log norm) restricted to ``window``.

    Warns with :class:`TorusWindowWarning` when the window passes the torus
    validity time recorded in ``series.meta['validity_time']``.
    """
    lo, hi = window if window is not None else (series.times[0], series.times[-1])
    valid = series.meta.get("validity_time")
    if valid is not None and hi > valid * (1 + 1e-12):
        warnings.warn(
            f"fit window end {hi:g} exceeds torus validity time {valid:g}", TorusWindowWarning, stacklevel=2
        )
    sel = (series.times >= lo * (1 - 1e-12)) & (series.times <= hi * (1 + 1e-12))
    n = int(sel.sum())
    if n < 5:
        raise ValueError(f"need at least 5 points inside [{lo:g}, {hi:g}], found {n}")
    x = np.log(series.times[sel])
    y = np.log(series.norms[sel])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.abs(A @ [slope, intercept] - y).max())
    return DecayFit(float(slope), float(intercept), resid, (float(lo), float(hi)), n)


def derivative_sup(f: SpectralField, j: int) -> float:
    """sup_x |grad^j f(x)| with the Frobenius norm over all tensor indices."""
    g = f
    for _ in range(j):
        g = gradient(g)
    x = inverse_transform(g)
    return float(np.sqrt((x**2).sum(axis=0)).max())


def _norm_of(f: SpectralField, q: float, j: int) -> float:
    g = f
    for _ in range(j):
        g = gradient(g)
    return lp_norm(g, q)


def heat_decay_series(grid: Grid, p: float, q: float, j: int = 0, times=None, a: float = 0.05, npts: int = 40) -> DecaySeries:
    """Norms ||grad^j e^{t Delta} f||_{L^q} of an L^1-normalized bump on the torus.

    ``p`` is recorded only (the data is normalized in L^1, so p = 1 is the
    meaningful choice).  Times default to ``npts`` log-spaced points on
    ``[1, L^2/16]``.
    """
    if times is None:
        times = np.geomspace(1.0, grid.validity_time, npts)
    bump = gaussian_bump(grid, a)
    norms = [_norm_of(heat_multiplier(bump, t), q, j) for t in times]
    meta = dict(p=p, q=q, j=j, domain="torus", dim=grid.dim, box_len=grid.box_len,
                validity_time=grid.validity_time, theory=theory_slope(grid.dim, p, q, j))
    return DecaySeries(np.asarray(times), np.asarray(norms), meta)


def whole_space_series(a: float, N: int, times, norm: str = "linf") -> DecaySeries:
    """Closed-form Gaussian norms on R^N (no periodic images)."""
    refs = [gaussian_reference(a, t, N) for t in times]
    vals = [r.linf_norm if norm == "linf" else r.l2_norm for r in refs]
    return DecaySeries(np.asarray(times, dtype=float), np.asarray(vals), dict(domain="whole_space", a=a, dim=N))


# -- half space via reflection ------------------------------------------------


@dataclass(frozen=True, eq=False)
class HalfSpaceField:
    """Scalar field on the slab periodic in x_1..x_{N-1} with x_N in [0, L/2].

    ``values`` has shape ``(M,)*(N-1) + (M/2 + 1,)``; the last index samples
    x_N = j L / M for j = 0..M/2.  Neumann fields are extended evenly across
    x_N = 0, Dirichlet fields oddly (and must vanish on both walls).
    """

    grid: Grid
    values: np.ndarray
    bc: str

    def __post_init__(self):
        if self.bc not in ("neumann", "dirichlet"):
            raise ValueError(f"bc must be 'neumann' or 'dirichlet', got {self.bc!r}")
        v = np.asarray(self.values, dtype=float)
        shape = self.grid.shape[:-1] + (self.grid.res // 2 + 1,)
        if v.shape != shape:
            raise ValueError(f"values shape {v.shape} does not match slab {shape}")
        if self.bc == "dirichlet":
            scale = max(np.abs(v).max(), 1.0)
            if np.abs(v[..., 0]).max() > 1e-10 * scale or np.abs(v[..., -1]).max() > 1e-10 * scale:
                raise ValueError("dirichlet field must vanish on the walls")
        object.__setattr__(self, "values", v)

    def extend(self) -> SpectralField:
        """Reflected field on the full periodic box."""
        h = self.grid.res // 2
        mirror = self.values[..., h - 1 : 0 : -1]
        sign = 1.0 if self.bc == "neumann" else -1.0
        full = np.concatenate([self.values, sign * mirror], axis=-1)
        return forward_transform(full, self.grid)

    @classmethod
    def restrict(cls, f: SpectralField, bc: str) -> HalfSpaceField:
        x = inverse_transform(f)[0][..., : f.grid.res // 2 + 1]
        if bc == "dirichlet":
            x = x.copy()
            x[..., 0] = 0.0
            x[..., -1] = 0.0
        return cls(f.grid, x, bc)


def halfspace_propagate(f: HalfSpaceField, t: float) -> HalfSpaceField:
    """Neumann or Dirichlet heat flow on the slab by reflection."""
    if t < 0:
        raise ValueError(f"heat semigroup needs t >= 0, got {t}")
    return HalfSpaceField.restrict(heat_multiplier(f.extend(), t), f.bc)


def normal_derivative(f: HalfSpaceField) -> HalfSpaceField:
    """d/dx_N of a Neumann field, returned as a Dirichlet field."""
    if f.bc != "neumann":
        raise ValueError("normal derivative maps Neumann fields to Dirichlet fields")
    return HalfSpaceField.restrict(derivative(f.extend(), f.grid.dim - 1), "dirichlet")


def boundary_normal_derivative(f: HalfSpaceField) -> float:
    """max |d_N f| on the wall x_N = 0 (spectral derivative of the extension)."""
    g = derivative(f.extend(), f.grid.dim - 1)
    return float(np.abs(inverse_transform(g)[0][..., 0]).max())


def commutation_check(f: HalfSpaceField, t: float) -> float:
    """max |d_N e^{t Delta_N} f - e^{t Delta_D} d_N f| over the slab."""
    if f.bc != "neumann":
        raise ValueError("commutation check expects a Neumann field")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    n = f.grid.dim - 1
    lhs = inverse_transform(derivative(heat_multiplier(f.extend(), t), n))[0][..., : f.grid.res // 2 + 1]
    rhs = halfspace_propagate(normal_derivative(f), t).values
    return float(np.abs(lhs - rhs).max())


def halfspace_h1(f: HalfSpaceField) -> float:
    """H^1 norm of the slab field (half the energy of its reflection)."""
    return sobolev_norm(f.extend(), 1) / np.sqrt(2.0)


def random_neumann_field(grid: Grid, rng: np.random.Generator, radius: int = 4) -> HalfSpaceField:
    """Smooth random Neumann field: random cosines in x_N, Fourier modes tangentially."""
    n = grid.dim
    h = grid.res // 2
    x = grid.coordinates()
    vals = np.zeros(grid.shape)
    for m in iproduct(range(-radius, radius + 1), repeat=n - 1):
        for mn in range(radius + 1):
            if sum(abs(c) for c in m) + mn > radius:
                continue
            a, b = rng.standard_normal(2)
            phase = sum(2 * np.pi * mc * x[i] / grid.box_len for i, mc in enumerate(m))
            vals += (a * np.cos(phase) + b * np.sin(phase)) * np.cos(2 * np.pi * mn * x[-1] / grid.box_len)
    return HalfSpaceField(grid, vals[..., : h + 1], "neumann")
