"""Admissible initial data: sphere-valued directors and divergence-free velocities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .spectral import (
    Grid,
    SpectralField,
    divergence,
    forward_transform,
    inverse_transform,
    leray_project,
    lp_norm,
    sobolev_norm,
)

SPHERE_TOL = 1e-12
DIV_TOL = 1e-10
LOW_MODE_RADIUS = 4
SCENARIOS = ("zero", "small_data", "localized_bump")


@dataclass(frozen=True, eq=False)
class EtaVector:
    """Constant far-field director, normalized to unit length on construction."""

    eta: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.eta, dtype=float).ravel()
        n = np.linalg.norm(v)
        if not np.isfinite(n) or n == 0:
            raise ValueError("eta must be a nonzero finite vector")
        object.__setattr__(self, "eta", v / n)

    @property
    def dim(self) -> int:
        return self.eta.size

    def column(self) -> np.ndarray:
        """eta shaped to broadcast against real samples ``(N, M, ..., M)``."""
        return self.eta.reshape((-1,) + (1,) * self.dim)


def sphere_defect(d: SpectralField, eta: EtaVector) -> np.ndarray:
    """Grid values of |eta + d|^2 - 1."""
    v = inverse_transform(d) + eta.column()
    return (v**2).sum(axis=0) - 1.0


@dataclass(frozen=True, eq=False)
class DirectorData:
    d0: SpectralField
    eta: EtaVector

    def __post_init__(self):
        if self.d0.ncomp != self.eta.dim or self.d0.grid.dim != self.eta.dim:
            raise ValueError("director deviation must have ncomp == dim == len(eta)")
        defect = np.abs(sphere_defect(self.d0, self.eta)).max()
        if defect > SPHERE_TOL:
            raise ValueError(f"|eta + d0| deviates from 1 by {defect:.3e} at a grid point")


def divergence_defect(u: SpectralField) -> float:
    return lp_norm(divergence(u), 2)


@dataclass(frozen=True, eq=False)
class FlowData:
    u0: SpectralField

    def __post_init__(self):
        if self.u0.ncomp != self.u0.grid.dim:
            raise ValueError("velocity must have ncomp == dim")
        div = divergence_defect(self.u0)
        if div > DIV_TOL * max(sobolev_norm(self.u0, 1), 1e-300):
            raise ValueError(f"velocity is not divergence free (|div u|_2 = {div:.3e})")


def make_sphere_valued(d_raw: SpectralField, eta: EtaVector, min_modulus: float = 0.1) -> DirectorData:
    """Normalize eta + d_raw pointwise onto the unit sphere and return the deviation."""
    if d_raw.ncomp != eta.dim:
        raise ValueError("d_raw must have one component per dimension")
    w = inverse_transform(d_raw) + eta.column()
    mod = np.sqrt((w**2).sum(axis=0))
    if mod.min() < min_modulus:
        raise ValueError(
            f"|eta + d_raw| drops to {mod.min():.3e} < {min_modulus}; normalization is singular"
        )
    v = w / mod
    return DirectorData(forward_transform(v - eta.column(), d_raw.grid), eta)


def make_divergence_free(u_raw: SpectralField) -> FlowData:
    if u_raw.ncomp != u_raw.grid.dim:
        raise ValueError(f"velocity needs {u_raw.grid.dim} components, got {u_raw.ncomp}")
    return FlowData(leray_project(u_raw))


def random_low_mode(grid: Grid, ncomp: int, rng: np.random.Generator, radius: int = LOW_MODE_RADIUS) -> SpectralField:
    """Real random field with Gaussian coefficients on 0 < |m| <= radius.

    The coefficients are drawn on a fixed lattice, so the same generator state
    yields the same continuum field on every resolution with M/2 > radius.
    """
    if grid.res // 2 <= radius:
        raise ValueError(f"res={grid.res} cannot carry modes up to |m|={radius}")
    n = grid.dim
    side = 2 * radius + 1
    z = rng.standard_normal((ncomp,) + (side,) * n) + 1j * rng.standard_normal((ncomp,) + (side,) * n)
    # z is indexed by m + radius; mirror gives z at -m
    mirrored = np.conj(z[(slice(None),) + (slice(None, None, -1),) * n])
    c = 0.5 * (z + mirrored)
    m = np.arange(-radius, radius + 1)
    mm = np.meshgrid(*([m] * n), indexing="ij")
    keep = sum(x**2 for x in mm) <= radius**2
    keep &= sum(np.abs(x) for x in mm) > 0
    c = c * keep
    out = np.zeros((ncomp,) + grid.shape, dtype=complex)
    idx = np.ix_(*([m % grid.res] * n))
    for i in range(ncomp):
        out[i][idx] = c[i]
    return SpectralField(grid, out)


def _velocity_size(u: SpectralField, s: float) -> float:
    return sobolev_norm(u, s) + lp_norm(u, 1)


def _director_size(d: SpectralField, s: float) -> float:
    return sobolev_norm(d, s + 1) + lp_norm(d, 1)


def _scale_velocity(u: SpectralField, epsilon: float, s: float) -> SpectralField:
    size = _velocity_size(u, s)
    target = epsilon * (1 - 1e-12)
    scale = target / size
    if not np.isfinite(scale) or scale * np.abs(u.coeffs).max() < 1e3 * np.finfo(float).tiny:
        raise ValueError(f"epsilon={epsilon} underflows when rescaling the velocity")
    return u * scale


def _fit_director(shape: np.ndarray, grid: Grid, eta: EtaVector, epsilon: float, s: float) -> DirectorData:
    """Tilt eta by lam * shape (max|shape| = 1), renormalize, and pick lam so the size is epsilon.

    The tilt saturates at lam = 0.9: beyond that the normalization would come
    close to singular, so larger epsilon leaves the director at its cap.
    """
    target = epsilon * (1 - 1e-12)

    def deviation(lam):
        w = eta.column() + lam * shape
        v = w / np.sqrt((w**2).sum(axis=0))
        return forward_transform(v - eta.column(), grid)

    lam_max = 0.9
    if _director_size(deviation(lam_max), s) <= target:
        return make_sphere_valued(deviation(lam_max), eta)
    lam = brentq(lambda x: _director_size(deviation(x), s) - target, 0.0, lam_max, xtol=1e-300, rtol=1e-15)
    d0 = deviation(lam)
    while _director_size(d0, s) > epsilon:
        lam *= 1 - 1e-12
        d0 = deviation(lam)
    if lam == 0 or not np.any(d0.coeffs):
        raise ValueError(f"epsilon={epsilon} underflows when rescaling the director")
    return make_sphere_valued(d0, eta)


def small_data_family(epsilon: float, seed: int, grid: Grid, eta: EtaVector, s: float = 0.6):
    """Seeded random low-mode data with

    ``|u0|_{H^s} + |u0|_{L^1} <= epsilon`` and ``|d0|_{H^{s+1}} + |d0|_{L^1} <= epsilon``.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    rng = np.random.default_rng(seed)
    u_raw = random_low_mode(grid, grid.dim, rng)
    d_raw = random_low_mode(grid, grid.dim, rng)
    u0 = _scale_velocity(leray_project(u_raw), epsilon, s)
    shape = inverse_transform(d_raw)
    shape /= np.sqrt((shape**2).sum(axis=0)).max()
    return FlowData(u0), _fit_director(shape, grid, eta, epsilon, s)


def gaussian_bump(grid: Grid, a: float = 0.05) -> SpectralField:
    """Unit-mass periodized heat kernel at time ``a`` centred at the origin."""
    return SpectralField(grid, np.exp(-a * grid.k2)[None] / grid.volume)


def _perpendicular(eta: EtaVector) -> np.ndarray:
    basis = np.eye(eta.dim)
    e = basis[np.argmin(np.abs(eta.eta))]
    e = e - (e @ eta.eta) * eta.eta
    return e / np.linalg.norm(e)


def localized_bump_family(epsilon: float, grid: Grid, eta: EtaVector, s: float = 0.6, a: float = 0.05):
    """Small localized data for decay runs.

    The velocity is the zero-mean Leray projection of a bump pointing along
    ``x_1``; the director tilts a bump-shaped amount perpendicular to ``eta``.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    bump = gaussian_bump(grid, a)
    u_raw = SpectralField(grid, np.zeros((grid.dim,) + grid.shape, dtype=complex))
    u_raw.coeffs[0] = bump.coeffs[0]
    u = leray_project(u_raw)
    u.coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    u0 = _scale_velocity(u, epsilon, s)
    b = inverse_transform(bump)[0]
    shape = _perpendicular(eta).reshape((-1,) + (1,) * grid.dim) * (b / np.abs(b).max())
    return FlowData(u0), _fit_director(shape, grid, eta, epsilon, s)


def make_scenario(name: str, grid: Grid, eta: EtaVector, epsilon: float = 1e-2, seed: int = 0, s: float = 0.6):
    if name == "zero":
        z = SpectralField.zeros(grid, grid.dim)
        return FlowData(z), DirectorData(z.copy(), eta)
    if name == "small_data":
        return small_data_family(epsilon, seed, grid, eta, s)
    if name == "localized_bump":
        return localized_bump_family(epsilon, grid, eta, s)
    raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")
