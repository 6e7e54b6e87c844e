"""
Fourier infrastructure on the periodic box [0, L)^N.

Fields are stored as full complex coefficient arrays of shape
``(ncomp, M, ..., M)`` in FFT storage order, with the convention

    f(x) = sum_k f_hat[k] exp(i k.x),   k = 2*pi*wrap(m)/L,

so ``f_hat[0]`` is the spatial mean.  All operators here are diagonal (or
block diagonal per mode) in this basis.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "SpectralField",
    "OutsideTheoryWarning",
    "forward_transform",
    "inverse_transform",
    "derivative",
    "gradient",
    "divergence",
    "laplacian",
    "sobolev_norm",
    "lp_norm",
    "leray_project",
    "heat_multiplier",
    "dealias",
    "product",
]


class OutsideTheoryWarning(UserWarning):
    """Emitted when a configuration leaves the range covered by the existence theory."""


@dataclass(frozen=True)
class Grid:
    """Periodic box descriptor.

    Parameters
    ----------
    dim : int
        Spatial dimension N (3 for production runs, 2 as a smoke-test mode).
    res : int
        Grid points per axis M, even and at least 8.
    box_len : float
        Period L of every axis.
    """

    dim: int
    res: int
    box_len: float = 2 * np.pi

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.res < 8 or self.res % 2:
            raise ValueError(f"res must be even and >= 8, got {self.res}")
        if not self.box_len > 0:
            raise ValueError(f"box_len must be positive, got {self.box_len}")
        object.__setattr__(self, "box_len", float(self.box_len))
        if self.dim == 2:
            warnings.warn(
                "dim=2 is a smoke-test mode: the existence and decay theory assumes N >= 3",
                OutsideTheoryWarning,
                stacklevel=3,
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.res,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_len / self.res

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_len**self.dim

    @property
    def validity_time(self) -> float:
        """Latest time at which torus heat flow still mimics whole space (L^2/16)."""
        return self.box_len**2 / 16.0

    @cached_property
    def mode_index(self) -> np.ndarray:
        """Wrapped integer mode numbers along one axis, FFT order."""
        return np.fft.fftfreq(self.res, 1.0 / self.res).astype(int)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Broadcastable wavenumber arrays k_j, one per axis."""
        k1 = 2 * np.pi * self.mode_index / self.box_len
        return tuple(_axis_view(k1, ax, self.dim) for ax in range(self.dim))

    @cached_property
    def deriv_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers used by first derivatives: the Nyquist entry is zeroed."""
        k1 = 2 * np.pi * self.mode_index / self.box_len
        k1 = np.where(self.mode_index == -self.res // 2, 0.0, k1)
        return tuple(_axis_view(k1, ax, self.dim) for ax in range(self.dim))

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 on the full mode lattice (Nyquist included)."""
        out = np.zeros(self.shape)
        for k in self.wavenumbers:
            out = out + k**2
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.abs(self.mode_index) <= self.res / 3.0
        mask = np.ones(self.shape, dtype=bool)
        for ax in range(self.dim):
            mask = mask & _axis_view(keep, ax, self.dim)
        return mask

    def coordinates(self) -> tuple[np.ndarray, ...]:
        x1 = np.arange(self.res) * self.spacing
        return tuple(np.meshgrid(*([x1] * self.dim), indexing="ij"))

    def digest(self) -> str:
        key = f"{self.dim}:{self.res}:{self.box_len!r}".encode()
        return hashlib.sha256(key).hexdigest()[:16]


def _axis_view(a: np.ndarray, axis: int, dim: int) -> np.ndarray:
    shape = [1] * dim
    shape[axis] = a.size
    return a.reshape(shape)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Multi-component real field held as Fourier coefficients.

    ``coeffs`` has shape ``(ncomp, M, ..., M)``.  Arithmetic with other fields
    on the same grid and with scalars acts on the coefficients.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == self.grid.dim:
            c = c[None]
        if c.shape[1:] != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 1) -> SpectralField:
        return cls(grid, np.zeros((ncomp,) + grid.shape, dtype=complex))

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    def values(self) -> np.ndarray:
        """Real-space samples, shape ``(ncomp, M, ..., M)``."""
        return inverse_transform(self)

    def component(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i : i + 1])

    def copy(self) -> SpectralField:
        return SpectralField(self.grid, self.coeffs.copy())

    def _check(self, other: SpectralField):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs - other.coeffs)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return SpectralField(self.grid, self.coeffs * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)


def _spatial_axes(grid: Grid) -> tuple[int, ...]:
    return tuple(range(1, grid.dim + 1))


def forward_transform(samples: np.ndarray, grid: Grid) -> SpectralField:
    """Real samples ``(ncomp, M, ..., M)`` (or ``(M, ..., M)``) to coefficients."""
    x = np.asarray(samples, dtype=float)
    if x.shape == grid.shape:
        x = x[None]
    if x.ndim != grid.dim + 1 or x.shape[1:] != grid.shape:
        raise ValueError(f"sample shape {np.shape(samples)} does not match grid {grid.shape}")
    return SpectralField(grid, sfft.fftn(x, axes=_spatial_axes(grid), norm="forward"))


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Real samples of ``f``; only the non-redundant half spectrum is read."""
    half = f.coeffs[..., : f.grid.res // 2 + 1]
    return sfft.irfftn(half, s=f.grid.shape, axes=_spatial_axes(f.grid), norm="forward")


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """Spectral partial derivative along ``axis`` (Nyquist mode dropped)."""
    if not 0 <= axis < f.grid.dim:
        raise ValueError(f"axis {axis} out of range for dim {f.grid.dim}")
    return SpectralField(f.grid, 1j * f.grid.deriv_wavenumbers[axis] * f.coeffs)


def gradient(f: SpectralField) -> SpectralField:
    """Gradient with component ordering ``[i * ncomp + c] = d_i f_c``."""
    kd = f.grid.deriv_wavenumbers
    return SpectralField(f.grid, np.concatenate([1j * k * f.coeffs for k in kd]))


def divergence(f: SpectralField) -> SpectralField:
    if f.ncomp != f.grid.dim:
        raise ValueError(f"divergence needs ncomp == dim, got {f.ncomp}")
    kd = f.grid.deriv_wavenumbers
    return SpectralField(f.grid, sum(1j * k * c for k, c in zip(kd, f.coeffs))[None])


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, -f.grid.k2 * f.coeffs)


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm via the Bessel-potential multiplier (1 + |k|^2)^(s/2).

    Fractional ``s`` is allowed; all components are summed.
    """
    if s < 0:
        raise ValueError(f"Sobolev index must be nonnegative, got {s}")
    power = np.abs(f.coeffs) ** 2
    if s == 0:
        total = power.sum()
    else:
        total = (power.sum(axis=0) * (1.0 + f.grid.k2) ** s).sum()
    return float(np.sqrt(f.grid.volume * total))


def lp_norm(f: SpectralField, p: float) -> float:
    """L^p norm of the pointwise Euclidean magnitude, p in {1, 2, inf}."""
    if p == 2:
        return float(np.sqrt(f.grid.volume * (np.abs(f.coeffs) ** 2).sum()))
    if p not in (1, np.inf):
        raise ValueError(f"unsupported exponent p={p}; use 1, 2 or inf")
    x = inverse_transform(f)
    mag = np.abs(x[0]) if f.ncomp == 1 else np.sqrt((x**2).sum(axis=0))
    if p == 1:
        return float(mag.sum() * f.grid.cell_volume)
    return float(mag.max())


def leray_project(f: SpectralField) -> SpectralField:
    """Helmholtz-Leray projection onto divergence-free fields.

    Uses the derivative wavenumbers so that ``divergence(leray_project(f))``
    vanishes to roundoff; the mean mode passes through unchanged.
    """
    grid = f.grid
    if f.ncomp != grid.dim:
        raise ValueError(f"leray_project needs a vector field (ncomp={grid.dim}), got {f.ncomp}")
    kd = grid.deriv_wavenumbers
    kk = sum(k**2 for k in kd)
    inv = np.divide(1.0, kk, out=np.zeros(grid.shape), where=kk > 0)
    kdotf = sum(k * c for k, c in zip(kd, f.coeffs)) * inv
    return SpectralField(grid, np.stack([c - k * kdotf for k, c in zip(kd, f.coeffs)]))


def heat_multiplier(f: SpectralField, t: float) -> SpectralField:
    """Apply the heat semigroup e^{t Delta}: coefficients times exp(-|k|^2 t)."""
    if t < 0:
        raise ValueError(f"heat semigroup needs t >= 0, got {t}")
    if t == 0:
        return f.copy()
    return SpectralField(f.grid, np.exp(-f.grid.k2 * t) * f.coeffs)


def dealias(f: SpectralField) -> SpectralField:
    """Two-thirds rule: drop every mode with some |wrap(m)| > M/3."""
    return SpectralField(f.grid, f.coeffs * f.grid.dealias_mask)


def product(a: np.ndarray, grid: Grid, dealiased: bool = True) -> SpectralField:
    """Transform pointwise real data (e.g. a product) back, optionally dealiased."""
    out = forward_transform(a, grid)
    return dealias(out) if dealiased else out
