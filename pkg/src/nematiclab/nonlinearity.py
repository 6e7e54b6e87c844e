"""Pseudospectral right-hand sides of the projected Ericksen-Leslie system.

Products are formed on the grid and transformed back; with ``dealiased=True``
(the default) the result is truncated by the two-thirds rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .initial_data import EtaVector
from .spectral import (
    SpectralField,
    forward_transform,
    gradient,
    inverse_transform,
    leray_project,
    product,
)

__all__ = [
    "RhsPair",
    "convective",
    "ericksen_stress_div",
    "stress_div_alternate",
    "director_reaction",
    "assemble_rhs",
    "pressure_recover",
    "constraint_source",
]


@dataclass(frozen=True, eq=False)
class RhsPair:
    f_u: SpectralField
    f_d: SpectralField


def _same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError("fields live on different grids")


def _real_gradient(w: SpectralField) -> np.ndarray:
    """Grid values of d_i w_c, shape ``(dim, ncomp, M, ..., M)``."""
    n = w.grid.dim
    return inverse_transform(gradient(w)).reshape((n, w.ncomp) + w.grid.shape)


def _transport(u_x: np.ndarray, grad_w: np.ndarray) -> np.ndarray:
    # (u . grad) w_c = sum_i u_i d_i w_c
    return np.einsum("i...,ic...->c...", u_x, grad_w)


def convective(u: SpectralField, w: SpectralField, dealiased: bool = True) -> SpectralField:
    """(u . grad) w for a velocity ``u`` and any field ``w``."""
    _same_grid(u, w)
    if u.ncomp != u.grid.dim:
        raise ValueError("transport velocity needs ncomp == dim")
    return product(_transport(inverse_transform(u), _real_gradient(w)), u.grid, dealiased)


def _stress_div_from_gradient(grad_d: np.ndarray, grid, dealiased: bool) -> SpectralField:
    n = grid.dim
    kd = grid.deriv_wavenumbers
    # T_ij = d_i d . d_j d, symmetric
    out = np.zeros((n,) + grid.shape, dtype=complex)
    for i in range(n):
        for j in range(i, n):
            t_ij = product((grad_d[i] * grad_d[j]).sum(axis=0), grid, dealiased).coeffs[0]
            out[j] += 1j * kd[i] * t_ij
            if j != i:
                out[i] += 1j * kd[j] * t_ij
    return SpectralField(grid, out)


def ericksen_stress_div(d: SpectralField, dealiased: bool = True) -> SpectralField:
    """Div(grad d (.) grad d): component j is sum_i d_i (d_i d . d_j d)."""
    if d.ncomp != d.grid.dim:
        raise ValueError("director deviation needs ncomp == dim")
    return _stress_div_from_gradient(_real_gradient(d), d.grid, dealiased)


def stress_div_alternate(d: SpectralField, dealiased: bool = True) -> SpectralField:
    """Delta d . grad d, which differs from the stress divergence by a gradient."""
    grid = d.grid
    grad_d = _real_gradient(d)
    lap = inverse_transform(SpectralField(grid, -grid.k2 * d.coeffs))
    return product(np.einsum("c...,ic...->i...", lap, grad_d), grid, dealiased)


def director_reaction(d: SpectralField, eta: EtaVector, dealiased: bool = True) -> SpectralField:
    """|grad d|^2 (eta + d)."""
    if d.ncomp != eta.dim:
        raise ValueError("director deviation needs ncomp == len(eta)")
    grad_d = _real_gradient(d)
    energy = (grad_d**2).sum(axis=(0, 1))
    return product(energy * (inverse_transform(d) + eta.column()), d.grid, dealiased)


def assemble_rhs(u: SpectralField, d: SpectralField, eta: EtaVector, dealiased: bool = True) -> RhsPair:
    """Right sides of the (u, d) system.

    ``f_u = -P[(u.grad)u + Div(grad d (.) grad d)]`` and
    ``f_d = -(u.grad)d + |grad d|^2 (eta + d)``.
    """
    _same_grid(u, d)
    grid = u.grid
    u_x = inverse_transform(u)
    d_x = inverse_transform(d)
    grad_u = _real_gradient(u)
    grad_d = _real_gradient(d)
    adv_u = product(_transport(u_x, grad_u), grid, dealiased)
    stress = _stress_div_from_gradient(grad_d, grid, dealiased)
    f_u = -leray_project(adv_u + stress)
    reaction = (grad_d**2).sum(axis=(0, 1)) * (d_x + eta.column())
    f_d = product(reaction - _transport(u_x, grad_d), grid, dealiased)
    return RhsPair(f_u, f_d)


def pressure_recover(u: SpectralField, d: SpectralField, dealiased: bool = True) -> SpectralField:
    """Zero-mean pressure with grad p = -(1 - P) g, g = (u.grad)u + Div(grad d (.) grad d)."""
    grid = u.grid
    g = convective(u, u, dealiased) + ericksen_stress_div(d, dealiased)
    kd = grid.deriv_wavenumbers
    kk = sum(k**2 for k in kd)
    kdotg = sum(k * c for k, c in zip(kd, g.coeffs))
    p = 1j * np.divide(kdotg, kk, out=np.zeros(grid.shape, dtype=complex), where=kk > 0)
    return SpectralField(grid, p[None])


def constraint_source(u: SpectralField, d: SpectralField, eta: EtaVector, dealiased: bool = True) -> np.ndarray:
    """Grid values of (d_t - Delta)(|eta + d|^2 - 1) implied by the director equation.

    Equals ``-u.grad(phi) + 2 |grad d|^2 phi``, so it vanishes where the
    director is exactly sphere valued.
    """
    rhs = assemble_rhs(u, d, eta, dealiased)
    v = inverse_transform(d) + eta.column()
    grad_d = _real_gradient(d)
    return 2 * (v * inverse_transform(rhs.f_d)).sum(axis=0) - 2 * (grad_d**2).sum(axis=(0, 1))
