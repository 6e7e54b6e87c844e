"""First-order time integrators for the (u, d) system on the torus.

Both schemes evaluate the nonlinearity explicitly at the old state and treat
the Laplacian in Fourier space:

* ``imex_euler``:                x_new = (x + dt f) / (1 + dt |k|^2)
* ``integrating_factor_euler``:  x_new = e^{-|k|^2 dt} (x + dt f)

The velocity is Leray-projected after every step.  The director is never
renormalized, so drift of |eta + d| away from 1 measures solver quality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .initial_data import DirectorData, EtaVector, FlowData
from .nonlinearity import RhsPair, assemble_rhs, pressure_recover
from .spectral import SpectralField, leray_project
from .state import SimState, Trajectory

__all__ = ["StepConfig", "Blowup", "step", "integrate", "SCHEMES"]

SCHEMES = ("imex_euler", "integrating_factor_euler")


class Blowup(FloatingPointError):
    """Non-finite coefficients appeared; ``time`` is the offending time and
    ``trajectory`` (set by :func:`integrate`) holds the snapshots taken so far."""

    def __init__(self, time, trajectory=None):
        super().__init__(f"non-finite coefficients at t={time:g}")
        self.time = time
        self.trajectory = trajectory


@dataclass(frozen=True)
class StepConfig:
    dt: float
    t_end: float
    snapshot_every: int = 1
    scheme: str = "imex_euler"
    dealias: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError(f"t_end must be >= dt, got t_end={self.t_end}, dt={self.dt}")
        if self.snapshot_every < 1:
            raise ValueError(f"snapshot_every must be >= 1, got {self.snapshot_every}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def _linear_factor(k2: np.ndarray, dt: float, scheme: str) -> np.ndarray:
    if scheme == "imex_euler":
        return 1.0 / (1.0 + dt * k2)
    return np.exp(-k2 * dt)


def step(state: SimState, eta: EtaVector, cfg: StepConfig, rhs=None) -> SimState:
    """Advance one step of size ``cfg.dt``.

    ``rhs`` optionally replaces :func:`assemble_rhs` (signature
    ``rhs(u, d, eta) -> RhsPair``), e.g. to switch the nonlinearity off.
    """
    grid = state.grid
    if rhs is None:
        f = assemble_rhs(state.u, state.d, eta, cfg.dealias)
    else:
        f = rhs(state.u, state.d, eta)
    lin = _linear_factor(grid.k2, cfg.dt, cfg.scheme)
    u = leray_project(SpectralField(grid, lin * (state.u.coeffs + cfg.dt * f.f_u.coeffs)))
    d = SpectralField(grid, lin * (state.d.coeffs + cfg.dt * f.f_d.coeffs))
    t = state.t + cfg.dt
    if not (np.isfinite(u.coeffs).all() and np.isfinite(d.coeffs).all()):
        raise Blowup(t)
    return SimState(u, d, t)


def zero_rhs(u: SpectralField, d: SpectralField, eta: EtaVector) -> RhsPair:
    return RhsPair(SpectralField.zeros(u.grid, u.ncomp), SpectralField.zeros(d.grid, d.ncomp))


def integrate(u0: FlowData, d0: DirectorData, eta: EtaVector, cfg: StepConfig, s: float = 0.6,
              observer=None, rhs=None, pressure: bool = True) -> Trajectory:
    """Run :func:`step` to ``t_end``, keeping every ``snapshot_every``-th state.

    ``observer(state)`` is called on every state, including the initial one,
    which allows per-step diagnostics without storing snapshots.  Pressures
    at snapshot times are attached when ``pressure`` is true.
    """
    state = SimState(u0.u0, d0.d0, 0.0)
    snaps = [state]
    if observer is not None:
        observer(state)
    n = cfg.n_steps
    for i in range(1, n + 1):
        try:
            state = step(state, eta, cfg, rhs)
        except Blowup as exc:
            exc.trajectory = _finish(snaps, s, cfg, pressure)
            raise
        # exact multiple of dt avoids accumulated drift in t
        state = SimState(state.u, state.d, i * cfg.dt)
        if observer is not None:
            observer(state)
        if i % cfg.snapshot_every == 0:
            snaps.append(state)
    return _finish(snaps, s, cfg, pressure)


def _finish(snaps, s, cfg, pressure) -> Trajectory:
    traj = Trajectory(snaps, s=s, meta=dict(dt=cfg.dt, scheme=cfg.scheme, dealias=cfg.dealias))
    if pressure:
        traj.pressures = [pressure_recover(st.u, st.d, cfg.dealias) for st in snaps]
    return traj
