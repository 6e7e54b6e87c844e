"""Global decay diagnostics on finished trajectories."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .mild import xst_norm
from .semigroup import DecaySeries, TorusWindowWarning, decay_fit, derivative_sup
from .spectral import gradient, lp_norm
from .state import Trajectory

__all__ = ["WeightedNormReport", "DecayExponents", "weighted_alpha", "weighted_norm", "decay_exponents", "energy_series"]


@dataclass(frozen=True)
class WeightedNormReport:
    """Parts of the time-weighted norm

        |w|_{X^s} + sup_{t<=2} t^alpha |w|_{W^{k,inf}} + sum_j sup_{t>=1} t^{N/2+j/2} |grad^j w|_inf.
    """

    s: float
    k: int
    alpha: float
    early_sup: float
    late_sups: tuple
    base_norm: float

    @property
    def total(self) -> float:
        return self.base_norm + self.early_sup + float(sum(self.late_sups))


def weighted_alpha(N: int, s: float, k: int) -> float:
    """alpha_{s,k} = max(0, (N - 2 (s - k)) / 4)."""
    return max(0.0, (N - 2.0 * (s - k)) / 4.0)


def weighted_norm(traj, s: float, k: int, field: str = "u") -> WeightedNormReport:
    """Evaluate the weighted norm on the snapshots of ``traj``.

    Parameters
    ----------
    traj : Trajectory or FieldSeries
    s, k : regularity and derivative order; requires s - k > N/2 - 1.
    field : ``"u"`` or ``"d"`` when ``traj`` is a Trajectory.
    """
    series = traj.series(field) if isinstance(traj, Trajectory) else traj
    if len(series) == 0:
        raise ValueError("empty trajectory")
    N = series.grid.dim
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if not s - k > N / 2 - 1:
        raise ValueError(f"weighted norm needs s - k > N/2 - 1 = {N / 2 - 1:g}; got s={s}, k={k}")
    alpha = weighted_alpha(N, s, k)
    early, late = 0.0, [0.0] * (k + 2)
    for t, f in zip(series.times, series.fields):
        sups = []
        g = f
        for j in range(k + 2):
            if j:
                g = gradient(g)
            sups.append(derivative_sup(g, 0))
        if t <= 2:
            weight = t**alpha if alpha > 0 else 1.0
            early = max(early, weight * sum(sups[: k + 1]))
        if t >= 1:
            for j in range(k + 2):
                late[j] = max(late[j], t ** (N / 2 + j / 2) * sups[j])
    return WeightedNormReport(s, k, alpha, float(early), tuple(float(v) for v in late), xst_norm(series, s))


@dataclass(frozen=True)
class DecayExponents:
    """Fitted slopes of |grad^j u|_inf and |grad^j d|_inf, j = 0, 1.

    ``fits`` and ``targets`` are keyed ``"u0", "u1", "d0", "d1"``; targets are
    the whole-space rates -N/2 - j/2.
    """

    window: tuple
    fits: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)

    def deviation(self, key: str) -> float:
        return self.fits[key].slope - self.targets[key]


def _clip_window(window, traj: Trajectory) -> tuple[float, float]:
    lo, hi = window
    if lo >= hi:
        raise ValueError(f"empty window [{lo:g}, {hi:g}]")
    valid = traj.grid.validity_time
    clo, chi = max(lo, 1.0), min(hi, valid)
    if (clo, chi) != (lo, hi):
        warnings.warn(
            f"decay window [{lo:g}, {hi:g}] clipped to [{clo:g}, {chi:g}] (torus validity range [1, L^2/16])",
            TorusWindowWarning,
            stacklevel=3,
        )
    if clo >= chi:
        raise ValueError(f"window [{lo:g}, {hi:g}] does not meet the validity range [1, {valid:g}]")
    return clo, chi


def decay_exponents(traj: Trajectory, window=None) -> DecayExponents:
    """Log-log slopes of the sup norms of u, d and their gradients inside ``window``.

    The window (default: the whole trajectory) is clipped to [1, L^2/16] with
    a :class:`TorusWindowWarning`; fewer than 5 snapshots inside is an error.
    """
    times = traj.times
    window = (times[0], times[-1]) if window is None else window
    lo, hi = _clip_window(window, traj)
    sel = [i for i, t in enumerate(times) if lo * (1 - 1e-12) <= t <= hi * (1 + 1e-12)]
    if len(sel) < 5:
        raise ValueError(f"need at least 5 snapshots inside [{lo:g}, {hi:g}], found {len(sel)}")
    N = traj.grid.dim
    out, targets = {}, {}
    for name in ("u", "d"):
        for j in (0, 1):
            norms = np.array([derivative_sup(getattr(traj.states[i], name), j) for i in sel])
            if np.any(norms <= 0):
                raise ValueError(f"|grad^{j} {name}|_inf vanishes inside the window; nothing to fit")
            series = DecaySeries(times[sel], norms, dict(validity_time=traj.grid.validity_time))
            out[f"{name}{j}"] = decay_fit(series, (lo, hi))
            targets[f"{name}{j}"] = -N / 2 - j / 2
    return DecayExponents((lo, hi), out, targets)


def energy_series(traj: Trajectory) -> np.ndarray:
    """E(t_n) = 1/2 |u|_{L^2}^2 + 1/2 |grad d|_{L^2}^2 for every snapshot."""
    return np.array([0.5 * lp_norm(st.u, 2) ** 2 + 0.5 * lp_norm(gradient(st.d), 2) ** 2 for st in traj.states])
