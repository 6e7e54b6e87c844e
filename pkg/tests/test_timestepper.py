"""IMEX and integrating-factor steppers."""

import numpy as np
import pytest

from nematiclab.diagnostics import energy_series
from nematiclab.estimates import constraint_residual
from nematiclab.initial_data import DirectorData, FlowData, small_data_family
from nematiclab.mild import semigroup_flow
from nematiclab.nonlinearity import RhsPair
from nematiclab.spectral import SpectralField, divergence, forward_transform, lp_norm, sobolev_norm
from nematiclab.state import SimState
from nematiclab.timestepper import Blowup, StepConfig, integrate, step, zero_rhs


def _zero(grid, eta):
    z = SpectralField.zeros(grid, 3)
    return FlowData(z), DirectorData(z.copy(), eta)


class TestStepConfig:
    @pytest.mark.parametrize("kw", [dict(dt=0.0, t_end=1.0), dict(dt=0.1, t_end=0.05), dict(dt=0.1, t_end=1.0, snapshot_every=0),
                                    dict(dt=0.1, t_end=1.0, scheme="rk4")])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            StepConfig(**kw)

    def test_step_count(self):
        assert StepConfig(1e-3, 0.1).n_steps == 100


class TestStep:
    def test_zero_state_stationary(self, grid16, eta3):
        s = SimState.zeros(grid16)
        out = step(s, eta3, StepConfig(0.1, 0.1))
        assert not np.any(out.u.coeffs) and not np.any(out.d.coeffs)
        assert out.t == pytest.approx(0.1)

    @pytest.mark.parametrize("scheme", ["imex_euler", "integrating_factor_euler"])
    def test_heat_mode_amplification(self, grid16, scheme):
        x = grid16.coordinates()
        k2 = 4.0  # mode cos(2 x_1) on the 2 pi box
        d = forward_transform(np.stack([np.cos(2 * x[0]), 0 * x[0], 0 * x[0]]), grid16)
        u = forward_transform(np.stack([0 * x[0], np.cos(2 * x[0]), 0 * x[0]]), grid16)
        dt = 0.05
        out = step(SimState(u, d), None, StepConfig(dt, dt, scheme=scheme), rhs=zero_rhs)
        factor = 1 / (1 + dt * k2) if scheme == "imex_euler" else np.exp(-k2 * dt)
        assert np.allclose(out.d.coeffs, factor * d.coeffs, atol=1e-16)
        assert np.allclose(out.u.coeffs, factor * u.coeffs, atol=1e-16)

    def test_nan_raises_blowup(self, grid16, eta3):
        def bad(u, d, eta):
            return RhsPair(SpectralField(u.grid, np.full(u.coeffs.shape, np.nan)), d)

        with pytest.raises(Blowup) as info:
            step(SimState.zeros(grid16), eta3, StepConfig(0.1, 0.1), rhs=bad)
        assert info.value.time == pytest.approx(0.1)


class TestIntegrate:
    def test_zero_data(self, grid16, eta3):
        u0, d0 = _zero(grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(0.01, 0.05))
        assert len(traj) == 6
        assert all(not np.any(s.u.coeffs) and not np.any(s.d.coeffs) for s in traj.states)
        assert all(not np.any(p.coeffs) for p in traj.pressures)

    def test_snapshot_cadence(self, grid16, eta3):
        u0, d0 = small_data_family(1e-3, 1, grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(0.01, 0.1, snapshot_every=5))
        assert np.allclose(traj.times, [0.0, 0.05, 0.1])
        assert len(traj.pressures) == 3

    def test_observer_sees_every_step(self, grid16, eta3):
        u0, d0 = small_data_family(1e-3, 1, grid16, eta3)
        seen = []
        integrate(u0, d0, eta3, StepConfig(0.01, 0.1, snapshot_every=10), observer=lambda s: seen.append(s.t), pressure=False)
        assert np.allclose(seen, np.arange(11) * 0.01)

    @pytest.mark.parametrize("scheme", ["imex_euler", "integrating_factor_euler"])
    def test_linear_stability_large_dt(self, grid16, eta3, scheme):
        u0, d0 = small_data_family(1e-1, 4, grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(0.5, 10.0, scheme=scheme), rhs=zero_rhs, pressure=False)
        un = [lp_norm(s.u, 2) for s in traj.states]
        dn = [sobolev_norm(s.d, 1) for s in traj.states]
        assert np.all(np.diff(un) <= 0) and np.all(np.diff(dn) <= 0)

    def test_divergence_free_snapshots(self, grid16, eta3):
        u0, d0 = small_data_family(5e-2, 2, grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(0.01, 0.1))
        for s in traj.states:
            assert lp_norm(divergence(s.u), 2) <= 1e-10 * sobolev_norm(s.u, 1)

    def test_linear_regime_matches_semigroup(self, grid16, eta3):
        eps, T = 1e-6, 0.2
        u0, d0 = small_data_family(eps, 5, grid16, eta3)
        cfg = StepConfig(0.01, T, scheme="integrating_factor_euler")
        traj = integrate(u0, d0, eta3, cfg, pressure=False)
        ref = semigroup_flow(u0, d0, traj.times)
        for a, b in zip(traj.states, ref.states):
            gap = lp_norm(a.u - b.u, 2) + lp_norm(a.d - b.d, 2)
            assert gap <= 10 * eps**2 * max(a.t, cfg.dt)

    def test_first_order_in_dt(self, grid16, eta3):
        u0, d0 = small_data_family(5e-2, 6, grid16, eta3)
        finals = [integrate(u0, d0, eta3, StepConfig(dt, 0.1), pressure=False).states[-1].u for dt in (0.01, 0.005, 0.0025)]
        e1 = lp_norm(finals[0] - finals[1], 2)
        e2 = lp_norm(finals[1] - finals[2], 2)
        assert e1 / e2 == pytest.approx(2.0, abs=0.3)

    def test_energy_dissipation(self, grid16, eta3):
        u0, d0 = small_data_family(1e-2, 7, grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(2e-3, 0.1), pressure=False)
        e = energy_series(traj)
        assert np.all(np.diff(e) <= 1e-8 * e[0])

    def test_blowup_carries_partial_trajectory(self, grid16, eta3):
        u0, d0 = small_data_family(1e-3, 1, grid16, eta3)

        def late_nan(u, d, eta):
            calls.append(1)
            fill = np.nan if len(calls) > 4 else 0.0
            return RhsPair(SpectralField(u.grid, np.full(u.coeffs.shape, fill)), SpectralField.zeros(d.grid, 3))

        calls = []
        with pytest.raises(Blowup) as info:
            integrate(u0, d0, eta3, StepConfig(0.01, 0.1, snapshot_every=2), rhs=late_nan)
        exc = info.value
        assert exc.time == pytest.approx(0.05)
        assert np.allclose(exc.trajectory.times, [0.0, 0.02, 0.04])
        assert len(exc.trajectory.pressures) == 3

    def test_constraint_drift_small(self, grid16, eta3):
        u0, d0 = small_data_family(1e-2, 7, grid16, eta3)
        traj = integrate(u0, d0, eta3, StepConfig(1e-3, 0.05, snapshot_every=10), pressure=False)
        drift = constraint_residual(traj, eta3)
        assert drift[0] <= 1e-12
        assert drift.max() < 1e-6
