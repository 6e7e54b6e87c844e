"""Long small-data run of localized data and its fitted decay rates.

A reduced version of the full check (L = 8 pi, M = 32 instead of 16 pi, 64),
which finishes in about a minute; the rates are correspondingly rougher.
"""
import warnings

import numpy as np

from nematiclab import EtaVector, Grid, StepConfig, decay_exponents, energy_series, integrate, make_scenario

grid = Grid(3, 32, 8 * np.pi)
eta = EtaVector(np.array([0.0, 0.0, 1.0]))
u0, d0 = make_scenario("localized_bump", grid, eta, 1e-2)
traj = integrate(u0, d0, eta, StepConfig(0.05, grid.validity_time, snapshot_every=10), pressure=False)

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    result = decay_exponents(traj, (1.0, grid.validity_time))
for key, fit in result.fits.items():
    print(f"{key}: slope {fit.slope:+.3f} target {result.targets[key]:+.3f}")
e = energy_series(traj)
print(f"energy {e[0]:.3e} -> {e[-1]:.3e}")
