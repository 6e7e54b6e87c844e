"""Picard iteration of the Duhamel map: contraction for small data, failure for large data."""
import numpy as np

from nematiclab import EtaVector, Grid, NonContraction, PicardConfig, picard_solve, small_data_family

grid = Grid(3, 16)
eta = EtaVector(np.array([0.0, 0.0, 1.0]))

u0, d0 = small_data_family(0.1, 7, grid, eta)
for T in (0.2, 0.1, 0.05):
    traj, report = picard_solve(u0, d0, eta, PicardConfig(T=T, tol=1e-14))
    print(f"T={T:<5} iterations {report.iterations:2d}  last ratio {report.last_ratio:.3e}  converged {report.converged}")

# large data on a long horizon: the successive differences grow
u0, d0 = small_data_family(5000.0, 0, grid, eta)
try:
    picard_solve(u0, d0, eta, PicardConfig(T=1.0, n_time=21))
except NonContraction as exc:
    print("large data:", exc)
    print("ratios:", ", ".join(f"{r:.2f}" for r in exc.report.ratios))
