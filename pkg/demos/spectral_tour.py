"""Spectral building blocks on the periodic box: transforms, projection, norms."""
import numpy as np

from nematiclab import (Grid, dealias, divergence, forward_transform, inverse_transform,
                        leray_project, lp_norm, sobolev_norm)

grid = Grid(3, 32)
x = grid.coordinates()
print("box", grid.box_len, "points per axis", grid.res, "validity time L^2/16 =", grid.validity_time)

# a velocity with a gradient part and a solenoidal part
vals = np.stack([np.sin(x[0]) + np.cos(x[1]), np.sin(x[1]), np.zeros(grid.shape)])
u = forward_transform(vals, grid)
print("round trip error:", np.abs(inverse_transform(u) - vals).max())
print("|div u|_2 before projection:", lp_norm(divergence(u), 2))

pu = leray_project(u)
print("|div Pu|_2 after projection:", lp_norm(divergence(pu), 2))
print("P is idempotent:", lp_norm(leray_project(pu) - pu, 2))

# fractional Sobolev norms grow with s
for s in (0.0, 0.6, 1.0, 1.6):
    print(f"|u|_H^{s:<3} = {sobolev_norm(u, s):.6f}")

# two-thirds truncation removes the top third of each axis
noise = forward_transform(np.random.default_rng(0).standard_normal((1,) + grid.shape), grid)
kept = np.count_nonzero(dealias(noise).coeffs) / noise.coeffs.size
print(f"fraction of modes kept by dealiasing: {kept:.3f}")
