"""
Escaping a well
===============

Simulate overdamped Langevin dynamics in a double well and record when each
trajectory first crosses the saddle. The mean exit time is the inverse of the
slow generator eigenvalue, and the times are close to exponential.
"""

import numpy as np

from diffmap import Box, LangevinConfig, PotentialGrid, discretize_fp, fp_eigenpairs, mean_exit_time
from diffmap.fokker_planck import double_well

D = 0.5
pot = double_well(1.0, 1.0)
config = LangevinConfig(diffusion_D=D, dt=1e-3, seed=0, max_steps=2_000_000, domain=Box((-2.0,), (2.0,)))

est = mean_exit_time(pot, Box((-2.0,), (-0.5,)), Box((0.0,), (2.0,)), config, trials=1000)
print(f"mean exit time {est.mean:.2f} +/- {est.std_error:.2f} from {est.samples} trajectories")
print(f"coefficient of variation {est.cv:.3f} (1 for an exponential law)")
print("quantiles:", {q: round(v, 2) for q, v in est.quantiles.items()})

mu = fp_eigenpairs(discretize_fp(PotentialGrid.from_potential(pot, [(-2, 2, 800)]), D), 3).eigenvalues
print(f"generator: mu_1 = {mu[1]:.5f}, mu_2 = {mu[2]:.3f}")
print(f"mean exit time x |mu_1| = {est.mean * abs(mu[1]):.3f}")

# exponential check against the empirical distribution
t = np.sort(est.times)
emp = np.arange(1, t.size + 1) / t.size
print(f"max gap to 1 - exp(-t / mean): {np.max(np.abs(emp - (1 - np.exp(-t / est.mean)))):.3f}")
