"""
The continuum limit
===================

As the kernel scale shrinks, ``(lambda_j - 1) / eps`` approaches the
eigenvalues of a backward Fokker-Planck generator, up to a fixed constant
set by the kernel normalization. Compare a graph built from uniform samples
on [0, 1] with the finite-difference generator, then look at a double well.
"""

import numpy as np

from diffmap import DatasetSpec, KernelConfig, PotentialGrid, compare_spectra, decompose, discretize_fp, fp_eigenpairs
from diffmap import generate, markov_from_cloud, select_epsilon
from diffmap.fokker_planck import const, double_well

fp = fp_eigenpairs(discretize_fp(PotentialGrid.from_potential(const(), [(0.0, 1.0, 400)])), 4)
print("generator, flat potential:", np.round(fp.eigenvalues, 3))
print("  analytic -(j pi)^2:      ", np.round(-((np.arange(4) * np.pi) ** 2), 3))

cloud = generate(DatasetSpec.boltzmann1d("const", (0, 1), 2000, seed=0))
eps = 0.05 * select_epsilon(cloud)
decomp = decompose(markov_from_cloud(cloud, KernelConfig(epsilon=eps)), 4)
cmp = compare_spectra(decomp, eps, fp, 3)
print("graph rates:", np.round(cmp.graph_rates, 3))
print("ratio per mode:", np.round(cmp.ratios, 3), f"(fitted constant {cmp.fitted_constant:.3f})")

# double well: two slow modes, then a wide gap
pot = double_well(2.0, 1.0)
fp2 = fp_eigenpairs(discretize_fp(PotentialGrid.from_potential(pot, [(-2, 2, 800)])), 4)
print("generator, double well:", np.round(fp2.eigenvalues, 4))
x = np.array([-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
print("slow eigenfunction:", np.round(fp2.evaluate(1, x), 3))
