"""
Clusters made by geometry alone
===============================

Uniform points in two boxes joined by a narrow channel. There is no
potential, only a bottleneck, yet the walk still sees two containers. The
slow rate of the matching generator shrinks roughly in proportion to the
channel width.
"""

import numpy as np

from diffmap import DatasetSpec, KernelConfig, cluster, decompose, detect_gap, diffusion_map, discretize_fp
from diffmap import fp_eigenpairs, generate, markov_from_cloud, permutation_accuracy, select_epsilon
from diffmap.fokker_planck import dumbbell_grid
from diffmap.geometry import Dumbbell

spec = DatasetSpec.dumbbell2d(box_size=1.0, channel_width=0.1, channel_length=0.5, count=1500, seed=0)
cloud = generate(spec)
decomp = decompose(markov_from_cloud(cloud, KernelConfig(epsilon=select_epsilon(cloud))), 11)
gap = detect_gap(decomp.eigenvalues)
labels = cluster(diffusion_map(decomp, 1, gap.k - 1), gap.k, seed=0).labels
print("eigenvalues:", np.round(decomp.eigenvalues[:5], 4))
print(f"k = {gap.k}, container accuracy {permutation_accuracy(labels, cloud.labels):.3f}")

for a in (0.4, 0.2, 0.1, 0.05):
    mu = fp_eigenpairs(discretize_fp(dumbbell_grid(Dumbbell(1.0, a, 0.5), 0.0125)), 2).eigenvalues
    print(f"channel width {a:.2f}: |mu_1| = {abs(mu[1]):.4f}, |mu_1| / a = {abs(mu[1]) / a:.3f}")
