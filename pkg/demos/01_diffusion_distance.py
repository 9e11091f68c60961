"""
Diffusion distances from a random walk
======================================

Build a Gaussian kernel on a small cloud, turn it into a Markov chain and
check that the diffusion distance between two points can be read off either
from the walk itself or from the eigenvectors.
"""

import numpy as np

from diffmap import (
    KernelConfig,
    PointCloud,
    decompose,
    diffusion_distance,
    diffusion_map,
    markov_from_cloud,
    select_epsilon,
)

rng = np.random.default_rng(0)
cloud = PointCloud(points=rng.standard_normal((80, 2)))

# median squared pairwise distance as the kernel scale
eps = select_epsilon(cloud)
markov = markov_from_cloud(cloud, KernelConfig(epsilon=eps))
print(f"epsilon = {eps:.3f}, rows sum to one: {np.allclose(markov.M.sum(axis=1), 1)}")

decomp = decompose(markov)
print("leading eigenvalues:", np.round(decomp.eigenvalues[:6], 4))
print(f"bi-orthonormality error: {decomp.biorthogonality_error():.1e}")

# the same distance two ways
for t in (1, 3):
    direct = diffusion_distance(decomp, 0, 1, t, method="direct")
    spectral = diffusion_distance(decomp, 0, 1, t, method="spectral")
    print(f"t={t}: direct {direct:.10f}  spectral {spectral:.10f}")

# and as plain Euclidean distance between diffusion coordinates
dm = diffusion_map(decomp, t=3, k=decomp.m - 1)
print(f"embedding distance: {np.linalg.norm(dm.coords[0] - dm.coords[1]):.10f}")

# a few coordinates already carry most of it, since lambda_j**t decays fast
for k in (1, 2, 5, 10):
    approx = np.linalg.norm(diffusion_map(decomp, 3, k).coords[0] - diffusion_map(decomp, 3, k).coords[1])
    print(f"  first {k:2d} coordinates: {approx:.6f}")
