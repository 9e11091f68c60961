"""Diffusion maps, spectral clustering and a Fokker-Planck/Langevin oracle."""

from .clustering import ClusterResult, GapReport, cluster, detect_gap, permutation_accuracy
from .datasets import DatasetSpec, generate, load_csv, save_csv
from .diffusion import (
    DiffusionMap,
    TruncatedKernel,
    diffusion_distance,
    diffusion_distance_matrix,
    diffusion_map,
    truncated_kernel,
    truncation_error_ratio,
)
from .errors import DiffmapError
from .fokker_planck import (
    FPOperator,
    PotentialGrid,
    SpectrumComparison,
    compare_spectra,
    discretize_fp,
    fp_eigenpairs,
)
from .kernel_graph import (
    AffinityGraph,
    KernelConfig,
    MarkovMatrix,
    PointCloud,
    build_affinity,
    markov_from_cloud,
    normalize_markov,
    select_epsilon,
)
from .langevin import Box, ExitTimeEstimate, LangevinConfig, mean_exit_time, simulate
from .spectral import (
    SpectralDecomposition,
    decompose,
    stationary_distribution,
    transition_probability,
)

__version__ = "0.1.0"
