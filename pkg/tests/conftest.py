"""Shared fixtures.

Every ``SpectralDecomposition`` created anywhere in the suite is recorded and
checked for bi-orthonormality when its test finishes.
"""

import numpy as np
import pytest

from diffmap import spectral
from diffmap.kernel_graph import AffinityGraph, KernelConfig, PointCloud, markov_from_cloud, normalize_markov

BIORTH_TOL = 1e-10

_created = []
_suite = {"count": 0, "worst": 0.0}
ACCEPTANCE_LINES = []
_original_post_init = spectral.SpectralDecomposition.__post_init__


def _recording_post_init(self):
    _original_post_init(self)
    _created.append(self)


spectral.SpectralDecomposition.__post_init__ = _recording_post_init


@pytest.fixture(autouse=True)
def _check_biorthonormality():
    _created.clear()
    yield
    worst = max((d.biorthogonality_error() for d in _created), default=0.0)
    _suite["count"] += len(_created)
    _suite["worst"] = max(_suite["worst"], worst)
    _created.clear()
    assert worst < BIORTH_TOL, f"decomposition with bi-orthonormality error {worst:.2e}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    if _suite["count"]:
        terminalreporter.write_line(
            f"bi-orthonormality over the whole suite: {_suite['count']} decompositions, "
            f"worst error {_suite['worst']:.2e} (limit {BIORTH_TOL:.0e})"
        )


def two_point_markov(a):
    """Markov matrix of the affinity [[1, a], [a, 1]]."""
    L = np.array([[1.0, a], [a, 1.0]])
    return normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1)))


def two_point_cloud(a, epsilon=1.0):
    """Two points whose Gaussian affinity at scale ``epsilon`` equals ``a``."""
    d = np.sqrt(-2.0 * epsilon * np.log(a))
    return PointCloud(points=np.array([[0.0, 0.0], [d, 0.0]]))


def random_cloud(seed, n=50, p=2, scale=1.0):
    rng = np.random.default_rng(seed)
    return PointCloud(points=scale * rng.standard_normal((n, p)))


def median_markov(cloud):
    from diffmap.kernel_graph import select_epsilon

    return markov_from_cloud(cloud, KernelConfig(epsilon=select_epsilon(cloud)))


@pytest.fixture
def cloud50():
    return random_cloud(0, n=50, p=2)


@pytest.fixture
def decomp50(cloud50):
    return spectral.decompose(median_markov(cloud50))
