import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import median_markov
from diffmap.clustering import canonical_labels, cluster, detect_gap, kmeans, permutation_accuracy
from diffmap.datasets import DatasetSpec, generate
from diffmap.diffusion import diffusion_map
from diffmap.errors import DegenerateClusterError, DiffmapError, InsufficientSpectrumError
from diffmap.spectral import decompose


@pytest.fixture(scope="module")
def two_gaussians():
    spec = DatasetSpec.gaussians([((-1, 0), 0.25, 200), ((1, 0), 0.25, 200)], seed=0)
    cloud = generate(spec)
    return cloud, decompose(median_markov(cloud), 11)


# --- gap detection ------------------------------------------------------------------


def test_gap_after_two():
    g = detect_gap([1, 0.99, 0.30, 0.25])
    assert g.k == 2
    assert g.gap_ratio == pytest.approx(0.30 / 0.99, rel=1e-14)
    assert g.gap_ratio == pytest.approx(0.303, abs=5e-4)


def test_geometric_decay_ties_to_smallest():
    g = detect_gap([1, 0.5, 0.25, 0.125])
    assert g.k == 1
    np.testing.assert_allclose(g.ratios, 0.5)


def test_nonpositive_eigenvalue_is_complete_drop():
    g = detect_gap([1, 0.9, 0.8, -0.1, -0.2])
    assert g.k == 3 and g.gap_ratio == 0.0
    assert g.ratios.size == 3
    g = detect_gap([1, 0.9, 0.0, 0.0])
    assert g.k == 2 and g.ratios.size == 2


def test_max_k_limits_scan():
    lam = [1, 0.95, 0.9, 0.85, 0.1]
    assert detect_gap(lam, max_k=10).k == 4
    assert detect_gap(lam, max_k=2).k == 2  # 0.9/0.95 < 0.95


def test_gap_input_checks():
    with pytest.raises(InsufficientSpectrumError):
        detect_gap([1, 0.5])
    with pytest.raises(DiffmapError):
        detect_gap([1, 0.2, 0.5])
    with pytest.raises(DiffmapError):
        detect_gap([1, 0.5, 0.2], max_k=0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=15), st.floats(0.5, 5.0))
def test_gap_invariant_under_time_powers(tail, t):
    lam = np.concatenate([[1.0], np.sort(tail)[::-1]])
    g1 = detect_gap(lam)
    gt = detect_gap(lam**t)
    # ratios map as r -> r**t, a monotone map, so the argmin is preserved up to ties
    best = np.flatnonzero(np.isclose(g1.ratios, g1.ratios.min(), rtol=1e-9, atol=0)) + 1
    assert gt.k in best


def test_two_gaussians_gap(two_gaussians):
    _, d = two_gaussians
    g = detect_gap(d.eigenvalues)
    assert g.k == 2
    d_dict = g.to_dict()
    assert d_dict["k"] == 2 and len(d_dict["ratios"]) == 10


# --- k-means --------------------------------------------------------------------------


def test_tight_pairs():
    X = np.array([[0.0, 0.0], [1e-9, 0.0], [10.0, 10.0], [10.0, 10.0 + 1e-9]])
    r = kmeans(X, 2, seed=3)
    assert r.labels.tolist() == [0, 0, 1, 1]
    assert r.inertia < 1e-17


def test_too_many_clusters():
    X = np.array([[0.0], [0.0], [1.0]])
    with pytest.raises(DegenerateClusterError):
        kmeans(X, 3)


def test_cluster_needs_two():
    with pytest.raises(DiffmapError):
        cluster(np.zeros((4, 1)), 1)


def test_two_gaussian_accuracy(two_gaussians):
    cloud, d = two_gaussians
    for seed in range(3):
        r = cluster(diffusion_map(d, 1, 1), 2, seed=seed)
        assert permutation_accuracy(r.labels, cloud.labels) >= 0.95


def test_kmeans_deterministic():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((200, 3))
    a, b = kmeans(X, 4, seed=7), kmeans(X, 4, seed=7)
    assert np.array_equal(a.labels, b.labels) and a.inertia == b.inertia


def test_kmeans_is_lloyd_fixed_point():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(c, 0.3, (50, 2)) for c in ((0, 0), (3, 0), (0, 3))])
    r = kmeans(X, 3, seed=0)
    centers = np.array([X[r.labels == c].mean(axis=0) for c in range(3)])
    nearest = np.argmin(((X[:, None] - centers[None]) ** 2).sum(-1), axis=1)
    assert np.array_equal(nearest, r.labels)
    assert r.inertia == pytest.approx(((X - centers[r.labels]) ** 2).sum(), rel=1e-10)


def test_canonical_labels():
    assert canonical_labels([5, 5, 2, 9, 2]).tolist() == [0, 0, 1, 2, 1]


def brute_accuracy(labels, truth):
    ours, theirs = sorted(set(labels)), sorted(set(truth))
    best = 0
    for perm in itertools.permutations(theirs, len(ours)):
        m = dict(zip(ours, perm))
        best = max(best, sum(m[a] == b for a, b in zip(labels, truth)))
    return best / len(labels)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=30))
def test_permutation_accuracy(pairs):
    labels, truth = zip(*pairs)
    if len(set(labels)) > len(set(truth)):
        return
    assert permutation_accuracy(labels, truth) == pytest.approx(brute_accuracy(labels, truth))


def test_accuracy_with_extra_cluster():
    assert permutation_accuracy([0, 1, 2, 2], [0, 0, 1, 1]) == 0.75
