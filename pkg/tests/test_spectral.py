import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import median_markov, random_cloud, two_point_markov
from diffmap.errors import DiffmapError, NegativeEigenvalueError, ReducibleGraphError, TruncationWarning
from diffmap.kernel_graph import AffinityGraph, KernelConfig, PointCloud, markov_from_cloud, normalize_markov
from diffmap.spectral import (
    decompose,
    eigenvalue_powers,
    stationary_distribution,
    transition_probability,
)


def test_two_point_spectrum():
    d = decompose(two_point_markov(0.5))
    np.testing.assert_allclose(d.eigenvalues, [1.0, 1.0 / 3.0], rtol=1e-14)
    psi1 = d.right_vectors[:, 1]
    assert psi1[0] == pytest.approx(-psi1[1], rel=1e-14)
    np.testing.assert_allclose(d.right_vectors[:, 0], 1.0, rtol=1e-14)


def test_rank_one_chain():
    L = np.ones((3, 3))
    d = decompose(normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1))))
    np.testing.assert_allclose(d.eigenvalues, [1, 0, 0], atol=1e-14)
    np.testing.assert_allclose(d.right_vectors[:, 0], 1.0, rtol=1e-14)


def test_biorthonormal_against_dense_oracle(decomp50):
    assert decomp50.biorthogonality_error() < 1e-10
    # independent oracle: eigenvalues of the nonsymmetric matrix itself
    ev = np.sort(np.linalg.eigvals(np.asarray(decomp50.markov.M)).real)[::-1]
    np.testing.assert_allclose(decomp50.eigenvalues, ev, atol=1e-12)
    M = np.asarray(decomp50.markov.M)
    lam = decomp50.eigenvalues
    np.testing.assert_allclose(M @ decomp50.right_vectors, decomp50.right_vectors * lam, atol=1e-11)
    np.testing.assert_allclose(decomp50.left_vectors.T @ M, (decomp50.left_vectors * lam).T, atol=1e-11)


def test_sign_convention(decomp50):
    psi = decomp50.right_vectors
    idx = np.argmax(np.abs(psi), axis=0)
    assert np.all(psi[idx, np.arange(psi.shape[1])] > 0)


def test_partial_decomposition_matches_full(cloud50):
    mk = median_markov(cloud50)
    full, part = decompose(mk), decompose(mk, 6)
    assert part.m == 6 and not part.is_full
    np.testing.assert_allclose(part.eigenvalues, full.eigenvalues[:6], atol=1e-13)
    np.testing.assert_allclose(part.right_vectors, full.right_vectors[:, :6], atol=1e-9)


def test_disconnected_graph_is_reducible():
    pts = np.array([[0.0], [0.1], [100.0], [100.1]])
    mk = markov_from_cloud(PointCloud(points=pts), KernelConfig(epsilon=0.01))
    with pytest.raises(ReducibleGraphError):
        decompose(mk)


def test_bad_pair_count():
    with pytest.raises(DiffmapError):
        decompose(two_point_markov(0.5), 3)


# --- stationary distribution -------------------------------------------------


def test_uniform_stationary():
    L = np.ones((4, 4))
    d = decompose(normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1))))
    np.testing.assert_allclose(stationary_distribution(d), 0.25, rtol=1e-14)


def test_symmetric_pair_stationary():
    d = decompose(two_point_markov(0.5))
    np.testing.assert_allclose(stationary_distribution(d), [0.5, 0.5], rtol=1e-14)


def test_stationary_matches_degrees():
    rng = np.random.default_rng(11)
    pts = np.vstack([rng.standard_normal((40, 2)) * 0.2, rng.standard_normal((15, 2)) + 2])
    mk = markov_from_cloud(PointCloud(points=pts), KernelConfig(epsilon=0.5))
    pi = stationary_distribution(decompose(mk))
    oracle = mk.degrees / mk.degrees.sum()
    assert np.max(np.abs(pi - oracle)) < 1e-12
    assert np.max(np.abs(pi @ np.asarray(mk.M) - pi)) < 1e-10


# --- transition probabilities ------------------------------------------------


def test_zero_steps_is_unit_vector(decomp50):
    p = transition_probability(decomp50, 7, 0)
    e = np.zeros(50)
    e[7] = 1.0
    assert np.array_equal(p, e)


@pytest.mark.parametrize("steps", [1, 2, 5, 17])
def test_matches_matrix_power(decomp50, steps):
    M = np.asarray(decomp50.markov.M)
    P = np.eye(50)
    for _ in range(steps):
        P = P @ M
    for i in (0, 13, 49):
        np.testing.assert_allclose(transition_probability(decomp50, i, steps), P[i], atol=1e-10)


def test_long_time_limit():
    cloud = random_cloud(9, n=40, p=2)
    mk = markov_from_cloud(cloud, KernelConfig(epsilon=0.3))
    d = decompose(mk)
    assert d.eigenvalues[1] <= 0.9
    pi = stationary_distribution(d)
    for i in range(0, 40, 7):
        assert np.max(np.abs(transition_probability(d, i, 10_000) - pi)) < 1e-8


def test_truncated_reconstruction_warns(cloud50):
    d = decompose(median_markov(cloud50), 5)
    with pytest.warns(TruncationWarning):
        p = transition_probability(d, 0, 3)
    assert p.sum() == pytest.approx(1.0, abs=1e-10)


def test_full_reconstruction_does_not_warn(decomp50):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transition_probability(decomp50, 0, 3)


# --- eigenvalue powers ---------------------------------------------------------


def test_integer_powers_allow_negative_eigenvalues():
    np.testing.assert_allclose(eigenvalue_powers([1.0, -0.5], 3), [1.0, -0.125])
    np.testing.assert_allclose(eigenvalue_powers([1.0, -0.5], 2.0), [1.0, 0.25])


def test_fractional_power_rejects_negative():
    with pytest.raises(NegativeEigenvalueError):
        eigenvalue_powers([1.0, -0.5], 0.5)
    np.testing.assert_allclose(eigenvalue_powers([1.0, 0.25], 0.5), [1.0, 0.5])


def test_negative_time_rejected():
    with pytest.raises(DiffmapError):
        eigenvalue_powers([1.0], -1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(3, 30), st.integers(1, 4))
def test_decomposition_properties(seed, n, p):
    rng = np.random.default_rng(seed)
    cloud = PointCloud(points=rng.standard_normal((n, p)))
    # scale by the diameter so every affinity is at least exp(-1/2) and the chain is connected
    eps = np.max(np.sum((cloud.points[:, None] - cloud.points[None]) ** 2, axis=-1))
    d = decompose(markov_from_cloud(cloud, KernelConfig(epsilon=eps)))
    assert d.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(d.eigenvalues[1:] < 1.0)
    assert np.all(np.diff(d.eigenvalues) <= 1e-15)
    assert d.biorthogonality_error() < 1e-10


def test_sign_anchor_breaks_near_ties_at_lowest_index():
    from diffmap.spectral import sign_anchor

    v = np.array([[-1.0 + 1e-12, 0.5], [0.2, -2.0], [1.0, 2.0 - 1e-13]])
    assert sign_anchor(v).tolist() == [0, 1]


def test_lanczos_path_matches_dense(cloud50, monkeypatch):
    from diffmap import spectral

    mk = median_markov(cloud50)
    dense = decompose(mk, 6)
    monkeypatch.setattr(spectral, "DENSE_LIMIT", 10)
    sparse = decompose(mk, 6)
    np.testing.assert_allclose(sparse.eigenvalues, dense.eigenvalues, atol=1e-10)
    np.testing.assert_allclose(sparse.right_vectors, dense.right_vectors, atol=1e-7)
