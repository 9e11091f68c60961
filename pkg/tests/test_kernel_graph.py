import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_cloud
from diffmap.errors import DegenerateDegreeError, DiffmapError, ZeroScaleError
from diffmap.kernel_graph import (
    AffinityGraph,
    KernelConfig,
    PointCloud,
    build_affinity,
    markov_from_cloud,
    normalize_markov,
    select_epsilon,
    squared_distances,
)


def scalar_kernel(x, y, eps):
    return math.exp(-sum((a - b) ** 2 for a, b in zip(x, y)) / (2.0 * eps))


# --- affinity ---------------------------------------------------------------


def test_coincident_points_give_unit_affinity():
    cloud = PointCloud(points=[[0.3, -1.0], [0.3, -1.0]])
    for eps in (1e-3, 1.0, 50.0):
        L = build_affinity(cloud, KernelConfig(epsilon=eps)).L
        assert np.array_equal(L, np.ones((2, 2)))


def test_distance_two_epsilon_gives_exp_minus_one():
    eps = 0.7
    cloud = PointCloud(points=[[0.0], [math.sqrt(2 * eps)]])
    L = build_affinity(cloud, KernelConfig(epsilon=eps)).L
    assert L[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert L[0, 1] == pytest.approx(0.367879, abs=1e-6)


def test_affinity_matches_scalar_oracle():
    cloud = random_cloud(3, n=10, p=2)
    eps = 0.8
    L = build_affinity(cloud, KernelConfig(epsilon=eps)).L
    pts = cloud.points.tolist()
    oracle = np.array([[scalar_kernel(a, b, eps) for b in pts] for a in pts])
    np.testing.assert_allclose(L, oracle, rtol=1e-13, atol=0)


def test_self_tuning_matches_scalar_oracle():
    cloud = random_cloud(4, n=12, p=3)
    k = 3
    L = build_affinity(cloud, KernelConfig(family="self_tuning", self_tuning_k=k)).L
    pts = cloud.points
    dist = np.array([[math.dist(a, b) for b in pts] for a in pts])
    sigma = np.array([sorted(row)[k] for row in dist])
    oracle = np.exp(-(dist**2) / (2 * np.outer(sigma, sigma)))
    np.testing.assert_allclose(L, oracle, rtol=1e-12)


def test_self_tuning_zero_scale_raises():
    pts = np.vstack([np.zeros((8, 2)), [[1.0, 1.0], [2.0, 0.0]]])
    with pytest.raises(ZeroScaleError):
        build_affinity(PointCloud(points=pts), KernelConfig(family="self_tuning", self_tuning_k=3))


def test_sparsify_keeps_symmetry_and_diagonal():
    cloud = random_cloud(5, n=40, p=2)
    g = build_affinity(cloud, KernelConfig(epsilon=0.1, sparsify_tol=0.05))
    assert np.array_equal(g.L, g.L.T)
    assert np.all(np.diag(g.L) == 1.0)
    assert np.all((g.L == 0) | (g.L >= 0.05))
    np.testing.assert_allclose(g.degrees, g.L.sum(axis=1))


def test_affinity_is_read_only():
    g = build_affinity(random_cloud(0, n=5), KernelConfig())
    with pytest.raises(ValueError):
        g.L[0, 0] = 2.0


@pytest.mark.parametrize(
    "kwargs",
    [{"epsilon": 0.0}, {"epsilon": -1.0}, {"epsilon": float("inf")}, {"family": "laplace"}, {"sparsify_tol": 1.0}],
)
def test_bad_kernel_config(kwargs):
    with pytest.raises(DiffmapError):
        KernelConfig(**kwargs)


@pytest.mark.parametrize("points", [[[0.0, 1.0]], [[0.0, np.nan], [1.0, 1.0]]])
def test_bad_point_cloud(points):
    with pytest.raises(DiffmapError):
        PointCloud(points=points)


def test_squared_distances_exact_symmetry():
    x = random_cloud(1, n=30, p=4, scale=1e3).points
    d2 = squared_distances(x)
    assert np.array_equal(d2, d2.T)
    assert np.all(np.diag(d2) == 0)
    np.testing.assert_allclose(d2[3, 7], np.sum((x[3] - x[7]) ** 2), rtol=1e-15)


# --- Markov normalization ---------------------------------------------------


def test_all_ones_affinity_gives_rank_one_chain():
    L = np.ones((3, 3))
    mk = normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1)))
    assert np.allclose(mk.M, 1.0 / 3.0, rtol=0, atol=1e-15)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(mk.M).real)[::-1], [1, 0, 0], atol=1e-14)


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_two_point_chain_analytic(a):
    L = np.array([[1.0, a], [a, 1.0]])
    mk = normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1)))
    np.testing.assert_allclose(mk.M[0], [1 / (1 + a), a / (1 + a)], rtol=1e-15)
    ev = np.sort(np.linalg.eigvals(mk.M).real)[::-1]
    np.testing.assert_allclose(ev, [1.0, (1 - a) / (1 + a)], rtol=1e-13)


def test_row_sums_are_one():
    mk = markov_from_cloud(random_cloud(2, n=10), KernelConfig(epsilon=0.5))
    assert np.max(np.abs(mk.M.sum(axis=1) - 1.0)) < 1e-12


def test_symmetric_conjugate():
    mk = markov_from_cloud(random_cloud(2, n=15), KernelConfig(epsilon=0.5))
    s = np.sqrt(mk.degrees)
    ms = mk.symmetric()
    assert np.array_equal(ms, ms.T)
    np.testing.assert_allclose(ms, np.diag(s) @ mk.M @ np.diag(1 / s), rtol=1e-13)


def test_zero_degree_rejected():
    L = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(DegenerateDegreeError):
        normalize_markov(AffinityGraph(L=L, degrees=L.sum(axis=1)))


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 3)), elements=st.floats(-10, 10)),
    st.floats(0.01, 100.0),
)
def test_markov_properties(points, eps):
    mk = markov_from_cloud(PointCloud(points=points), KernelConfig(epsilon=eps))
    assert np.all(mk.M >= 0)
    np.testing.assert_allclose(mk.M.sum(axis=1), 1.0, rtol=0, atol=1e-12)
    # detailed balance with respect to the degrees
    flux = mk.degrees[:, None] * mk.M
    np.testing.assert_allclose(flux, flux.T, rtol=1e-12, atol=1e-300)


# --- epsilon selection -------------------------------------------------------


def test_median_single_pair():
    assert select_epsilon(PointCloud(points=[[0.0], [2.0]])) == 4.0


def test_median_three_collinear():
    assert select_epsilon(PointCloud(points=[[0.0], [1.0], [2.0]])) == 1.0


def test_median_matches_brute_force():
    cloud = random_cloud(7, n=100, p=3)
    pts = cloud.points.tolist()
    pairs = sorted(
        sum((a - b) ** 2 for a, b in zip(pts[i], pts[j])) for i in range(100) for j in range(i + 1, 100)
    )
    m = len(pairs)
    brute = 0.5 * (pairs[m // 2 - 1] + pairs[m // 2]) if m % 2 == 0 else pairs[m // 2]
    assert select_epsilon(cloud) == pytest.approx(brute, rel=1e-13)


def test_knn_scale_matches_brute_force():
    cloud = random_cloud(8, n=30, p=2)
    pts = cloud.points
    k = 4
    kth = [sorted(math.dist(a, b) ** 2 for b in pts)[k] for a in pts]
    assert select_epsilon(cloud, "knn_scale", k) == pytest.approx(np.mean(kth), rel=1e-12)


def test_coincident_cloud_has_no_scale():
    with pytest.raises(ZeroScaleError):
        select_epsilon(PointCloud(points=np.ones((5, 2))))


def test_unknown_rule():
    with pytest.raises(DiffmapError):
        select_epsilon(random_cloud(0, n=5), "mean")
