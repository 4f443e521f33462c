"""Tests for kernels, graph construction and graph-side operators."""

import math
import warnings

import numpy as np
import pytest

from geognn.errors import DisconnectedGraphWarning
from geognn.geograph.graph import PointCloud, build_graph
from geognn.geograph.kernels import (
    EpsRule,
    KernelConfig,
    KernelKind,
    alpha_d,
    calibrated_kernel,
    kernel_weight,
)
from geognn.geograph.operators import graph_inner, graph_norm, interpolate, nearest_index
from geognn.manifold.models import sample_uniform
from geognn.manifold.signals import ManifoldSignal, quadrature_grid, sample_signal

DENSE = KernelKind.DENSE_GAUSSIAN
SPARSE = KernelKind.SPARSE_COMPACT


class TestKernels:
    def test_gaussian_weight_at_zero_distance(self):
        cfg = KernelConfig(DENSE, eps=1.0, d=2)
        assert math.isclose(kernel_weight(cfg, 1, 0.0), 1 / (4 * math.pi), rel_tol=1e-12)

    def test_compact_weight_inside_support(self):
        cfg = KernelConfig(SPARSE, eps=1.0, d=2)
        assert math.isclose(kernel_weight(cfg, 1, 0.5), 4 / math.pi, rel_tol=1e-12)

    def test_compact_weight_outside_support(self):
        cfg = KernelConfig(SPARSE, eps=0.3, d=1)
        assert kernel_weight(cfg, 10, 1.5 * 0.3) == 0.0

    def test_weights_scale_with_one_over_n(self):
        cfg = KernelConfig(DENSE, eps=0.5, d=1)
        assert math.isclose(kernel_weight(cfg, 10, 0.2), kernel_weight(cfg, 1, 0.2) / 10)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            kernel_weight(KernelConfig(DENSE, eps=1.0), 5, -0.1)

    def test_unit_ball_volumes(self):
        assert alpha_d(1) == pytest.approx(2.0)
        assert alpha_d(2) == pytest.approx(math.pi)
        assert alpha_d(3) == pytest.approx(4 * math.pi / 3)

    def test_rate_rules(self):
        dense = KernelConfig(DENSE, d=1, eps_rule=EpsRule.DENSE_RATE)
        assert dense.bandwidth(32) == pytest.approx(0.5)
        sparse_ = KernelConfig(SPARSE, d=2, eps_rule=EpsRule.SPARSE_RATE)
        assert sparse_.bandwidth(100) == pytest.approx(math.sqrt(math.log(100) / 100))

    def test_resolve_fixes_eps(self):
        cfg = KernelConfig(DENSE, d=1, eps_rule=EpsRule.DENSE_RATE).resolve(32)
        assert cfg.eps_rule == EpsRule.MANUAL
        assert cfg.eps == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eps": None},
            {"eps": 1.0, "d": 0},
            {"eps": 1.0, "scale": 0.0},
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            KernelConfig(DENSE, **kwargs)

    def test_calibrated_scale(self, circle):
        dense = calibrated_kernel("dense", circle)
        sparse_ = calibrated_kernel("sparse", circle)
        assert dense.scale == pytest.approx(2 * math.pi)
        assert sparse_.scale == pytest.approx(4 * math.pi)
        assert dense.eps_rule == EpsRule.DENSE_RATE
        assert sparse_.eps_rule == EpsRule.SPARSE_RATE
        assert calibrated_kernel("dense", circle, eps=0.2).eps_rule == EpsRule.MANUAL


class TestBuildGraph:
    def test_two_node_laplacian(self):
        cfg = KernelConfig(DENSE, eps=1.0, d=2)
        g = build_graph(PointCloud([[0.0, 0.0], [1.0, 0.0]]), cfg)
        w = kernel_weight(cfg, 2, 1.0)
        np.testing.assert_allclose(g.laplacian, [[w, -w], [-w, w]])
        np.testing.assert_allclose(np.linalg.eigvalsh(g.laplacian), [0.0, 2 * w], atol=1e-15)

    @pytest.mark.parametrize("kind", ["dense", "sparse"])
    def test_laplacian_annihilates_constants(self, circle_graph, kind):
        g = circle_graph(200, seed=1, kind=kind)
        np.testing.assert_allclose(g.laplacian @ np.ones(g.n), 0.0, atol=1e-9)

    def test_dense_graph_is_symmetric_and_psd(self, random_graph):
        g = random_graph(40)
        np.testing.assert_array_equal(g.adjacency, g.adjacency.T)
        assert np.all(np.diag(g.adjacency) == 0)
        assert np.linalg.eigvalsh(g.laplacian).min() > -1e-10

    def test_sparse_graph_is_csr_and_symmetric(self, circle_graph):
        g = circle_graph(300, kind="sparse")
        assert g.is_sparse
        assert abs(g.adjacency - g.adjacency.T).max() == 0
        assert g.edge_count == g.adjacency.nnz // 2

    def test_eps_is_resolved_for_n(self, circle_graph):
        g = circle_graph(243)
        assert g.eps == pytest.approx(243 ** (-1 / 5))

    def test_sparse_degree_matches_expectation(self, circle_graph, circle):
        g = circle_graph(500, seed=2, kind="sparse")
        expected = g.expected_degree(circle.volume)
        assert g.avg_degree == pytest.approx(expected, rel=0.15)
        assert math.log(500) <= g.avg_degree <= 6 * math.log(500)

    def test_permutation_relabels_laplacian(self, circle, rng):
        cloud = sample_uniform(circle, 60, 5)
        cfg = calibrated_kernel("dense", circle)
        perm = rng.permutation(60)
        L = build_graph(cloud, cfg).laplacian
        L_perm = build_graph(cloud.permute(perm), cfg).laplacian
        np.testing.assert_allclose(L_perm, L[np.ix_(perm, perm)], atol=1e-12)

    def test_disconnected_graph_warns(self):
        points = np.vstack([np.zeros((5, 2)) + [0, 0], np.zeros((5, 2)) + [10, 0]])
        points = points + np.random.default_rng(0).normal(scale=0.01, size=points.shape)
        with pytest.warns(DisconnectedGraphWarning):
            g = build_graph(PointCloud(points), KernelConfig(SPARSE, eps=0.5, d=2))
        assert g.n_components == 2

    def test_connected_graph_is_quiet(self, circle_graph):
        with warnings.catch_warnings():
            warnings.simplefilter("error", DisconnectedGraphWarning)
            g = circle_graph(100)
        assert g.n_components == 1

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            build_graph(PointCloud([[0.0, 1.0]]), KernelConfig(DENSE, eps=1.0))

    def test_edges_are_upper_triangular(self, random_graph):
        g = random_graph(10, eps=0.1)
        i, j, w = g.edges()
        assert np.all(i < j)
        assert len(w) == g.edge_count
        assert np.all(w > 0)


class TestPointCloud:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PointCloud([[0.0, np.nan]])

    def test_one_dimensional_input_becomes_column(self):
        assert PointCloud([1.0, 2.0, 3.0]).points.shape == (3, 1)

    def test_points_are_read_only(self):
        cloud = PointCloud([[0.0, 1.0]])
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 2.0

    def test_permute_rejects_non_permutations(self):
        with pytest.raises(ValueError):
            PointCloud(np.zeros((3, 2))).permute([0, 0, 1])

    def test_subsample(self):
        cloud = PointCloud(np.arange(20.0).reshape(10, 2))
        sub = cloud.subsample(4, 0)
        assert sub.n == 4
        assert len({tuple(p) for p in sub.points}) == 4
        with pytest.raises(ValueError):
            cloud.subsample(11, 0)


class TestOperators:
    def test_inner_of_ones(self):
        assert graph_inner(np.ones(4), np.ones(4)) == pytest.approx(1.0)

    def test_orthogonal_signals(self):
        assert graph_inner([1.0, -1.0], [1.0, 1.0]) == 0.0

    def test_norm(self):
        assert graph_norm([3.0, 4.0]) == pytest.approx(math.sqrt(12.5))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            graph_inner([1.0, 2.0], [1.0])

    def test_sampling_equispaced_circle(self, circle):
        angles = np.array([0, np.pi / 2, np.pi, 3 * np.pi / 2])
        cloud = PointCloud(circle.embed(angles[:, None]))
        values = sample_signal(ManifoldSignal.mode(circle, 1, 5), cloud)
        np.testing.assert_allclose(values, np.array([1, 0, -1, 0]) / math.sqrt(math.pi), atol=1e-12)

    def test_interpolating_a_constant(self, sphere, rng):
        cloud = sample_uniform(sphere, 30, 0)
        f = interpolate(np.full(30, 2.0), cloud, sphere)
        np.testing.assert_array_equal(f(sample_uniform(sphere, 50, rng).points), 2.0)

    def test_interpolating_from_one_point(self, circle):
        f = interpolate([7.0], PointCloud([[1.0, 0.0]]), circle)
        np.testing.assert_array_equal(f(circle.embed(np.linspace(0, 6, 9)[:, None])), 7.0)

    def test_ties_go_to_lowest_index(self):
        cloud = PointCloud([[1.0, 0.0], [-1.0, 0.0]])
        assert nearest_index(cloud, np.array([[0.0, 1.0]]))[0] == 0
        reversed_ = PointCloud([[-1.0, 0.0], [1.0, 0.0]])
        assert nearest_index(reversed_, np.array([[0.0, 1.0]]))[0] == 0

    def test_ties_among_many_equidistant_points(self):
        cloud = PointCloud([[5.0, 5.0], [0.0, -1.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        assert nearest_index(cloud, np.zeros((1, 2)))[0] == 1
        swapped = PointCloud([[5.0, 5.0], [-1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, -1.0]])
        assert nearest_index(swapped, np.zeros((1, 2)))[0] == 1

    def test_tie_wider_than_the_candidate_list(self):
        angles = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)
        ring = np.column_stack([np.cos(angles), np.sin(angles)])
        cloud = PointCloud(np.vstack([[[5.0, 5.0]], ring[::-1]]))
        np.testing.assert_array_equal(nearest_index(cloud, np.array([[0.0, 0.0], [4.0, 4.0]])), [1, 0])

    def test_interpolation_size_mismatch(self, circle):
        with pytest.raises(ValueError):
            interpolate([1.0, 2.0], PointCloud([[1.0, 0.0]]), circle)

    def test_interpolation_converges_for_smooth_signals(self, circle):
        f = ManifoldSignal.mode(circle, 1, 5)
        nodes, weights = quadrature_grid(circle, 1024)
        errors = []
        for n in (50, 400, 3200):
            cloud = sample_uniform(circle, n, 0)
            diff = interpolate(sample_signal(f, cloud), cloud, circle)(nodes) - f(nodes)
            errors.append(math.sqrt(np.sum(weights * diff**2)))
        assert errors[0] > errors[1] > errors[2]
