"""Tests for manifold models, signals and manifold filtering."""

import math

import numpy as np
import pytest
from scipy import stats

from geognn.filters.coeffs import FilterCoeffs, heat_filter
from geognn.gnn.arch import GnnArch, Nonlinearity
from geognn.manifold.mnn import manifold_filter_apply, mnn_forward
from geognn.manifold.models import (
    eval_basis,
    get_manifold,
    lb_eigenvalues,
    lb_spectrum,
    sample_uniform,
)
from geognn.manifold.signals import (
    ManifoldSignal,
    manifold_inner,
    manifold_norm,
    project,
    quadrature_grid,
    sample_signal,
)


class TestSpectra:
    def test_circle_eigenvalues(self, circle):
        np.testing.assert_array_equal(lb_eigenvalues(circle, 5), [0, 1, 1, 4, 4])

    def test_sphere_eigenvalues(self, sphere):
        np.testing.assert_array_equal(lb_eigenvalues(sphere, 9), [0, 2, 2, 2, 6, 6, 6, 6, 6])

    def test_torus_eigenvalues(self, torus):
        np.testing.assert_array_equal(lb_eigenvalues(torus, 9), [0, 1, 1, 1, 1, 2, 2, 2, 2])

    def test_spectrum_is_one_based_and_ascending(self, sphere):
        pairs = lb_spectrum(sphere, 16)
        assert [p.index for p in pairs] == list(range(1, 17))
        values = [p.eigenvalue for p in pairs]
        assert values == sorted(values)

    def test_rejects_empty_truncation(self, circle):
        with pytest.raises(ValueError):
            lb_spectrum(circle, 0)

    def test_unknown_manifold(self):
        with pytest.raises(ValueError, match="Unknown manifold"):
            get_manifold("klein")

    @pytest.mark.parametrize("name,Q", [("circle", 256), ("sphere", 64), ("torus", 64)])
    def test_eigenfunctions_are_orthonormal(self, name, Q):
        m = get_manifold(name)
        nodes, weights = quadrature_grid(m, Q)
        basis = eval_basis(m, 9, nodes)
        gram = basis.T @ (weights[:, None] * basis)
        np.testing.assert_allclose(gram, np.eye(9), atol=1e-10)

    def test_eigenfunction_callable_matches_basis(self, torus, rng):
        points = sample_uniform(torus, 20, rng).points
        pairs = lb_spectrum(torus, 6)
        basis = eval_basis(torus, 6, points)
        for j, pair in enumerate(pairs):
            np.testing.assert_allclose(pair(points), basis[:, j], atol=1e-12)


class TestSampling:
    def test_uniform_points_lie_on_manifold(self, sphere):
        cloud = sample_uniform(sphere, 200, 3)
        np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 1.0, atol=1e-12)
        assert cloud.source == "sphere"

    def test_sphere_samples_pass_chi_square(self, sphere):
        # 5 z-bands by 8 longitude sectors are 40 equal-area cells.
        passed = 0
        for seed in range(5):
            x, y, z = sample_uniform(sphere, 10_000, seed).points.T
            band = np.minimum(((z + 1) / 2 * 5).astype(int), 4)
            sector = np.minimum(((np.arctan2(y, x) + np.pi) / (2 * np.pi) * 8).astype(int), 7)
            counts = np.bincount(band * 8 + sector, minlength=40)
            passed += stats.chisquare(counts).pvalue > 0.05
        assert passed >= 3

    def test_seed_determines_points(self, circle):
        a = sample_uniform(circle, 50, 7).points
        b = sample_uniform(circle, 50, 7).points
        np.testing.assert_array_equal(a, b)

    def test_rejects_single_point(self, circle):
        with pytest.raises(ValueError):
            sample_uniform(circle, 1, 0)

    @pytest.mark.parametrize("name", ["circle", "sphere", "torus"])
    def test_quadrature_weights_sum_to_volume(self, name):
        m = get_manifold(name)
        _, weights = quadrature_grid(m, 64)
        assert math.isclose(weights.sum(), m.volume, rel_tol=1e-12)

    def test_quadrature_rejects_small_grids(self, circle):
        with pytest.raises(ValueError):
            quadrature_grid(circle, 16)


class TestSignals:
    def test_mode_has_unit_norm(self, circle):
        assert math.isclose(manifold_norm(ManifoldSignal.mode(circle, 3, 9), circle, 256), 1.0,
                            rel_tol=1e-10)

    def test_constant_signal(self, sphere, rng):
        f = ManifoldSignal.constant(sphere, 2.5, M=4)
        points = sample_uniform(sphere, 10, rng).points
        np.testing.assert_allclose(f(points), 2.5, atol=1e-12)

    def test_needs_a_representation(self, circle):
        with pytest.raises(ValueError):
            ManifoldSignal(circle)

    def test_projection_of_trigonometric_function(self, circle):
        f = ManifoldSignal.from_function(circle, lambda x: x[:, 0] ** 2 - x[:, 1] ** 2)  # cos 2t
        p = project(f, 5, 256)
        expected = np.zeros(5)
        expected[3] = math.sqrt(math.pi)
        np.testing.assert_allclose(p.coeffs, expected, atol=1e-10)
        assert p.projection_residual < 1e-8

    def test_inner_product_of_distinct_modes(self, sphere):
        a = ManifoldSignal.mode(sphere, 1, 9)
        b = ManifoldSignal.mode(sphere, 5, 9)
        assert abs(manifold_inner(a, b, sphere, 64)) < 1e-10

    def test_sample_signal_accepts_callables(self, circle):
        cloud = sample_uniform(circle, 12, 0)
        values = sample_signal(lambda x: x[:, 0], cloud)
        np.testing.assert_array_equal(values, cloud.points[:, 0])

    def test_scaled(self, circle, rng):
        f = ManifoldSignal.mode(circle, 1, 5)
        points = sample_uniform(circle, 8, rng).points
        np.testing.assert_allclose(f.scaled(-2.0)(points), -2.0 * f(points))


class TestManifoldFilters:
    def test_heat_filter_scales_each_mode(self, circle):
        f = ManifoldSignal.from_coeffs(circle, np.ones(5))
        y = manifold_filter_apply(heat_filter(0.5), f, circle, M=5)
        np.testing.assert_allclose(y.coeffs, np.exp(-0.5 * np.array([0, 1, 1, 4, 4])))

    def test_short_signal_is_rejected(self, circle):
        f = ManifoldSignal.from_coeffs(circle, np.ones(3))
        with pytest.raises(ValueError):
            manifold_filter_apply(heat_filter(1.0), f, circle, M=5)

    def test_identity_network_equals_filter(self, sphere):
        h = FilterCoeffs([0.3, -0.2, 0.5])
        arch = GnnArch.from_filter(h, Nonlinearity.IDENTITY)
        f = ManifoldSignal.from_coeffs(sphere, np.linspace(1, 0, 9))
        (out,) = mnn_forward(arch, f, sphere, M=9)
        np.testing.assert_allclose(out.coeffs, manifold_filter_apply(h, f, sphere, 9).coeffs)

    def test_relu_network_outputs_are_nonnegative(self, circle, rng):
        arch = GnnArch.random([1, 2, 1], 3, 0, Nonlinearity.RELU)
        f = ManifoldSignal.mode(circle, 1, 9)
        outputs, layers = mnn_forward(arch, f, circle, M=9, Q=256, return_layers=True)
        assert len(layers) == 3
        points = sample_uniform(circle, 50, rng).points
        # The layer output is sigma(z) itself, its coefficients are the projection.
        assert np.all(outputs[0](points) >= 0)

    def test_width_mismatch(self, circle):
        arch = GnnArch.random([2, 1], 3, 0)
        with pytest.raises(ValueError):
            mnn_forward(arch, ManifoldSignal.mode(circle, 0, 5), circle, M=5)
