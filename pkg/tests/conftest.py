"""Shared fixtures for the geognn test suite."""

import numpy as np
import pytest

from geognn.geograph.graph import PointCloud, build_graph
from geognn.geograph.kernels import EpsRule, KernelConfig, KernelKind, calibrated_kernel
from geognn.manifold.models import get_manifold, sample_uniform


@pytest.fixture
def circle():
    return get_manifold("circle")


@pytest.fixture
def sphere():
    return get_manifold("sphere")


@pytest.fixture
def torus():
    return get_manifold("torus")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_graph():
    """Factory for small dense graphs on random points in the unit cube."""

    def make(n: int, seed: int = 0, eps: float = 0.5, dim: int = 3):
        points = np.random.default_rng(seed).uniform(size=(n, dim))
        cfg = KernelConfig(KernelKind.DENSE_GAUSSIAN, eps=eps, d=dim, eps_rule=EpsRule.MANUAL)
        return build_graph(PointCloud(points), cfg)

    return make


@pytest.fixture
def circle_graph(circle):
    """Factory for calibrated circle graphs."""

    def make(n: int, seed: int = 0, kind: str = "dense"):
        return build_graph(sample_uniform(circle, n, seed), calibrated_kernel(kind, circle))

    return make
