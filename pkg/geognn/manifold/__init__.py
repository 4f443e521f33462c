"""Analytic manifolds, manifold signals and manifold neural networks."""

from geognn.manifold.mnn import manifold_filter_apply, mnn_forward
from geognn.manifold.models import (
    EigenPair,
    ManifoldKind,
    ManifoldModel,
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

__all__ = [
    # Models
    "ManifoldKind",
    "ManifoldModel",
    "EigenPair",
    "get_manifold",
    "lb_spectrum",
    "lb_eigenvalues",
    "eval_basis",
    "sample_uniform",
    # Signals
    "ManifoldSignal",
    "quadrature_grid",
    "manifold_inner",
    "manifold_norm",
    "project",
    "sample_signal",
    # Filtering
    "manifold_filter_apply",
    "mnn_forward",
]
