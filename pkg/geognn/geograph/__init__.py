"""Geometric graphs built from point clouds."""

from geognn.geograph.graph import GeoGraph, PointCloud, build_graph
from geognn.geograph.kernels import (
    EpsRule,
    KernelConfig,
    KernelKind,
    alpha_d,
    calibrated_kernel,
    expected_degree,
    kernel_weight,
)
from geognn.geograph.operators import graph_inner, graph_norm, interpolate, nearest_index

__all__ = [
    # Kernels
    "KernelKind",
    "EpsRule",
    "KernelConfig",
    "alpha_d",
    "kernel_weight",
    "calibrated_kernel",
    "expected_degree",
    # Graphs
    "PointCloud",
    "GeoGraph",
    "build_graph",
    # Operators
    "graph_inner",
    "graph_norm",
    "nearest_index",
    "interpolate",
]
