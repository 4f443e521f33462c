"""
geognn - Geometric graphs, manifold filters and graph neural networks.

This package samples point clouds from manifolds, builds geometric graphs on
them, and measures how graph filters and GNNs converge to their manifold
counterparts as the graphs grow.
"""

from geognn.errors import GeoGnnError
from geognn.geograph.graph import GeoGraph, PointCloud, build_graph
from geognn.manifold.models import ManifoldModel, get_manifold

__version__ = "0.1.0"
__all__ = ["GeoGnnError", "ManifoldModel", "get_manifold", "PointCloud", "GeoGraph", "build_graph"]
