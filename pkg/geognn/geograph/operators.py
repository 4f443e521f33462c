"""Inner products and the interpolation operator I_n."""

import numpy as np
from scipy.spatial import cKDTree

from geognn.geograph.graph import PointCloud
from geognn.manifold.models import ManifoldModel
from geognn.manifold.signals import ManifoldSignal

# Neighbours compared when breaking distance ties.
TIE_CANDIDATES = 8
TIE_RTOL = 1e-12
TIE_ATOL = 1e-15


def graph_inner(u, v) -> float:
    """Inner product (1/n) sum_i u_i v_i of the empirical measure."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"graph signals differ in shape: {u.shape} vs {v.shape}")
    if u.shape[0] == 0:
        raise ValueError("graph signals must be nonempty")
    return float(np.sum(u * v) / u.shape[0])


def graph_norm(u) -> float:
    return float(np.sqrt(max(graph_inner(u, u), 0.0)))


def _query_nearest(tree: "cKDTree | None", points) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if tree is None:
        return np.zeros(points.shape[0], dtype=int)
    k = min(TIE_CANDIDATES, tree.n)
    dist, idx = tree.query(points, k=k)
    dist, idx = dist.reshape(len(points), k), idx.reshape(len(points), k)
    radius = dist[:, :1] * (1 + TIE_RTOL) + TIE_ATOL
    tied = dist <= radius
    nearest = np.where(tied, idx, tree.n).min(axis=1)
    # Every candidate tied: the tie may extend past the k queried neighbours.
    overflow = np.flatnonzero(tied[:, -1]) if k < tree.n else np.empty(0, dtype=int)
    if overflow.size:
        balls = tree.query_ball_point(points[overflow], radius[overflow, 0])
        for row, ball in zip(overflow, balls):
            nearest[row] = min(ball)
    return nearest


def nearest_index(cloud: PointCloud, points: np.ndarray) -> np.ndarray:
    """Index of the nearest cloud point to each query point, ties to the lowest index."""
    return _query_nearest(cKDTree(cloud.points) if cloud.n > 1 else None, points)


def interpolate(u, cloud: PointCloud, m: ManifoldModel) -> ManifoldSignal:
    """
    Nearest-sample interpolation I_n of a graph signal onto the manifold.

    Args:
        u: Graph signal with one value per cloud point.
        cloud: The sample points.
        m: The manifold the interpolant lives on.

    Returns:
        Piecewise-constant ManifoldSignal.
    """
    u = np.asarray(u, dtype=float).ravel()
    if u.size == 0:
        raise ValueError("cannot interpolate on an empty cloud")
    if u.size != cloud.n:
        raise ValueError(f"signal has {u.size} values for {cloud.n} points")
    tree = cKDTree(cloud.points) if cloud.n > 1 else None
    values = u.copy()

    def func(points):
        return values[_query_nearest(tree, points)]

    return ManifoldSignal(m, func=func, meta={"interpolated_from": cloud.n})


__all__ = ["graph_inner", "graph_norm", "nearest_index", "interpolate"]
