"""Point clouds and geometric graph construction."""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform

from geognn.errors import DisconnectedGraphWarning
from geognn.geograph.kernels import KernelConfig, KernelKind, expected_degree, kernel_weight


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points in ambient coordinates; `source` is a manifold name or "external"."""

    points: np.ndarray
    source: str = "external"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] < 1:
            raise ValueError("a point cloud needs an (n, N) array with n >= 1")
        if not np.all(np.isfinite(points)):
            raise ValueError("point coordinates must be finite")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def permute(self, perm) -> "PointCloud":
        """Relabel points so that new point i is old point perm[i]."""
        perm = np.asarray(perm)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        return PointCloud(self.points[perm], source=self.source)

    def subsample(self, n: int, seed) -> "PointCloud":
        """Uniform subsample of n points without replacement."""
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot subsample {n} of {self.n} points")
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(self.n, size=n, replace=False))
        return PointCloud(self.points[idx], source=self.source)


@dataclass(frozen=True, eq=False)
class GeoGraph:
    """
    A geometric graph on a point cloud.

    Dense kernels store `adjacency` and `laplacian` as numpy arrays, compact
    kernels as CSR matrices. `config` always has eps resolved for n.
    """

    cloud: PointCloud
    config: KernelConfig
    adjacency: "np.ndarray | sparse.csr_matrix"
    laplacian: "np.ndarray | sparse.csr_matrix"
    avg_degree: float
    n_components: int = 1

    @property
    def n(self) -> int:
        return self.cloud.n

    @property
    def eps(self) -> float:
        return float(self.config.eps)

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.laplacian)

    @property
    def edge_count(self) -> int:
        if self.is_sparse:
            return int(self.adjacency.nnz // 2)
        return int(np.count_nonzero(self.adjacency) // 2)

    def expected_degree(self, volume: float = 1.0) -> float:
        return expected_degree(self.config, self.n, volume)

    def dense_laplacian(self) -> np.ndarray:
        if self.is_sparse:
            return self.laplacian.toarray()
        return np.asarray(self.laplacian)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Upper-triangular edge list (i, j, weight) with i < j, sorted."""
        coo = sparse.triu(sparse.coo_matrix(self.adjacency), k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]


def _dense_adjacency(points: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    dist_sq = squareform(pdist(points, "sqeuclidean"))
    adjacency = kernel_weight(cfg, points.shape[0], dist_sq)
    np.fill_diagonal(adjacency, 0.0)
    return adjacency


def _sparse_adjacency(points: np.ndarray, cfg: KernelConfig) -> sparse.csr_matrix:
    n = points.shape[0]
    tree = cKDTree(points)
    # Slightly enlarged radius; the exact dist_sq <= eps test is applied below.
    pairs = tree.query_pairs(np.sqrt(cfg.eps) * (1 + 1e-9), output_type="ndarray")
    pairs = pairs.reshape(-1, 2).astype(np.int64)
    diff = points[pairs[:, 0]] - points[pairs[:, 1]]
    dist_sq = np.einsum("ij,ij->i", diff, diff)
    inside = dist_sq <= cfg.eps
    pairs, dist_sq = pairs[inside], dist_sq[inside]
    weights = np.atleast_1d(kernel_weight(cfg, n, dist_sq))
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    data = np.concatenate([weights, weights])
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def build_graph(cloud: PointCloud, cfg: KernelConfig) -> GeoGraph:
    """
    Build the geometric graph of a point cloud.

    Args:
        cloud: At least two points.
        cfg: Kernel configuration; rule-based eps is resolved for cloud.n.

    Returns:
        GeoGraph with L = diag(A 1) - A and zero-diagonal A.
    """
    n = cloud.n
    if n < 2:
        raise ValueError(f"a graph needs at least 2 points, got {n}")
    eps = cfg.bandwidth(n)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    cfg = cfg.resolve(n)

    if cfg.kind == KernelKind.DENSE_GAUSSIAN:
        adjacency = _dense_adjacency(cloud.points, cfg)
        degree = adjacency.sum(axis=1)
        laplacian = np.diag(degree) - adjacency
        nonzero = np.count_nonzero(adjacency, axis=1)
    else:
        adjacency = _sparse_adjacency(cloud.points, cfg)
        degree = np.asarray(adjacency.sum(axis=1)).ravel()
        laplacian = (sparse.diags(degree) - adjacency).tocsr()
        nonzero = np.diff(adjacency.indptr)

    n_components, _ = connected_components(sparse.csr_matrix(adjacency), directed=False)
    if n_components > 1:
        warnings.warn(
            f"{cfg.kind.value} graph on {n} points has {n_components} connected "
            f"components (eps={cfg.eps:.4g})",
            DisconnectedGraphWarning,
            stacklevel=2,
        )
    return GeoGraph(
        cloud=cloud,
        config=cfg,
        adjacency=adjacency,
        laplacian=laplacian,
        avg_degree=float(np.mean(nonzero)),
        n_components=int(n_components),
    )


__all__ = ["PointCloud", "GeoGraph", "build_graph"]
