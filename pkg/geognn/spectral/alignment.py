"""Comparison of graph spectra with the analytic Laplace-Beltrami spectrum."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import orthogonal_procrustes

from geognn.config.runtime import get_runtime_config
from geognn.geograph.graph import PointCloud
from geognn.manifold.models import ManifoldModel, eval_basis, lb_eigenvalues
from geognn.spectral.eig import Spectrum


def multiplicity_clusters(eigenvalues, rtol: float | None = None) -> list[range]:
    """
    Group consecutive eigenvalues whose gap is below rtol * max(1, |lambda|).

    Returns:
        Contiguous 0-based index ranges covering all eigenvalues.
    """
    rtol = get_runtime_config().solver.cluster_rtol if rtol is None else rtol
    values = np.asarray(eigenvalues, dtype=float).ravel()
    clusters = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] >= rtol * max(1.0, abs(values[i - 1])):
            clusters.append(range(start, i))
            start = i
    if values.size:
        clusters.append(range(start, values.size))
    return clusters


def sampled_reference(
    m: ManifoldModel, cloud: PointCloud, K: int, scale: float | None = None
) -> np.ndarray:
    """
    Sampled eigenfunctions scale * P_n phi_i, shape (n, K).

    The default scale sqrt(Vol) normalizes the eigenfunctions for the
    probability measure, the limit of unit-norm graph eigenvectors.
    """
    scale = math.sqrt(m.volume) if scale is None else scale
    return scale * eval_basis(m, K, cloud.points)


@dataclass(frozen=True)
class AlignmentReport:
    """Per-index comparison of graph and manifold eigenpairs (0-based i)."""

    signs: np.ndarray
    eval_err: np.ndarray
    efun_err: np.ndarray
    op_err: np.ndarray
    graph_eigenvalues: np.ndarray
    manifold_eigenvalues: np.ndarray
    clusters: list = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.signs.size

    def rows(self) -> list[tuple]:
        """Rows (i, a_i, eval_err, efun_err, op_err) with 1-based i."""
        return [
            (i + 1, int(self.signs[i]), float(self.eval_err[i]),
             float(self.efun_err[i]), float(self.op_err[i]))
            for i in range(self.K)
        ]

    def summary(self) -> dict:
        return {
            "eval_err": float(np.mean(self.eval_err)),
            "efun_err": float(np.mean(self.efun_err)),
            "op_err": float(np.mean(self.op_err)) if np.all(np.isfinite(self.op_err)) else math.nan,
        }


def _rotation_part(q: np.ndarray) -> np.ndarray:
    """Write q = r d with r in SO(c) and d a sign flip of the last axis; return r."""
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, -1] = -q[:, -1]
    return q


def align_spectra(
    graph_spec: Spectrum,
    m: ManifoldModel,
    cloud: PointCloud,
    K: int,
    laplacian=None,
    reference_scale: float | None = None,
    rtol: float | None = None,
) -> AlignmentReport:
    """
    Align the first K graph eigenpairs with the manifold eigenpairs.

    Inside every multiplicity cluster of the manifold spectrum the sampled
    eigenfunctions are rotated onto the graph eigenvectors by the proper
    rotation part of the orthogonal Procrustes solution; the remaining
    reflection is absorbed by the per-index signs a_i. Reported errors are
    therefore invariant under sign flips of graph eigenvectors.

    Args:
        graph_spec: Graph spectrum with at least K pairs.
        m: The manifold.
        cloud: The points the graph was built on.
        K: Number of eigenpairs to compare.
        laplacian: Graph Laplacian for the pointwise operator error; op_err
            is NaN without it.
        reference_scale: Scale of the sampled eigenfunctions, sqrt(Vol) by default.
        rtol: Cluster tolerance on the manifold eigenvalues.

    Returns:
        AlignmentReport with K entries.
    """
    if not 1 <= K <= graph_spec.k:
        raise ValueError(f"K={K} exceeds the {graph_spec.k} available graph eigenpairs")
    if graph_spec.n != cloud.n:
        raise ValueError(
            f"spectrum has {graph_spec.n} nodes but the cloud has {cloud.n} points"
        )
    lam_m = lb_eigenvalues(m, K)
    lam_g = graph_spec.eigenvalues[:K]
    G = graph_spec.eigenvectors[:, :K]
    R = sampled_reference(m, cloud, K, reference_scale)
    n = cloud.n

    signs = np.ones(K)
    efun_err = np.zeros(K)
    clusters = multiplicity_clusters(lam_m, rtol)
    for cluster in clusters:
        idx = list(cluster)
        Rc, Gc = R[:, idx], G[:, idx]
        q, _ = orthogonal_procrustes(Rc, Gc)
        rotated = Rc @ _rotation_part(q)
        inner = np.einsum("ij,ij->j", Gc, rotated) / n
        a = np.where(inner < 0, -1.0, 1.0)
        signs[idx] = a
        diff = a * Gc - rotated
        efun_err[idx] = np.sqrt(np.einsum("ij,ij->j", diff, diff) / n)

    if laplacian is not None:
        op_err = np.max(np.abs(laplacian @ R - R * lam_m), axis=0)
    else:
        op_err = np.full(K, math.nan)

    return AlignmentReport(
        signs=signs,
        eval_err=np.abs(lam_m - lam_g),
        efun_err=efun_err,
        op_err=np.asarray(op_err, dtype=float),
        graph_eigenvalues=lam_g.copy(),
        manifold_eigenvalues=lam_m,
        clusters=clusters,
    )


__all__ = ["AlignmentReport", "multiplicity_clusters", "sampled_reference", "align_spectra"]
