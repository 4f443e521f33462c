"""Symmetric eigendecomposition of graph Laplacians."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from geognn.config.runtime import get_runtime_config
from geognn.errors import EigenSolverError
from geognn.geograph.graph import GeoGraph


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    The k smallest eigenpairs of a graph Laplacian.

    Eigenvectors are columns with Euclidean norm sqrt(n), i.e. unit norm in
    L2(G_n), and the sign fixed so that the entry of largest magnitude is
    positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray | None = None

    def __post_init__(self):
        eigenvalues = np.asarray(self.eigenvalues, dtype=float).ravel()
        eigenvectors = np.asarray(self.eigenvectors, dtype=float)
        if eigenvectors.ndim != 2 or eigenvectors.shape[1] != eigenvalues.size:
            raise ValueError("eigenvectors must be an (n, k) matrix matching the eigenvalues")
        if np.any(np.diff(eigenvalues) < 0):
            raise ValueError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "eigenvectors", eigenvectors)

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def k(self) -> int:
        return self.eigenvalues.size

    @property
    def is_full(self) -> bool:
        return self.k == self.n

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Graph Fourier coefficients <x, phi_i> in L2(G_n); x may be (n,) or (n, F)."""
        return self.eigenvectors.T @ x / self.n

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        return self.eigenvectors @ coeffs

    def truncate(self, k: int) -> "Spectrum":
        if not 1 <= k <= self.k:
            raise ValueError(f"cannot truncate {self.k} eigenpairs to {k}")
        residuals = None if self.residuals is None else self.residuals[:k]
        return Spectrum(self.eigenvalues[:k], self.eigenvectors[:, :k], residuals)


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_sym(g: GeoGraph, k: int | None = None) -> Spectrum:
    """
    Smallest k eigenpairs of the graph Laplacian.

    Dense LAPACK is used up to `SolverConfig.dense_eig_limit` nodes,
    shift-invert Lanczos above. Residuals are checked against
    `SolverConfig.residual_tol` relative to the Gershgorin bound of L.

    Args:
        g: The graph.
        k: Number of eigenpairs, 1 <= k <= n; defaults to n.

    Returns:
        Spectrum with ascending eigenvalues.

    Raises:
        EigenSolverError: Lanczos did not converge or residuals are too large.
    """
    n = g.n
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    solver = get_runtime_config().solver
    L = g.laplacian

    if n <= solver.dense_eig_limit or k >= n - 1:
        dense = g.dense_laplacian()
        eigenvalues, eigenvectors = scipy.linalg.eigh(dense, subset_by_index=[0, k - 1])
    else:
        # A small negative shift keeps L - sigma I nonsingular.
        sigma = -1e-6 * max(1.0, float(L.diagonal().max()))
        try:
            eigenvalues, eigenvectors = eigsh(L, k=k, sigma=sigma, which="LM")
        except (ArpackNoConvergence, ArpackError) as exc:
            raise EigenSolverError(f"Lanczos failed for k={k}, n={n}: {exc}") from exc
        order = np.argsort(eigenvalues)
        eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

    eigenvectors = _canonical_signs(eigenvectors) * math.sqrt(n)
    residuals = np.linalg.norm(L @ eigenvectors - eigenvectors * eigenvalues, axis=0)
    scale = max(1.0, 2.0 * float(np.max(np.abs(L.diagonal()))))
    limit = solver.residual_tol * scale * math.sqrt(n)
    if np.any(residuals > limit):
        raise EigenSolverError(
            f"eigen-residuals up to {residuals.max():.3e} exceed {limit:.3e}",
            residuals=residuals,
        )
    return Spectrum(eigenvalues, eigenvectors, residuals)


__all__ = ["Spectrum", "eig_sym"]
