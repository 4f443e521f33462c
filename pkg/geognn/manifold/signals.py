"""Manifold signals, quadrature and the sampling operator P_n."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from geognn.config.runtime import get_runtime_config
from geognn.manifold.models import ManifoldKind, ManifoldModel, eval_basis

MIN_QUADRATURE = 64


@dataclass(frozen=True, eq=False)
class ManifoldSignal:
    """
    A scalar function on a manifold.

    A signal holds spectral coefficients over the first M modes, an exact
    pointwise callable, or both. When both are present the callable is the
    signal and the coefficients are its projection; `projection_residual`
    then records the L2 distance between the two.
    """

    manifold: ManifoldModel
    coeffs: np.ndarray | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = None
    projection_residual: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.coeffs is None and self.func is None:
            raise ValueError("a manifold signal needs coefficients or a function")
        if self.coeffs is not None:
            coeffs = np.asarray(self.coeffs, dtype=float).ravel()
            if coeffs.size < 1:
                raise ValueError("spectral representation needs M >= 1")
            if not np.all(np.isfinite(coeffs)):
                raise ValueError("spectral coefficients must be finite")
            object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, m: ManifoldModel, coeffs) -> "ManifoldSignal":
        return cls(m, coeffs=np.asarray(coeffs, dtype=float))

    @classmethod
    def from_function(cls, m: ManifoldModel, func) -> "ManifoldSignal":
        return cls(m, func=func)

    @classmethod
    def mode(cls, m: ManifoldModel, index: int, M: int | None = None) -> "ManifoldSignal":
        """The eigenfunction with 0-based `index` as a spectral signal."""
        M = M or get_runtime_config().quadrature.truncation
        if not 0 <= index < M:
            raise ValueError(f"mode index {index} outside truncation {M}")
        coeffs = np.zeros(M)
        coeffs[index] = 1.0
        return cls(m, coeffs=coeffs)

    @classmethod
    def constant(cls, m: ManifoldModel, value: float, M: int | None = None) -> "ManifoldSignal":
        M = M or get_runtime_config().quadrature.truncation
        coeffs = np.zeros(M)
        # The constant mode is 1/sqrt(Vol) on every manifold here.
        coeffs[0] = value * math.sqrt(m.volume)
        return cls(m, coeffs=coeffs)

    @property
    def truncation(self) -> int | None:
        return None if self.coeffs is None else self.coeffs.size

    @property
    def is_spectral(self) -> bool:
        return self.coeffs is not None

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values of the signal at ambient points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.func is not None:
            return np.asarray(self.func(points), dtype=float).reshape(points.shape[0])
        return eval_basis(self.manifold, self.coeffs.size, points) @ self.coeffs

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate(points)

    def scaled(self, a: float) -> "ManifoldSignal":
        func = None if self.func is None else (lambda x, f=self.func: a * f(x))
        coeffs = None if self.coeffs is None else a * self.coeffs
        return replace(self, coeffs=coeffs, func=func)


def quadrature_grid(m: ManifoldModel, Q: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Quadrature nodes (ambient points) and weights summing to Vol(m).

    Circle and torus use uniform tensor grids with Q nodes per intrinsic
    dimension. The sphere uses Q Gauss-Legendre nodes in cos(polar) times Q
    uniform azimuths.
    """
    Q = Q or get_runtime_config().quadrature.nodes
    if Q < MIN_QUADRATURE:
        raise ValueError(f"quadrature size must be >= {MIN_QUADRATURE}, got {Q}")
    step = 2 * math.pi / Q
    t = step * np.arange(Q)
    if m.kind == ManifoldKind.CIRCLE:
        return m.embed(t[:, None]), np.full(Q, step)
    if m.kind == ManifoldKind.SPHERE:
        x, w = leggauss(Q)
        polar = np.arccos(x)
        pp, aa = np.meshgrid(polar, t, indexing="ij")
        weights = np.repeat(w, Q) * step
        return m.embed(np.column_stack([pp.ravel(), aa.ravel()])), weights
    aa, bb = np.meshgrid(t, t, indexing="ij")
    coords = np.column_stack([aa.ravel(), bb.ravel()])
    return m.embed(coords), np.full(Q * Q, step * step)


def manifold_inner(
    f: ManifoldSignal, g: ManifoldSignal, m: ManifoldModel, Q: int | None = None
) -> float:
    """Inner product <f, g> over the manifold by tensor-grid quadrature."""
    nodes, weights = quadrature_grid(m, Q)
    return float(np.sum(weights * f.evaluate(nodes) * g.evaluate(nodes)))


def manifold_norm(f: ManifoldSignal, m: ManifoldModel, Q: int | None = None) -> float:
    return math.sqrt(max(manifold_inner(f, f, m, Q), 0.0))


def project(
    f: ManifoldSignal, M: int, Q: int | None = None, keep_function: bool = True
) -> ManifoldSignal:
    """
    Project a signal onto the first M eigenfunctions.

    The returned signal keeps the original callable (when `keep_function`) and
    records the projection residual.
    """
    m = f.manifold
    nodes, weights = quadrature_grid(m, Q)
    values = f.evaluate(nodes)
    basis = eval_basis(m, M, nodes)
    coeffs = basis.T @ (weights * values)
    residual = math.sqrt(max(float(np.sum(weights * (values - basis @ coeffs) ** 2)), 0.0))
    func = f.func if keep_function else None
    return ManifoldSignal(m, coeffs=coeffs, func=func, projection_residual=residual)


def sample_signal(f: "ManifoldSignal | Callable", X) -> np.ndarray:
    """
    Sampling operator P_n: values of f at the points of a cloud.

    Args:
        f: A ManifoldSignal or any callable on ambient points.
        X: A PointCloud or an (n, N) array.

    Returns:
        Graph signal of length n.
    """
    points = getattr(X, "points", X)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(f, ManifoldSignal):
        return f.evaluate(points)
    return np.asarray(f(points), dtype=float).reshape(points.shape[0])


__all__ = [
    "ManifoldSignal",
    "quadrature_grid",
    "manifold_inner",
    "manifold_norm",
    "project",
    "sample_signal",
]
