"""Analytic manifold models with closed-form Laplace-Beltrami spectra."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import gammaln, lpmv


class ManifoldKind(Enum):
    """Family of analytic manifold."""

    CIRCLE = "circle"
    SPHERE = "sphere"
    TORUS = "torus"


@dataclass(frozen=True)
class ManifoldModel:
    """
    A compact analytic manifold embedded in Euclidean space.

    The flat torus uses the embedding (cos a, sin a, cos b, sin b), which is an
    isometry from the square torus of side 2*pi.
    """

    kind: ManifoldKind
    intrinsic_dim: int
    ambient_dim: int
    volume: float

    def __post_init__(self):
        if self.volume <= 0:
            raise ValueError(f"volume must be positive, got {self.volume}")
        if not 0 < self.intrinsic_dim < self.ambient_dim:
            raise ValueError(
                f"need 0 < d < N, got d={self.intrinsic_dim}, N={self.ambient_dim}"
            )

    @property
    def name(self) -> str:
        return self.kind.value

    def embed(self, coords: np.ndarray) -> np.ndarray:
        """Map intrinsic coordinates (n, d) to ambient points (n, N)."""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if self.kind == ManifoldKind.CIRCLE:
            t = coords[:, 0]
            return np.column_stack([np.cos(t), np.sin(t)])
        if self.kind == ManifoldKind.SPHERE:
            polar, azim = coords[:, 0], coords[:, 1]
            s = np.sin(polar)
            return np.column_stack([s * np.cos(azim), s * np.sin(azim), np.cos(polar)])
        a, b = coords[:, 0], coords[:, 1]
        return np.column_stack([np.cos(a), np.sin(a), np.cos(b), np.sin(b)])

    def intrinsic(self, points: np.ndarray) -> np.ndarray:
        """Map ambient points (n, N) back to intrinsic coordinates (n, d)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.ambient_dim:
            raise ValueError(
                f"{self.name} points need {self.ambient_dim} coordinates, "
                f"got {points.shape[1]}"
            )
        if self.kind == ManifoldKind.CIRCLE:
            return np.arctan2(points[:, 1], points[:, 0])[:, None]
        if self.kind == ManifoldKind.SPHERE:
            r = np.linalg.norm(points, axis=1)
            r = np.where(r > 0, r, 1.0)
            polar = np.arccos(np.clip(points[:, 2] / r, -1.0, 1.0))
            azim = np.arctan2(points[:, 1], points[:, 0])
            return np.column_stack([polar, azim])
        a = np.arctan2(points[:, 1], points[:, 0])
        b = np.arctan2(points[:, 3], points[:, 2])
        return np.column_stack([a, b])


_MANIFOLDS = {
    ManifoldKind.CIRCLE: ManifoldModel(ManifoldKind.CIRCLE, 1, 2, 2 * math.pi),
    ManifoldKind.SPHERE: ManifoldModel(ManifoldKind.SPHERE, 2, 3, 4 * math.pi),
    ManifoldKind.TORUS: ManifoldModel(ManifoldKind.TORUS, 2, 4, 4 * math.pi**2),
}


def get_manifold(kind: "ManifoldKind | str") -> ManifoldModel:
    """
    Get the manifold model for a kind or its config name.

    Args:
        kind: A ManifoldKind or one of "circle", "sphere", "torus".

    Returns:
        The corresponding ManifoldModel.
    """
    if isinstance(kind, str):
        try:
            kind = ManifoldKind(kind.lower())
        except ValueError:
            names = ", ".join(k.value for k in ManifoldKind)
            raise ValueError(f"Unknown manifold: {kind!r} (expected one of {names})")
    return _MANIFOLDS[kind]


@dataclass(frozen=True)
class EigenPair:
    """One Laplace-Beltrami eigenpair; `label` identifies the analytic mode."""

    index: int
    eigenvalue: float
    label: tuple
    eigenfunction: Callable[[np.ndarray], np.ndarray]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.eigenfunction(points)


# 1-D Fourier modes on [0, 2*pi): (frequency, 0 for cos / 1 for sin).
def _fourier(mode: tuple[int, int], t: np.ndarray) -> np.ndarray:
    k, trig = mode
    if k == 0:
        return np.full_like(t, 1.0 / math.sqrt(2 * math.pi))
    wave = np.cos(k * t) if trig == 0 else np.sin(k * t)
    return wave / math.sqrt(math.pi)


def _fourier_modes(kmax: int) -> list[tuple[int, int]]:
    modes = [(0, 0)]
    for k in range(1, kmax + 1):
        modes += [(k, 0), (k, 1)]
    return modes


def _real_harmonic(l: int, m: int, polar: np.ndarray, azim: np.ndarray) -> np.ndarray:
    am = abs(m)
    log_norm = 0.5 * (
        math.log((2 * l + 1) / (4 * math.pi)) + gammaln(l - am + 1) - gammaln(l + am + 1)
    )
    legendre = lpmv(am, l, np.cos(polar)) * math.exp(log_norm)
    if m == 0:
        return legendre
    if m > 0:
        return math.sqrt(2) * legendre * np.cos(am * azim)
    return math.sqrt(2) * legendre * np.sin(am * azim)


def _mode_table(m: ManifoldModel, count: int) -> list[tuple[float, tuple]]:
    """First `count` (eigenvalue, label) pairs in canonical order."""
    if m.kind == ManifoldKind.CIRCLE:
        kmax = count // 2 + 1
        modes = [(float(k * k), (k, trig)) for k, trig in _fourier_modes(kmax)]
        return modes[:count]
    if m.kind == ManifoldKind.SPHERE:
        modes = []
        l = 0
        while len(modes) < count:
            modes += [(float(l * (l + 1)), (l, mm)) for mm in range(-l, l + 1)]
            l += 1
        return modes[:count]
    kmax = max(1, int(math.ceil(math.sqrt(count))))
    while True:
        base = _fourier_modes(kmax)
        modes = [
            (float(a[0] ** 2 + b[0] ** 2), (a, b)) for a in base for b in base
        ]
        # Only eigenvalues up to kmax**2 are complete at this kmax.
        modes = sorted(
            (mode for mode in modes if mode[0] <= kmax**2),
            key=lambda mode: (mode[0], mode[1]),
        )
        if len(modes) >= count:
            return modes[:count]
        kmax *= 2


def _mode_function(m: ManifoldModel, label: tuple) -> Callable[[np.ndarray], np.ndarray]:
    def eigenfunction(points: np.ndarray) -> np.ndarray:
        coords = m.intrinsic(points)
        if m.kind == ManifoldKind.CIRCLE:
            return _fourier(label, coords[:, 0])
        if m.kind == ManifoldKind.SPHERE:
            return _real_harmonic(label[0], label[1], coords[:, 0], coords[:, 1])
        return _fourier(label[0], coords[:, 0]) * _fourier(label[1], coords[:, 1])

    return eigenfunction


def lb_spectrum(m: ManifoldModel, M: int) -> list[EigenPair]:
    """
    First M Laplace-Beltrami eigenpairs in ascending order, with multiplicity.

    Within a multiplicity the order is canonical: cos before sin on the
    circle, lexicographic (l, m) on the sphere and lexicographic mode pairs
    on the torus.

    Args:
        m: The manifold.
        M: Number of eigenpairs, at least 1.

    Returns:
        List of EigenPair with 1-based indices.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return [
        EigenPair(i + 1, lam, label, _mode_function(m, label))
        for i, (lam, label) in enumerate(_mode_table(m, M))
    ]


def lb_eigenvalues(m: ManifoldModel, M: int) -> np.ndarray:
    """Eigenvalues of the first M modes."""
    return np.array([lam for lam, _ in _mode_table(m, M)])


def eval_basis(m: ManifoldModel, M: int, points: np.ndarray) -> np.ndarray:
    """Evaluate the first M eigenfunctions at points, shape (n, M)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    coords = m.intrinsic(points)
    table = _mode_table(m, M)
    basis = np.empty((points.shape[0], M))
    for j, (_, label) in enumerate(table):
        if m.kind == ManifoldKind.CIRCLE:
            basis[:, j] = _fourier(label, coords[:, 0])
        elif m.kind == ManifoldKind.SPHERE:
            basis[:, j] = _real_harmonic(label[0], label[1], coords[:, 0], coords[:, 1])
        else:
            basis[:, j] = _fourier(label[0], coords[:, 0]) * _fourier(
                label[1], coords[:, 1]
            )
    return basis


def sample_uniform(m: ManifoldModel, n: int, seed) -> "PointCloud":
    """
    Sample n points i.i.d. uniformly with respect to the volume measure.

    Args:
        m: The manifold.
        n: Number of points, at least 2.
        seed: Anything accepted by numpy.random.default_rng.

    Returns:
        PointCloud tagged with the manifold name.
    """
    from geognn.geograph.graph import PointCloud

    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    if m.kind == ManifoldKind.SPHERE:
        g = rng.standard_normal((n, 3))
        points = g / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        coords = rng.uniform(0.0, 2 * math.pi, size=(n, m.intrinsic_dim))
        points = m.embed(coords)
    return PointCloud(points, source=m.name)


__all__ = [
    "ManifoldKind",
    "ManifoldModel",
    "EigenPair",
    "get_manifold",
    "lb_spectrum",
    "lb_eigenvalues",
    "eval_basis",
    "sample_uniform",
]
