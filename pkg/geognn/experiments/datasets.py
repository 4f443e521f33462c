"""Synthetic tasks: point-cloud classification and manifold signal regression."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from geognn.filters.coeffs import FilterCoeffs, heat_filter
from geognn.geograph.graph import GeoGraph, PointCloud, build_graph
from geognn.geograph.kernels import KernelConfig
from geognn.gnn.train import GraphSample
from geognn.manifold.mnn import manifold_filter_apply
from geognn.manifold.models import ManifoldModel, get_manifold, sample_uniform
from geognn.manifold.signals import ManifoldSignal, sample_signal
from geognn.spectral.eig import Spectrum
from geognn.spectral.heat import default_spectrum

SHAPES = ("sphere", "torus")
RING_RADIUS = 1.0
TUBE_RADIUS = 0.4
MIN_CLOUD_SIZE = 50


def cell_seed(seed: int, *keys: int) -> np.random.SeedSequence:
    """The one entropy source of a job cell, e.g. cell_seed(seed, n)."""
    return np.random.SeedSequence([int(seed), *(int(k) for k in keys)])


def ring_torus_points(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Area-uniform samples of the ring torus in R^3 (radii 1 and 0.4).

    The tube angle v has density proportional to R + r cos v and is drawn by
    rejection.
    """
    u = rng.uniform(0.0, 2 * math.pi, size=n)
    v = np.empty(n)
    filled = 0
    bound = RING_RADIUS + TUBE_RADIUS
    while filled < n:
        cand = rng.uniform(0.0, 2 * math.pi, size=2 * (n - filled))
        keep = cand[rng.uniform(0.0, bound, size=cand.size) < RING_RADIUS + TUBE_RADIUS * np.cos(cand)]
        take = keep[: n - filled]
        v[filled:filled + take.size] = take
        filled += take.size
    ring = RING_RADIUS + TUBE_RADIUS * np.cos(v)
    return np.column_stack([ring * np.cos(u), ring * np.sin(u), TUBE_RADIUS * np.sin(v)])


def _shape_points(shape: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if shape == "sphere":
        g = rng.standard_normal((n, 3))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    if shape == "torus":
        return ring_torus_points(n, rng)
    raise ValueError(f"unknown shape {shape!r}, expected one of {SHAPES}")


@dataclass
class LabeledCloud:
    cloud: PointCloud
    label: int
    shape: str


def synth_pointcloud_task(
    n: int,
    clouds_per_class: int,
    seed: int,
    shapes: tuple[str, ...] = SHAPES,
) -> list[LabeledCloud]:
    """
    Balanced labeled point clouds, one class per shape.

    Every cloud gets a random rotation and a scale drawn from U[0.9, 1.1]
    before its points are drawn, so the same seed with a larger n yields the
    same poses with denser sampling.

    Args:
        n: Points per cloud, at least 50.
        clouds_per_class: Clouds generated for every shape.
        seed: Dataset seed.
        shapes: Shape names; the label is the index in this tuple.

    Returns:
        List of labeled clouds ordered class by class.
    """
    if n < MIN_CLOUD_SIZE:
        raise ValueError(f"clouds need n >= {MIN_CLOUD_SIZE}, got {n}")
    if clouds_per_class < 1:
        raise ValueError(f"clouds_per_class must be >= 1, got {clouds_per_class}")
    dataset = []
    for label, shape in enumerate(shapes):
        for i in range(clouds_per_class):
            pose_seq, points_seq = cell_seed(seed, label, i).spawn(2)
            pose_rng = np.random.default_rng(pose_seq)
            rotation = Rotation.random(None, pose_rng)
            scale = pose_rng.uniform(0.9, 1.1)
            points = _shape_points(shape, n, np.random.default_rng(points_seq))
            cloud = PointCloud(scale * rotation.apply(points), source=shape)
            dataset.append(LabeledCloud(cloud, label, shape))
    return dataset


def split_indices(count: int, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Stratification-free train/test split; at least one item on each side when possible."""
    order = np.random.default_rng(cell_seed(seed, count)).permutation(count)
    n_test = min(max(1, round(test_fraction * count)), count - 1) if count > 1 else 0
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def to_samples(task: list[LabeledCloud], kernel: KernelConfig) -> list[GraphSample]:
    """Graph-level samples: coordinates as F_0 = 3 inputs, class index as target."""
    samples = []
    for item in task:
        g = build_graph(item.cloud, kernel)
        samples.append(
            GraphSample(g, np.asarray(item.cloud.points), np.array([item.label]), default_spectrum(g))
        )
    return samples


@dataclass
class RegressionTask:
    """
    Node-level regression on a manifold: inputs are band-limited signals f,
    targets are P_n h(L) f for a fixed heat filter h.
    """

    manifold: ManifoldModel
    signals: list
    target_filter: FilterCoeffs
    truncation: int
    meta: dict = field(default_factory=dict)

    def targets(self) -> list[ManifoldSignal]:
        return [
            manifold_filter_apply(self.target_filter, f, self.manifold, self.truncation)
            for f in self.signals
        ]

    def samples(self, g: GeoGraph, spectrum: Spectrum | None = None) -> list[GraphSample]:
        spectrum = spectrum if spectrum is not None else default_spectrum(g)
        return [
            GraphSample(
                g,
                sample_signal(f, g.cloud)[:, None],
                sample_signal(y, g.cloud)[:, None],
                spectrum,
            )
            for f, y in zip(self.signals, self.targets())
        ]


def band_limited_signals(
    m: ManifoldModel, count: int, bandwidth: int, M: int, seed
) -> list[ManifoldSignal]:
    """Random signals in the first `bandwidth` modes with RMS value 1 over the manifold."""
    if not 1 <= bandwidth <= M:
        raise ValueError(f"bandwidth must lie in [1, {M}], got {bandwidth}")
    rng = np.random.default_rng(seed)
    signals = []
    for _ in range(count):
        coeffs = np.zeros(M)
        draw = rng.standard_normal(bandwidth)
        coeffs[:bandwidth] = draw / np.linalg.norm(draw) * math.sqrt(m.volume)
        signals.append(ManifoldSignal.from_coeffs(m, coeffs))
    return signals


def regression_task(
    m: "ManifoldModel | str",
    count: int,
    seed,
    bandwidth: int = 9,
    target_time: float = 0.5,
    M: int = 25,
) -> RegressionTask:
    m = get_manifold(m) if isinstance(m, str) else m
    signals = band_limited_signals(m, count, bandwidth, M, seed)
    return RegressionTask(
        m, signals, heat_filter(target_time), M,
        meta={"bandwidth": bandwidth, "target_time": target_time},
    )


def manifold_graph(
    m: ManifoldModel, n: int, seed: int, kernel: KernelConfig
) -> tuple[GeoGraph, Spectrum]:
    """Graph on a fresh uniform sample seeded by (seed, n), with its default spectrum."""
    g = build_graph(sample_uniform(m, n, cell_seed(seed, n)), kernel)
    return g, default_spectrum(g)


__all__ = [
    "SHAPES",
    "cell_seed",
    "ring_torus_points",
    "LabeledCloud",
    "synth_pointcloud_task",
    "split_indices",
    "to_samples",
    "RegressionTask",
    "band_limited_signals",
    "regression_task",
    "manifold_graph",
]
