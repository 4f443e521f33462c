"""Sphere-versus-torus point-cloud classification with three architecture families."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from geognn.config.sweep import SweepConfig
from geognn.errors import SoftAssertionWarning
from geognn.experiments.datasets import split_indices, synth_pointcloud_task, to_samples
from geognn.experiments.results import CELL_ERROR, ErrorCurve, ErrorRow
from geognn.experiments.sweeps import kernel_config, resolve_workers, run_cells
from geognn.geograph.kernels import KernelConfig
from geognn.gnn.arch import ArchFamily, GnnArch
from geognn.gnn.train import Loss, TrainConfig, accuracy, readout_retrain, train
from geognn.manifold.models import get_manifold

# The classification kernel is calibrated against the sphere.
REFERENCE_SHAPE = "sphere"


def family_order(curve: ErrorCurve, metric: str = "test_accuracy") -> bool:
    """
    Soft check that median accuracy satisfies lipschitz_gnn >= gnn >= graph_filter.

    Families missing from the curve are skipped. A violated pair raises a
    SoftAssertionWarning and makes the result False.
    """
    medians = {}
    for family in ArchFamily:
        values = [r.value for r in curve.select(metric, family.value)]
        if values:
            medians[family] = float(np.median(values))
    chain = [f for f in (ArchFamily.LIPSCHITZ_GNN, ArchFamily.GNN, ArchFamily.GRAPH_FILTER) if f in medians]
    ok = True
    for better, worse in zip(chain, chain[1:]):
        if medians[better] < medians[worse]:
            ok = False
            warnings.warn(
                f"median {metric} of {better.value} ({medians[better]:.3f}) is below "
                f"{worse.value} ({medians[worse]:.3f})",
                SoftAssertionWarning,
                stacklevel=2,
            )
    return ok


def _pick(data: list, idx) -> list:
    return [data[i] for i in idx]


@dataclass
class _ClassifyJob:
    cfg: SweepConfig
    kernel: KernelConfig
    config_hash: str

    def row(self, n, seed, eps, family, metric, value, note=""):
        return ErrorRow(n, seed, float(eps), family, metric, float(value), self.cfg.truncation,
                        self.config_hash, note=note)

    def failure_row(self, seed, exc) -> ErrorRow:
        return self.row(self.cfg.classify.n, seed, math.nan, "all", CELL_ERROR, math.nan,
                        f"{type(exc).__name__}: {exc}")

    def __call__(self, seed: int) -> list[ErrorRow]:
        c = self.cfg.classify
        train_idx, test_idx = split_indices(2 * c.clouds_per_class, c.test_fraction, seed)
        small = to_samples(synth_pointcloud_task(c.n, c.clouds_per_class, seed), self.kernel)
        large = to_samples(synth_pointcloud_task(c.n_transfer, c.clouds_per_class, seed), self.kernel)
        eps_small, eps_large = small[0].graph.eps, large[0].graph.eps

        rows = []
        for name in c.families:
            family = ArchFamily(name)
            arch = GnnArch.random(c.widths, c.K_t, seed, family.nonlinearity, out_dim=2, pool=True)
            result = train(arch, _pick(small, train_idx), TrainConfig(
                loss=Loss.CROSS_ENTROPY,
                learning_rate=c.learning_rate,
                epochs=c.epochs,
                batch_size=c.batch_size,
                penalty_weight=c.penalty_weight if family.penalized else 0.0,
                seed=seed,
            ))
            trained = result.arch
            retrained = readout_retrain(trained, _pick(large, train_idx), Loss.CROSS_ENTROPY)
            rows += [
                self.row(c.n, seed, eps_small, name, "train_loss", result.history[-1].loss),
                self.row(c.n, seed, eps_small, name, "test_accuracy", accuracy(trained, _pick(small, test_idx))),
                self.row(c.n_transfer, seed, eps_large, name, "transfer_accuracy_frozen",
                         accuracy(trained, _pick(large, test_idx))),
                self.row(c.n_transfer, seed, eps_large, name, "transfer_accuracy_retrained",
                         accuracy(retrained, _pick(large, test_idx))),
            ]
        return rows


def classify_experiment(cfg: SweepConfig, jobs: int | None = None, verbose: bool = False) -> ErrorCurve:
    """
    Train every configured family per seed on n-point clouds and evaluate it
    on held-out clouds, on the same poses resampled with n_transfer points
    (frozen), and after refitting the readout on the large training clouds.

    Rows use the family name in the `kernel` column.
    """
    kernel = kernel_config(cfg.classify.kernel, get_manifold(REFERENCE_SHAPE))
    job = _ClassifyJob(cfg, kernel, cfg.config_hash())
    rows = run_cells(list(cfg.seeds), job, resolve_workers(jobs, cfg), verbose)
    return ErrorCurve(rows, job.config_hash).sorted()


__all__ = ["REFERENCE_SHAPE", "family_order", "classify_experiment"]
