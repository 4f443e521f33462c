"""Transferability of a trained network across graphs sampled from one manifold."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from geognn.config.sweep import SweepConfig
from geognn.experiments.datasets import band_limited_signals, cell_seed, manifold_graph, regression_task
from geognn.experiments.results import CELL_ERROR, ErrorCurve, ErrorRow
from geognn.experiments.sweeps import kernel_config, resolve_workers, run_cells
from geognn.geograph.operators import interpolate
from geognn.gnn.arch import GnnArch, Nonlinearity
from geognn.gnn.network import gnn_forward
from geognn.gnn.train import Loss, TrainConfig, dataset_loss, readout_retrain, train
from geognn.manifold.models import ManifoldModel, get_manifold
from geognn.manifold.signals import quadrature_grid, sample_signal


class TransferMode(Enum):
    FROZEN = "frozen"
    READOUT_RETRAIN = "readout_retrain"


def interpolation_distance(y1, cloud1, y2, cloud2, m: ManifoldModel, Q: int) -> float:
    """||I_{n1} y1 - I_{n2} y2|| over the manifold, by quadrature."""
    nodes, weights = quadrature_grid(m, Q)
    diff = interpolate(y1, cloud1, m)(nodes) - interpolate(y2, cloud2, m)(nodes)
    return math.sqrt(float(np.sum(weights * diff**2)))


@dataclass
class _TransferJob:
    cfg: SweepConfig
    manifold: ManifoldModel
    mode: TransferMode
    label: str
    kernel: object
    config_hash: str

    def row(self, n2, seed, eps, metric, value, note=""):
        return ErrorRow(n2, seed, float(eps), self.label, metric, float(value), self.cfg.truncation,
                        self.config_hash, param=float(self.cfg.transfer.n_train), note=note)

    def failure_row(self, seed, exc) -> ErrorRow:
        return self.row(self.cfg.transfer.n_train, seed, math.nan, CELL_ERROR, math.nan,
                        f"{type(exc).__name__}: {exc}")

    def trained(self, seed: int):
        """Network trained on the n_1 graph of a seed, with that graph."""
        cfg, t, m = self.cfg, self.cfg.train, self.manifold
        n1 = cfg.transfer.n_train
        g1, spec1 = manifold_graph(m, n1, seed, self.kernel)
        task = regression_task(m, t.samples, cell_seed(seed, n1, 1), t.bandwidth, t.target_time,
                               cfg.truncation)
        out_dim = 1 if self.mode == TransferMode.READOUT_RETRAIN else None
        arch = GnnArch.random(cfg.arch.widths, cfg.arch.K_t, cell_seed(seed, cfg.arch.seed),
                              Nonlinearity(cfg.arch.nonlinearity), out_dim=out_dim, T_s=cfg.arch.T_s)
        result = train(arch, task.samples(g1, spec1), TrainConfig(
            loss=Loss.MSE, optimizer=t.optimizer, learning_rate=t.learning_rate, epochs=t.epochs,
            batch_size=t.batch_size, penalty_weight=t.penalty_weight, seed=t.seed,
        ))
        return result.arch, task, g1, spec1

    def __call__(self, seed: int) -> list[ErrorRow]:
        cfg, m = self.cfg, self.manifold
        arch, task, g1, spec1 = self.trained(seed)
        tests = band_limited_signals(m, cfg.transfer.signals, cfg.train.bandwidth, cfg.truncation,
                                     cell_seed(seed, 2))
        outputs1 = [gnn_forward(arch, g1, sample_signal(f, g1.cloud), spec1)[:, 0] for f in tests]
        rows = []
        for n2 in cfg.transfer.n_targets:
            same = n2 == cfg.transfer.n_train
            g2, spec2 = (g1, spec1) if same else manifold_graph(m, n2, seed, self.kernel)
            samples2 = task.samples(g2, spec2)
            arch2 = arch
            if self.mode == TransferMode.READOUT_RETRAIN and not same:
                arch2 = readout_retrain(arch, samples2, Loss.MSE)
            diffs = [
                interpolation_distance(
                    y1, g1.cloud,
                    gnn_forward(arch2, g2, sample_signal(f, g2.cloud), spec2)[:, 0], g2.cloud,
                    m, cfg.transfer.quadrature,
                )
                for f, y1 in zip(tests, outputs1)
            ]
            rows.append(self.row(n2, seed, g2.eps, "transfer_diff", float(np.mean(diffs))))
            rows.append(self.row(n2, seed, g2.eps, "target_loss", dataset_loss(arch2, samples2, Loss.MSE)))
        return rows


def transferability_eval(
    cfg: SweepConfig,
    mode: "TransferMode | str | None" = None,
    jobs: int | None = None,
    verbose: bool = False,
) -> ErrorCurve:
    """
    Train on an n_1 graph per seed and run the network on n_2 graphs.

    The output difference is measured on the manifold through nearest-sample
    interpolation of both outputs. Rows carry n_2 in `n` and n_1 in `param`.
    An n_2 equal to n_1 reuses the training graph and the trained readout of
    the seed, giving 0 in both modes.

    Args:
        cfg: Run configuration; `transfer` and `train` sections apply.
        mode: Frozen network, or readout refit on every n_2 graph other than n_1.
        jobs: Worker threads.
        verbose: Print failed cells.
    """
    mode = TransferMode(mode or cfg.transfer.mode) if not isinstance(mode, TransferMode) else mode
    m = get_manifold(cfg.manifold)
    spec = cfg.kernels[0]
    job = _TransferJob(cfg, m, mode, spec.label, kernel_config(spec, m), cfg.config_hash())
    rows = run_cells(list(cfg.seeds), job, resolve_workers(jobs, cfg), verbose)
    return ErrorCurve(rows, job.config_hash).sorted()


__all__ = ["TransferMode", "interpolation_distance", "transferability_eval"]
