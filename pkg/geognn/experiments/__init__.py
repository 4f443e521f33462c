"""Experiment drivers: convergence sweeps, transferability and classification."""

from geognn.experiments.classify import REFERENCE_SHAPE, classify_experiment, family_order
from geognn.experiments.datasets import (
    LabeledCloud,
    RegressionTask,
    band_limited_signals,
    cell_seed,
    manifold_graph,
    regression_task,
    ring_torus_points,
    split_indices,
    synth_pointcloud_task,
    to_samples,
)
from geognn.experiments.manifest import MANIFEST_NAME, RunManifest
from geognn.experiments.off import off_load, parse_off
from geognn.experiments.oracle import (
    CheckOutcome,
    OracleResult,
    check_oracle,
    load_fixtures,
    regen_oracle,
)
from geognn.experiments.plots import plot_medians
from geognn.experiments.results import CELL_ERROR, ErrorCurve, ErrorRow
from geognn.experiments.sweeps import (
    DenseSparseReport,
    convergence_sweep,
    densevs_sparse_report,
    kernel_config,
    penalty_sweep,
    off_graph,
    spectrum_graph,
    sweep_arch,
    sweep_filter,
    train_regression,
)
from geognn.experiments.transfer import TransferMode, interpolation_distance, transferability_eval

__all__ = [
    # Results
    "ErrorRow",
    "ErrorCurve",
    "CELL_ERROR",
    # Datasets
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
    "parse_off",
    "off_load",
    # Sweeps
    "kernel_config",
    "sweep_arch",
    "sweep_filter",
    "train_regression",
    "convergence_sweep",
    "DenseSparseReport",
    "densevs_sparse_report",
    "penalty_sweep",
    "spectrum_graph",
    "off_graph",
    "TransferMode",
    "interpolation_distance",
    "transferability_eval",
    "REFERENCE_SHAPE",
    "family_order",
    "classify_experiment",
    # Acceptance and outputs
    "CheckOutcome",
    "OracleResult",
    "load_fixtures",
    "check_oracle",
    "regen_oracle",
    "plot_medians",
    "RunManifest",
    "MANIFEST_NAME",
]
