"""Geometric graph neural networks built from diffusion filter banks."""

from geognn.gnn.arch import ArchFamily, GnnArch, Nonlinearity, Readout
from geognn.gnn.convergence import GnnConvergenceReport, gnn_convergence_error
from geognn.gnn.network import (
    ForwardCache,
    bank_apply,
    filter_penalty,
    gnn_backward,
    gnn_forward,
    penalty_grid,
)
from geognn.gnn.train import (
    EpochRecord,
    GraphSample,
    Loss,
    Optimizer,
    TrainConfig,
    TrainResult,
    accuracy,
    dataset_loss,
    loss_and_grad,
    predict,
    readout_retrain,
    train,
)

__all__ = [
    # Architecture
    "Nonlinearity",
    "ArchFamily",
    "Readout",
    "GnnArch",
    # Forward / backward
    "ForwardCache",
    "bank_apply",
    "gnn_forward",
    "gnn_backward",
    "penalty_grid",
    "filter_penalty",
    # Training
    "Loss",
    "Optimizer",
    "TrainConfig",
    "GraphSample",
    "EpochRecord",
    "TrainResult",
    "loss_and_grad",
    "predict",
    "accuracy",
    "dataset_loss",
    "train",
    "readout_retrain",
    # Convergence
    "GnnConvergenceReport",
    "gnn_convergence_error",
]
