"""Configuration module for geognn."""

from geognn.config.i18n import get_message, get_messages
from geognn.config.runtime import (
    RUNTIME_CONFIG,
    ExecutionConfig,
    QuadratureConfig,
    RuntimeConfig,
    SolverConfig,
    get_runtime_config,
    update_runtime_config,
)
from geognn.config.sweep import (
    ArchSpec,
    ClassifySpec,
    KernelSpec,
    SweepConfig,
    TrainSpec,
    TransferSpec,
)

__all__ = [
    # Runtime knobs
    "SolverConfig",
    "QuadratureConfig",
    "ExecutionConfig",
    "RuntimeConfig",
    "RUNTIME_CONFIG",
    "get_runtime_config",
    "update_runtime_config",
    # Run configuration
    "SweepConfig",
    "KernelSpec",
    "ArchSpec",
    "TrainSpec",
    "TransferSpec",
    "ClassifySpec",
    # i18n
    "get_messages",
    "get_message",
]
