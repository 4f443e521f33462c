"""Runtime configuration for geognn.

This module defines the numerical knobs used throughout the library.
Users can customize these values at runtime or by setting environment variables.
"""

import os
from dataclasses import dataclass


@dataclass
class SolverConfig:
    """Configuration for eigensolvers and heat-semigroup routes."""

    dense_eig_limit: int = 2000  # Largest n solved with dense LAPACK
    heat_modes: int = 64  # Modes kept by the truncated spectral route
    series_limit: int = 200  # Largest n for dense expm on the series route
    residual_tol: float = 1e-8  # Relative eigen-residual tolerance
    cluster_rtol: float = 1e-6  # Relative gap defining an eigenvalue cluster

    def __post_init__(self):
        """Load values from environment variables if present."""
        self.dense_eig_limit = int(
            os.getenv("GEOGNN_DENSE_EIG_LIMIT", self.dense_eig_limit)
        )
        self.heat_modes = int(os.getenv("GEOGNN_HEAT_MODES", self.heat_modes))
        self.series_limit = int(os.getenv("GEOGNN_SERIES_LIMIT", self.series_limit))
        self.residual_tol = float(
            os.getenv("GEOGNN_RESIDUAL_TOL", self.residual_tol)
        )
        self.cluster_rtol = float(
            os.getenv("GEOGNN_CLUSTER_RTOL", self.cluster_rtol)
        )


@dataclass
class QuadratureConfig:
    """Configuration for manifold-side quadrature and truncation."""

    nodes: int = 512  # Q, nodes per intrinsic dimension
    truncation: int = 25  # M, manifold modes kept by spectral signals

    def __post_init__(self):
        """Load values from environment variables if present."""
        self.nodes = int(os.getenv("GEOGNN_QUADRATURE", self.nodes))
        self.truncation = int(os.getenv("GEOGNN_TRUNCATION", self.truncation))


@dataclass
class ExecutionConfig:
    """Configuration for job execution and console output."""

    jobs: int = 0  # 0 means one worker per available core
    verbose: bool = True

    def __post_init__(self):
        """Load values from environment variables if present."""
        self.jobs = int(os.getenv("GEOGNN_JOBS", self.jobs))
        self.verbose = os.getenv("GEOGNN_VERBOSE", "1" if self.verbose else "0") != "0"

    @property
    def workers(self) -> int:
        """Effective worker count."""
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


@dataclass
class RuntimeConfig:
    """Master runtime configuration combining all settings."""

    solver: SolverConfig
    quadrature: QuadratureConfig
    execution: ExecutionConfig

    def __init__(self):
        """Initialize all runtime configurations."""
        self.solver = SolverConfig()
        self.quadrature = QuadratureConfig()
        self.execution = ExecutionConfig()


# Global runtime configuration instance
RUNTIME_CONFIG = RuntimeConfig()


def get_runtime_config() -> RuntimeConfig:
    """
    Get the global runtime configuration.

    Returns:
        The global RuntimeConfig instance.
    """
    return RUNTIME_CONFIG


def update_runtime_config(
    solver: SolverConfig | None = None,
    quadrature: QuadratureConfig | None = None,
    execution: ExecutionConfig | None = None,
) -> None:
    """
    Update the global runtime configuration.

    Args:
        solver: New solver configuration.
        quadrature: New quadrature configuration.
        execution: New execution configuration.

    Example:
        >>> from geognn.config.runtime import update_runtime_config, SolverConfig
        >>> update_runtime_config(solver=SolverConfig(dense_eig_limit=4000))
    """
    global RUNTIME_CONFIG
    if solver is not None:
        RUNTIME_CONFIG.solver = solver
    if quadrature is not None:
        RUNTIME_CONFIG.quadrature = quadrature
    if execution is not None:
        RUNTIME_CONFIG.execution = execution


__all__ = [
    "SolverConfig",
    "QuadratureConfig",
    "ExecutionConfig",
    "RuntimeConfig",
    "RUNTIME_CONFIG",
    "get_runtime_config",
    "update_runtime_config",
]
