"""Diffusion filter banks: coefficients, responses and application."""

from geognn.filters.apply import filter_convergence_error, graph_filter_apply, spectral_filter_apply
from geognn.filters.coeffs import (
    FdtReport,
    FilterCoeffs,
    LipschitzEstimate,
    LipschitzMethod,
    Provenance,
    fdt_check,
    filter_derivative_response,
    freq_response,
    heat_filter,
    lipschitz_estimate,
    lipschitz_report,
)

__all__ = [
    # Coefficients and responses
    "Provenance",
    "FilterCoeffs",
    "heat_filter",
    "freq_response",
    "filter_derivative_response",
    # Diagnostics
    "LipschitzMethod",
    "LipschitzEstimate",
    "lipschitz_estimate",
    "lipschitz_report",
    "FdtReport",
    "fdt_check",
    # Application
    "graph_filter_apply",
    "spectral_filter_apply",
    "filter_convergence_error",
]
