"""Heat semigroup e^{-tL} on graphs."""

from enum import Enum

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from geognn.config.runtime import get_runtime_config
from geognn.geograph.graph import GeoGraph
from geognn.spectral.eig import Spectrum, eig_sym


class HeatRoute(Enum):
    """How e^{-tL} x is evaluated."""

    SPECTRAL = "spectral"  # eigenpairs, tail damped at the largest computed mode
    SERIES = "series"  # scaling and squaring / Krylov action, used as oracle


def default_spectrum(g: GeoGraph) -> Spectrum:
    """The truncated spectrum used by the spectral route, k = min(n, heat_modes)."""
    return eig_sym(g, min(g.n, get_runtime_config().solver.heat_modes))


def spectral_response_apply(spectrum: Spectrum, response: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Apply a diagonal response in the eigenbasis.

    `response` holds the gain of every computed mode; the part of x outside
    the computed eigenspace receives the gain of the last mode.
    """
    coeffs = spectrum.coefficients(x)
    scaled = response.reshape((-1,) + (1,) * (coeffs.ndim - 1)) * coeffs
    y = spectrum.synthesize(scaled)
    if not spectrum.is_full:
        y = y + response[-1] * (x - spectrum.synthesize(coeffs))
    return y


def heat_apply(
    g: GeoGraph,
    t: float,
    x,
    route: HeatRoute = HeatRoute.SPECTRAL,
    spectrum: Spectrum | None = None,
) -> np.ndarray:
    """
    Compute e^{-tL} x.

    Args:
        g: The graph.
        t: Diffusion time, t >= 0.
        x: Graph signal (n,) or signal matrix (n, F).
        route: SPECTRAL (default) or SERIES.
        spectrum: Eigenpairs for the spectral route; computed with
            `default_spectrum` when omitted.

    Returns:
        Diffused signal with the shape of x.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    x = np.asarray(x, dtype=float)
    if x.shape[0] != g.n:
        raise ValueError(f"signal has {x.shape[0]} rows for {g.n} nodes")
    if t == 0:
        return x.copy()

    if route == HeatRoute.SERIES:
        if g.n <= get_runtime_config().solver.series_limit:
            return scipy.linalg.expm(-t * g.dense_laplacian()) @ x
        return expm_multiply(-t * g.laplacian, x)

    spectrum = spectrum if spectrum is not None else default_spectrum(g)
    return spectral_response_apply(spectrum, np.exp(-t * spectrum.eigenvalues), x)


def heat_tail_bound(spectrum: Spectrum, t: float, x) -> float:
    """
    Bound e^{-t lambda_k} ||x - V V^T x / n|| on the error of the spectral
    route from the modes beyond the computed ones; 0 for a full spectrum.
    """
    if spectrum.is_full:
        return 0.0
    x = np.asarray(x, dtype=float)
    residual = x - spectrum.synthesize(spectrum.coefficients(x))
    norm = np.sqrt(np.sum(residual**2) / spectrum.n)
    return float(np.exp(-t * spectrum.lambda_max) * norm)


__all__ = [
    "HeatRoute",
    "default_spectrum",
    "spectral_response_apply",
    "heat_apply",
    "heat_tail_bound",
]
