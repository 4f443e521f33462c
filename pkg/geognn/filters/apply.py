"""Graph filter application and the filter convergence metric."""

import numpy as np

from geognn.filters.coeffs import FilterCoeffs
from geognn.geograph.graph import GeoGraph
from geognn.geograph.operators import graph_norm
from geognn.manifold.mnn import manifold_filter_apply
from geognn.manifold.models import ManifoldModel
from geognn.manifold.signals import ManifoldSignal, sample_signal
from geognn.spectral.eig import Spectrum
from geognn.spectral.heat import HeatRoute, default_spectrum, heat_apply, spectral_response_apply


def graph_filter_apply(
    h: FilterCoeffs,
    g: GeoGraph,
    x,
    spectrum: Spectrum | None = None,
    route: HeatRoute = HeatRoute.SPECTRAL,
) -> np.ndarray:
    """
    Diffusion-route filtering sum_k h_k e^{-k T_s L} x.

    Args:
        h: Filter coefficients.
        g: The graph.
        x: Graph signal (n,) or (n, F).
        spectrum: Eigenpairs shared by all diffusion terms of the spectral route.
        route: Heat route of every term.

    Returns:
        Filtered signal with the shape of x.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != g.n:
        raise ValueError(f"signal has {x.shape[0]} rows for {g.n} nodes")
    if route == HeatRoute.SPECTRAL and spectrum is None:
        spectrum = default_spectrum(g)
    y = np.zeros_like(x)
    for k, hk in enumerate(h.h):
        if hk != 0.0:
            y += hk * heat_apply(g, k * h.T_s, x, route=route, spectrum=spectrum)
    return y


def spectral_filter_apply(h: FilterCoeffs, spectrum: Spectrum, x) -> np.ndarray:
    """
    Filtering in the graph eigenbasis, sum_i h(lambda_i) <x, phi_i> phi_i.

    With a truncated spectrum the remaining part of x is scaled by the
    response at the largest computed eigenvalue.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != spectrum.n:
        raise ValueError(f"signal has {x.shape[0]} rows for {spectrum.n} nodes")
    return spectral_response_apply(spectrum, h.response(spectrum.eigenvalues), x)


def filter_convergence_error(
    h: FilterCoeffs,
    g: GeoGraph,
    f: ManifoldSignal,
    m: ManifoldModel,
    M: int | None = None,
    spectrum: Spectrum | None = None,
) -> float:
    """
    ||h(L) P_n f - P_n h(L_M) f|| in L2(G_n).

    The graph side filters the sampled signal; the manifold side filters f
    in its first M modes and is then sampled on the same cloud.
    """
    x = sample_signal(f, g.cloud)
    on_graph = graph_filter_apply(h, g, x, spectrum=spectrum)
    on_manifold = sample_signal(manifold_filter_apply(h, f, m, M), g.cloud)
    return graph_norm(on_graph - on_manifold)


__all__ = ["graph_filter_apply", "spectral_filter_apply", "filter_convergence_error"]
