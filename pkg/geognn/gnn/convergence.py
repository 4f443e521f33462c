"""Graph-versus-manifold output difference of a filter-bank network."""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from geognn.filters.apply import filter_convergence_error
from geognn.geograph.graph import GeoGraph
from geognn.gnn.arch import GnnArch
from geognn.gnn.network import gnn_forward
from geognn.manifold.mnn import mnn_forward
from geognn.manifold.models import ManifoldModel
from geognn.manifold.signals import ManifoldSignal, sample_signal
from geognn.spectral.eig import Spectrum
from geognn.spectral.heat import default_spectrum


@dataclass(frozen=True)
class GnnConvergenceReport:
    """
    error: ||Phi(H, L_n, P_n f) - P_n Phi(H, L, f)|| in L2(G_n), over all
        output features.
    filter_errors: One array (F_l, F_{l-1}) per layer with the measured
        error of every filter on the realized manifold intermediates.
    layer_norms: L2(G_n) norms of the graph features of every layer.
    """

    error: float
    filter_errors: list = field(default_factory=list)
    layer_norms: list = field(default_factory=list)
    widths: tuple = ()

    @property
    def max_filter_error(self) -> float:
        return max((float(np.max(e)) for e in self.filter_errors), default=0.0)

    @property
    def bound_shape(self) -> float:
        """L F^(L-1) times the largest measured filter error."""
        L = len(self.widths) - 1
        F = max(self.widths[1:]) if L else 1
        return L * F ** (L - 1) * self.max_filter_error


def gnn_convergence_error(
    arch: GnnArch,
    g: GeoGraph,
    inputs: "ManifoldSignal | Sequence[ManifoldSignal]",
    m: ManifoldModel,
    M: int | None = None,
    spectrum: Spectrum | None = None,
    Q: int | None = None,
    allow_general_widths: bool = False,
) -> GnnConvergenceReport:
    """
    Compare the network on the graph with the manifold network, readout excluded.

    Args:
        arch: The architecture; single input and output feature unless
            `allow_general_widths` is set.
        g: The graph.
        inputs: F_0 manifold signals.
        m: The manifold.
        M: Truncation of the manifold side.
        spectrum: Eigenpairs of g.
        Q: Quadrature size of the manifold projections.
        allow_general_widths: Accept F_0 or F_L other than 1.
    """
    if not allow_general_widths and (arch.widths[0] != 1 or arch.widths[-1] != 1):
        raise ValueError(
            f"widths {arch.widths} need F_0 = F_L = 1; pass allow_general_widths=True"
        )
    signals = [inputs] if isinstance(inputs, ManifoldSignal) else list(inputs)
    spectrum = spectrum if spectrum is not None else default_spectrum(g)

    X = np.column_stack([sample_signal(s, g.cloud) for s in signals])
    graph_out, cache = gnn_forward(arch, g, X, spectrum, return_cache=True, readout=False)
    manifold_out, layers = mnn_forward(arch, signals, m, M, Q, return_layers=True)
    sampled = np.column_stack([sample_signal(s, g.cloud) for s in manifold_out])
    error = float(np.sqrt(np.sum((graph_out - sampled) ** 2) / g.n))

    filter_errors = []
    for l, layer_in in enumerate(layers[:-1]):
        errs = np.zeros(arch.banks[l].shape[:2])
        for q, signal in enumerate(layer_in):
            # Both sides filter the same signal: the coefficients the manifold network used.
            if signal.coeffs is not None:
                signal = ManifoldSignal(m, coeffs=signal.coeffs)
            for p in range(errs.shape[0]):
                errs[p, q] = filter_convergence_error(
                    arch.filter(l, p, q), g, signal, m, M, spectrum
                )
        filter_errors.append(errs)

    return GnnConvergenceReport(error, filter_errors, cache.layer_norms(), arch.widths)


__all__ = ["GnnConvergenceReport", "gnn_convergence_error"]
