"""Forward and backward passes of filter-bank GNNs on a graph spectrum."""

from dataclasses import dataclass, field

import numpy as np

from geognn.errors import StaleCacheError
from geognn.geograph.graph import GeoGraph
from geognn.gnn.arch import GnnArch
from geognn.spectral.eig import Spectrum
from geognn.spectral.heat import default_spectrum


@dataclass(eq=False)
class ForwardCache:
    """Intermediates of one forward pass, tied to an arch version and a graph."""

    arch_id: int
    arch_version: int
    graph: GeoGraph
    spectrum: Spectrum
    inputs: np.ndarray
    layer_inputs: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    pre_activations: list = field(default_factory=list)
    features: np.ndarray | None = None
    output: np.ndarray | None = None
    with_readout: bool = False

    def layer_norms(self) -> list[np.ndarray]:
        """L2(G_n) norm of every feature of every layer, inputs first."""
        n = self.spectrum.n
        signals = self.layer_inputs + [self.features]
        return [np.sqrt(np.sum(x**2, axis=0) / n) for x in signals]


def _exp_tables(spectrum: Spectrum, K_t: int, T_s: float):
    """exp(-k T_s lambda_i) for every computed mode and the tail gains (or None)."""
    E = np.exp(-T_s * np.outer(spectrum.eigenvalues, np.arange(K_t)))
    tail = None if spectrum.is_full else E[-1]
    return E, tail


def _as_matrix(X, n: int, width: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape != (n, width):
        raise ValueError(f"input has shape {X.shape}, expected ({n}, {width})")
    return X


def bank_apply(bank: np.ndarray, spectrum: Spectrum, X: np.ndarray, T_s: float):
    """
    Z^p = sum_q h^{pq}(L) X^q on the spectrum.

    Returns:
        (Z, coeffs, residual, E, tail) with the intermediates needed for
        the backward pass.
    """
    E, tail = _exp_tables(spectrum, bank.shape[2], T_s)
    C = spectrum.coefficients(X)
    response = np.einsum("pqk,ik->ipq", bank, E)
    Z = spectrum.synthesize(np.einsum("ipq,iq->ip", response, C))
    residual = None
    if tail is not None:
        residual = X - spectrum.synthesize(C)
        Z = Z + residual @ np.einsum("pqk,k->pq", bank, tail).T
    return Z, C, residual, E, tail


def gnn_forward(
    arch: GnnArch,
    g: GeoGraph,
    X,
    spectrum: Spectrum | None = None,
    return_cache: bool = False,
    readout: bool = True,
):
    """
    Evaluate the network on a graph.

    Args:
        arch: The architecture.
        g: The graph.
        X: Input signals (n, F_0); a vector is accepted when F_0 = 1.
        spectrum: Eigenpairs of g; `default_spectrum(g)` when omitted.
        return_cache: Also return the ForwardCache for gnn_backward.
        readout: Apply the readout when the architecture has one.

    Returns:
        Output (n, F_L), the readout output, or (output, cache).
    """
    spectrum = spectrum if spectrum is not None else default_spectrum(g)
    if spectrum.n != g.n:
        raise ValueError(f"spectrum has {spectrum.n} nodes, graph has {g.n}")
    X = _as_matrix(X, g.n, arch.widths[0])
    cache = ForwardCache(id(arch), arch.version, g, spectrum, X)

    current = X
    for bank in arch.banks:
        Z, C, residual, _, _ = bank_apply(bank, spectrum, current, arch.T_s)
        cache.layer_inputs.append(current)
        cache.coeffs.append(C)
        cache.residuals.append(residual)
        cache.pre_activations.append(Z)
        current = arch.nonlinearity.apply(Z)
    cache.features = current

    output = current
    if readout and arch.readout is not None:
        output = arch.readout.apply(current)
        cache.with_readout = True
    cache.output = output
    if return_cache:
        return output, cache
    return output


def penalty_grid(spectrum: Spectrum, size: int = 64) -> np.ndarray:
    """Uniform grid on [0, largest computed eigenvalue]."""
    return np.linspace(0.0, max(spectrum.lambda_max, 0.0), size)


def filter_penalty(arch: GnnArch, grid: np.ndarray, weight: float):
    """
    Smoothness penalty weight * sum over filters of mean_grid h'(lambda)^2.

    Returns:
        (value, {bank name: gradient}).
    """
    grads = {}
    value = 0.0
    for l, bank in enumerate(arch.banks):
        k = np.arange(bank.shape[2])
        D = -arch.T_s * k * np.exp(-arch.T_s * np.outer(grid, k))
        deriv = np.einsum("pqk,gk->gpq", bank, D)
        value += weight * float(np.sum(np.mean(deriv**2, axis=0)))
        grads[f"bank{l}"] = weight * 2.0 / grid.size * np.einsum("gpq,gk->pqk", deriv, D)
    return value, grads


def gnn_backward(
    arch: GnnArch,
    g: GeoGraph,
    X,
    loss_grad,
    cache: ForwardCache,
    penalty_weight: float = 0.0,
    grid: np.ndarray | None = None,
) -> dict[str, np.ndarray]:
    """
    Exact gradients of loss + penalty_weight * filter_penalty.

    Args:
        arch: The architecture the cache was computed with.
        g: The graph of the forward pass.
        X: The forward inputs.
        loss_grad: d loss / d output, shaped like the forward output.
        cache: Cache from gnn_forward(..., return_cache=True).
        penalty_weight: C_L.
        grid: Penalty grid; `penalty_grid(cache.spectrum)` when omitted.

    Returns:
        Gradients keyed like `arch.parameters()`.

    Raises:
        StaleCacheError: The cache belongs to another arch version, graph or input.
    """
    if cache.arch_id != id(arch) or cache.arch_version != arch.version:
        raise StaleCacheError("forward cache was computed with different parameters")
    if cache.graph is not g:
        raise StaleCacheError("forward cache was computed on a different graph")
    X = _as_matrix(X, g.n, arch.widths[0])
    if not np.array_equal(X, cache.inputs):
        raise StaleCacheError("forward cache was computed on different inputs")

    spectrum = cache.spectrum
    V, n = spectrum.eigenvectors, spectrum.n
    dOut = np.asarray(loss_grad, dtype=float).reshape(np.shape(cache.output))
    grads: dict[str, np.ndarray] = {}

    dX = dOut
    if cache.with_readout:
        feats = arch.readout.features(cache.features)
        grads["readout.W"] = feats.T @ dOut
        grads["readout.b"] = dOut.sum(axis=0)
        dFeat = dOut @ arch.readout.W.T
        if arch.readout.pool:
            dX = np.repeat(dFeat / n, n, axis=0)
        else:
            dX = dFeat

    for l in range(arch.L - 1, -1, -1):
        bank = arch.banks[l]
        dZ = dX * arch.nonlinearity.derivative(cache.pre_activations[l])
        E, tail = _exp_tables(spectrum, bank.shape[2], arch.T_s)
        C = cache.coeffs[l]
        dA = V.T @ dZ
        response = np.einsum("pqk,ik->ipq", bank, E)
        dH = np.einsum("ip,ik,iq->pqk", dA, E, C)
        dC = np.einsum("ip,ipq->iq", dA, response)
        dX = V @ dC / n
        if tail is not None:
            R = cache.residuals[l]
            dT = dZ.T @ R
            dH = dH + dT[:, :, None] * tail[None, None, :]
            dR = dZ @ np.einsum("pqk,k->pq", bank, tail)
            dX = dX + dR - V @ (V.T @ dR) / n
        grads[f"bank{l}"] = dH

    if penalty_weight > 0:
        grid = penalty_grid(spectrum) if grid is None else grid
        _, penalty_grads = filter_penalty(arch, grid, penalty_weight)
        for name, value in penalty_grads.items():
            grads[name] = grads[name] + value
    return grads


__all__ = [
    "ForwardCache",
    "bank_apply",
    "gnn_forward",
    "penalty_grid",
    "filter_penalty",
    "gnn_backward",
]
