"""Spectral manifold filtering and manifold neural network evaluation."""

from typing import TYPE_CHECKING, Sequence

import numpy as np

from geognn.config.runtime import get_runtime_config
from geognn.manifold.models import ManifoldModel, eval_basis, lb_eigenvalues
from geognn.manifold.signals import ManifoldSignal, project

if TYPE_CHECKING:
    from geognn.filters.coeffs import FilterCoeffs
    from geognn.gnn.arch import GnnArch


def _coeffs_up_to(f: ManifoldSignal, M: int, Q: int | None) -> np.ndarray:
    if f.coeffs is None:
        return project(f, M, Q).coeffs
    if f.coeffs.size < M:
        raise ValueError(f"signal has {f.coeffs.size} coefficients, truncation needs {M}")
    return f.coeffs[:M]


def manifold_filter_apply(
    h: "FilterCoeffs", f: ManifoldSignal, m: ManifoldModel, M: int | None = None
) -> ManifoldSignal:
    """
    Apply h(L) to a manifold signal in the eigenbasis.

    Args:
        h: Filter coefficients.
        f: Input signal; callables are projected onto M modes first.
        m: The manifold.
        M: Truncation, defaults to the runtime truncation.

    Returns:
        Spectral signal sum_i h(lambda_i) f_i phi_i with `truncation == M`.
    """
    M = M or get_runtime_config().quadrature.truncation
    if M < 1:
        raise ValueError(f"truncation must be >= 1, got {M}")
    coeffs = _coeffs_up_to(f, M, None)
    response = h.response(lb_eigenvalues(m, M))
    return ManifoldSignal(m, coeffs=response * coeffs)


def mnn_forward(
    arch: "GnnArch",
    f: "ManifoldSignal | Sequence[ManifoldSignal]",
    m: ManifoldModel,
    M: int | None = None,
    Q: int | None = None,
    return_layers: bool = False,
):
    """
    Run the filter-bank layers of an architecture on manifold signals.

    Filtering is exact in coefficient space. The nonlinearity is applied
    pointwise: every layer output keeps sigma(z) as its function and its
    projection onto the first M modes as coefficients. The next layer filters
    the projection. The readout is not part of the manifold network.

    Args:
        arch: Architecture whose width F_0 matches the number of inputs.
        f: One signal or a sequence of F_0 signals.
        m: The manifold.
        M: Truncation.
        Q: Quadrature size used for projections.
        return_layers: Also return the signals of every layer.

    Returns:
        List of F_L output signals, or (outputs, layers) with `return_layers`.
    """
    M = M or get_runtime_config().quadrature.truncation
    inputs = [f] if isinstance(f, ManifoldSignal) else list(f)
    if len(inputs) != arch.widths[0]:
        raise ValueError(
            f"architecture expects {arch.widths[0]} input signals, got {len(inputs)}"
        )
    lambdas = lb_eigenvalues(m, M)
    sigma = arch.nonlinearity
    current = np.stack([_coeffs_up_to(x, M, Q) for x in inputs], axis=1)
    layers = [inputs]
    for bank in arch.banks:
        # (M, F_out, F_in) responses of every filter in the bank
        response = np.einsum(
            "pqk,ik->ipq", bank, np.exp(-arch.T_s * np.outer(lambdas, np.arange(bank.shape[2])))
        )
        z = np.einsum("ipq,iq->ip", response, current)
        outputs = [_activate(sigma, z[:, p], m, M, Q) for p in range(z.shape[1])]
        current = np.stack([out.coeffs for out in outputs], axis=1)
        layers.append(outputs)
    if return_layers:
        return layers[-1], layers
    return layers[-1]


def _activate(sigma, z: np.ndarray, m: ManifoldModel, M: int, Q: int | None) -> ManifoldSignal:
    if sigma.is_identity:
        return ManifoldSignal(m, coeffs=z, projection_residual=0.0)

    def func(points, z=z):
        return sigma.apply(eval_basis(m, M, points) @ z)

    return project(ManifoldSignal(m, func=func), M, Q)


__all__ = ["manifold_filter_apply", "mnn_forward"]
