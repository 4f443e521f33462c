"""Kernel weight functions for geometric graphs."""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import gamma


class KernelKind(Enum):
    """Graph regime selected by the kernel."""

    DENSE_GAUSSIAN = "dense"
    SPARSE_COMPACT = "sparse"


class EpsRule(Enum):
    """How the bandwidth epsilon is chosen."""

    MANUAL = "manual"
    DENSE_RATE = "dense_rate"  # eps = n^(-1/(d+4))
    SPARSE_RATE = "sparse_rate"  # eps = (log n / n)^(1/d)


def alpha_d(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / gamma(d / 2 + 1)


@dataclass(frozen=True)
class KernelConfig:
    """
    Kernel selection for graph construction.

    Attributes:
        kind: Dense Gaussian or compactly supported kernel.
        eps: Bandwidth; ignored (recomputed from n) unless `eps_rule` is MANUAL.
        d: Intrinsic dimension used in the normalization.
        eps_rule: Bandwidth rule.
        scale: Multiplies every weight. 1 keeps the weights as defined;
            `calibrated_kernel` picks the scale that makes L approximate the
            Laplace-Beltrami operator itself.
    """

    kind: KernelKind
    eps: float | None = None
    d: int = 1
    eps_rule: EpsRule = EpsRule.MANUAL
    scale: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"intrinsic dimension must be >= 1, got {self.d}")
        if self.scale <= 0:
            raise ValueError(f"kernel scale must be positive, got {self.scale}")
        if self.eps_rule == EpsRule.MANUAL and self.eps is None:
            raise ValueError("eps is required when eps_rule is manual")

    def bandwidth(self, n: int) -> float:
        """Epsilon for a graph on n points."""
        if self.eps_rule == EpsRule.DENSE_RATE:
            return float(n) ** (-1.0 / (self.d + 4))
        if self.eps_rule == EpsRule.SPARSE_RATE:
            return (math.log(n) / n) ** (1.0 / self.d)
        return float(self.eps)

    def resolve(self, n: int) -> "KernelConfig":
        """Copy with eps fixed for n points and the rule turned manual."""
        return replace(self, eps=self.bandwidth(n), eps_rule=EpsRule.MANUAL)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "eps": self.eps,
            "d": self.d,
            "eps_rule": self.eps_rule.value,
            "scale": self.scale,
        }


def kernel_weight(cfg: KernelConfig, n: int, dist_sq):
    """
    Edge weight for a pair of points at squared distance dist_sq.

    DenseGaussian: (1/n) eps^-(d/2+1) (4 pi)^-(d/2) exp(-dist_sq / (4 eps)).
    SparseCompact: (1/n) (d+2) / (eps^(d/2+1) alpha_d) on dist_sq <= eps, else 0.

    Args:
        cfg: Kernel configuration; rule-based eps is resolved from n.
        n: Number of points in the graph.
        dist_sq: Squared distance, scalar or array.

    Returns:
        Weight with the shape of dist_sq.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dist_sq = np.asarray(dist_sq, dtype=float)
    if np.any(dist_sq < 0):
        raise ValueError("squared distances must be nonnegative")
    eps = cfg.bandwidth(n)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    d = cfg.d
    if cfg.kind == KernelKind.DENSE_GAUSSIAN:
        norm = eps ** -(d / 2 + 1) * (4 * math.pi) ** (-d / 2)
        weight = norm * np.exp(-dist_sq / (4 * eps))
    else:
        norm = (d + 2) / (eps ** (d / 2 + 1) * alpha_d(d))
        weight = np.where(dist_sq / eps <= 1.0, norm, 0.0)
    weight = cfg.scale * weight / n
    return float(weight) if weight.ndim == 0 else weight


def calibrated_kernel(
    kind: "KernelKind | str",
    manifold,
    eps: float | None = None,
    eps_rule: "EpsRule | str | None" = None,
) -> KernelConfig:
    """
    Kernel whose graph Laplacian approximates the Laplace-Beltrami operator.

    Uniform samples have density 1/Vol, so the Gaussian kernel is scaled by
    Vol. The indicator kernel has half the second moment of the Gaussian and
    is scaled by 2 Vol.

    Args:
        kind: Kernel kind or its config name ("dense", "sparse").
        manifold: ManifoldModel providing d and Vol.
        eps: Manual bandwidth.
        eps_rule: Bandwidth rule; defaults to the rate matching the kind when
            eps is not given.
    """
    kind = KernelKind(kind) if isinstance(kind, str) else kind
    if eps_rule is None:
        if eps is not None:
            eps_rule = EpsRule.MANUAL
        elif kind == KernelKind.DENSE_GAUSSIAN:
            eps_rule = EpsRule.DENSE_RATE
        else:
            eps_rule = EpsRule.SPARSE_RATE
    eps_rule = EpsRule(eps_rule) if isinstance(eps_rule, str) else eps_rule
    factor = 1.0 if kind == KernelKind.DENSE_GAUSSIAN else 2.0
    return KernelConfig(
        kind=kind,
        eps=eps,
        d=manifold.intrinsic_dim,
        eps_rule=eps_rule,
        scale=factor * manifold.volume,
    )


def expected_degree(cfg: KernelConfig, n: int, volume: float = 1.0) -> float:
    """
    Expected number of neighbours within distance sqrt(eps) under uniform
    sampling, alpha_d (n - 1) eps^(d/2) / Vol, for comparison with the
    measured average degree of the compact kernel.
    """
    eps = cfg.bandwidth(n)
    return alpha_d(cfg.d) * (n - 1) * eps ** (cfg.d / 2) / volume


__all__ = [
    "KernelKind",
    "EpsRule",
    "KernelConfig",
    "alpha_d",
    "kernel_weight",
    "calibrated_kernel",
    "expected_degree",
]
