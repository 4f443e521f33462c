"""Discrete-time diffusion filters and their frequency responses."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

LIPSCHITZ_GRID = 10_000


class Provenance(Enum):
    LEARNED = "learned"
    DESIGNED = "designed"


@dataclass(frozen=True, eq=False)
class FilterCoeffs:
    """
    Diffusion filter sum_k h_k e^{-k T_s L}.

    Attributes:
        h: Coefficients h_0 .. h_{K_t - 1}.
        T_s: Sample interval of the diffusion time.
        provenance: Whether the coefficients were designed or learned.
    """

    h: np.ndarray
    T_s: float = 1.0
    provenance: Provenance = Provenance.DESIGNED

    def __post_init__(self):
        h = np.array(self.h, dtype=float).ravel()
        if h.size < 1:
            raise ValueError("a filter needs at least one coefficient")
        if not np.all(np.isfinite(h)):
            raise ValueError("filter coefficients must be finite")
        if not self.T_s > 0:
            raise ValueError(f"T_s must be positive, got {self.T_s}")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def K_t(self) -> int:
        return self.h.size

    def _kernel(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.exp(-self.T_s * np.multiply.outer(lam, np.arange(self.K_t)))

    def response(self, lam) -> np.ndarray:
        """h(lambda) = sum_k h_k e^{-k T_s lambda}, vectorized over lambda."""
        return self._kernel(lam) @ self.h

    def derivative(self, lam) -> np.ndarray:
        """h'(lambda) = -sum_k k T_s h_k e^{-k T_s lambda}."""
        weights = -self.T_s * np.arange(self.K_t) * self.h
        return self._kernel(lam) @ weights

    @classmethod
    def from_impulse(
        cls, impulse: Callable[[np.ndarray], np.ndarray], K_t: int, T_s: float = 1.0
    ) -> "FilterCoeffs":
        """Sample a continuous impulse response at t = k T_s."""
        if K_t < 1:
            raise ValueError(f"K_t must be >= 1, got {K_t}")
        times = T_s * np.arange(K_t)
        return cls(np.asarray(impulse(times), dtype=float), T_s=T_s)

    def to_rows(self) -> list[tuple[int, float]]:
        return [(k, float(v)) for k, v in enumerate(self.h)]


def heat_filter(t: float) -> FilterCoeffs:
    """Filter with response exactly e^{-t lambda}."""
    if not t > 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    return FilterCoeffs(np.array([0.0, 1.0]), T_s=t)


def _check_lambda(lam) -> None:
    if np.any(np.asarray(lam) < 0):
        raise ValueError("frequencies must be nonnegative")


def freq_response(h: FilterCoeffs, lam):
    """Frequency response at lambda >= 0; scalar in, scalar out."""
    _check_lambda(lam)
    value = h.response(lam)
    return float(value) if np.ndim(value) == 0 else value


def filter_derivative_response(h: FilterCoeffs, lam):
    """Derivative of the frequency response at lambda >= 0."""
    _check_lambda(lam)
    value = h.derivative(lam)
    return float(value) if np.ndim(value) == 0 else value


class LipschitzMethod(Enum):
    ANALYTIC_BOUND = "analytic_bound"
    GRID_SUP = "grid_sup"


@dataclass(frozen=True)
class LipschitzEstimate:
    A_h: float
    method: LipschitzMethod


def lipschitz_estimate(
    h: FilterCoeffs,
    lam_max: float,
    method: LipschitzMethod = LipschitzMethod.GRID_SUP,
    grid: int = LIPSCHITZ_GRID,
) -> LipschitzEstimate:
    """
    Lipschitz constant of the frequency response.

    ANALYTIC_BOUND is sum_k k T_s |h_k|; GRID_SUP is max |h'| over a uniform
    grid on (0, lam_max].
    """
    if not lam_max > 0:
        raise ValueError(f"lam_max must be positive, got {lam_max}")
    if method == LipschitzMethod.ANALYTIC_BOUND:
        value = float(np.sum(h.T_s * np.arange(h.K_t) * np.abs(h.h)))
    else:
        lam = np.linspace(lam_max / grid, lam_max, grid)
        value = float(np.max(np.abs(h.derivative(lam))))
    return LipschitzEstimate(value, method)


def lipschitz_report(h: FilterCoeffs, lam_max: float) -> dict[str, LipschitzEstimate]:
    """Both estimates keyed by method name."""
    return {
        method.value: lipschitz_estimate(h, lam_max, method) for method in LipschitzMethod
    }


@dataclass(frozen=True)
class FdtReport:
    passed: bool
    gamma: float
    gamma_k: list = field(default_factory=list)


def fdt_check(h: FilterCoeffs, part, gamma: float) -> FdtReport:
    """
    Check the alpha-FDT condition: within every group of the partition the
    response varies by at most gamma.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    gamma_k = []
    for values in part.group_values():
        response = h.response(values)
        gamma_k.append(float(np.max(response) - np.min(response)) if response.size else 0.0)
    return FdtReport(all(g <= gamma for g in gamma_k), float(gamma), gamma_k)


__all__ = [
    "Provenance",
    "FilterCoeffs",
    "heat_filter",
    "freq_response",
    "filter_derivative_response",
    "LipschitzMethod",
    "LipschitzEstimate",
    "lipschitz_estimate",
    "lipschitz_report",
    "FdtReport",
    "fdt_check",
]
