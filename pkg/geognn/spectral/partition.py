"""Alpha-separated partitions, eigengaps and related spectral diagnostics."""

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class FreqPartition:
    """
    Partition of an ascending eigenvalue list into alpha-separated groups.

    `groups` are contiguous 0-based index ranges; eigenvalues in different
    groups differ by more than alpha.
    """

    alpha: float
    eigenvalues: np.ndarray
    groups: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.groups)

    @property
    def singleton_groups(self) -> list[range]:
        return [grp for grp in self.groups if len(grp) == 1]

    @property
    def multi_groups(self) -> list[range]:
        return [grp for grp in self.groups if len(grp) > 1]

    @property
    def N_s(self) -> int:
        return len(self.singleton_groups)

    @property
    def N_m(self) -> int:
        return len(self.multi_groups)

    def intervals(self) -> list[tuple[float, float]]:
        """(min, max) eigenvalue of every group."""
        return [(float(self.eigenvalues[g[0]]), float(self.eigenvalues[g[-1]])) for g in self.groups]

    def group_values(self) -> list[np.ndarray]:
        return [self.eigenvalues[grp.start:grp.stop] for grp in self.groups]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "N": self.N,
            "N_s": self.N_s,
            "N_m": self.N_m,
            "groups": [[g.start + 1, g.stop] for g in self.groups],
        }


def alpha_partition(eigenvalues, alpha: float) -> FreqPartition:
    """
    Greedy alpha-separated partition: a new group starts whenever the gap to
    the previous eigenvalue exceeds alpha.

    Example:
        >>> alpha_partition([0, 1, 1, 4, 4, 9], 2).N
        3
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    values = np.asarray(eigenvalues, dtype=float).ravel()
    if np.any(np.diff(values) < 0):
        raise ValueError("eigenvalues must be ascending")
    groups = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > alpha:
            groups.append(range(start, i))
            start = i
    if values.size:
        groups.append(range(start, values.size))
    return FreqPartition(alpha=float(alpha), eigenvalues=values, groups=groups)


def eigengap(eigenvalues, K: int) -> float:
    """
    theta = min over i = 1..K of the gaps on both sides of eigenvalue i.

    Indices count from 0, so eigenvalue 0 is the bottom of the spectrum and
    the gaps are taken around eigenvalues 1..K.
    """
    values = np.asarray(eigenvalues, dtype=float).ravel()
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if values.size < K + 1:
        raise ValueError(f"eigengap needs at least {K + 1} eigenvalues, got {values.size}")
    gaps = []
    for i in range(1, K + 1):
        gaps.append(values[i] - values[i - 1])
        if i + 1 < values.size:
            gaps.append(values[i + 1] - values[i])
    return float(min(gaps))


def weyl_N1(alpha: float, d: int, C1: float, C_d: float, vol: float) -> int:
    """
    Index beyond which consecutive Laplace-Beltrami gaps are at most alpha,
    ceil((alpha d / C1)^(d/(2-d)) (C_d Vol)^(2/(2-d))). Defined for d > 2 only.
    """
    if d <= 2:
        raise ValueError(f"the Weyl index formula needs d > 2, got d={d}")
    for name, value in (("alpha", alpha), ("C1", C1), ("C_d", C_d), ("vol", vol)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    value = (alpha * d / C1) ** (d / (2 - d)) * (C_d * vol) ** (2 / (2 - d))
    # Absorb rounding so exact integers are not pushed up by one.
    return int(math.ceil(value - 1e-12 * max(1.0, value)))


@dataclass(frozen=True)
class FdtDecomposition:
    """
    Components h0 and h_l of a filter response on an alpha partition,
    evaluated at every eigenvalue of the partition.
    """

    eigenvalues: np.ndarray
    response: np.ndarray
    h0: np.ndarray
    components: list
    anchors: list

    def reconstruction_error(self) -> float:
        total = self.h0 + sum(self.components, np.zeros_like(self.h0))
        return float(np.max(np.abs(total - self.response))) if total.size else 0.0


def fdt_decompose(
    h: "Callable | object", part: FreqPartition, anchors: Sequence[float] = ()
) -> FdtDecomposition:
    """
    Split a response into h0 plus one component per multi-eigenvalue group.

    On singleton groups h0 = h(lambda) - sum_l h(C_l) and h_l = h(C_l); on
    group l, h_l = h(lambda); everything else is zero. The components sum
    to h at every eigenvalue.

    Args:
        h: A FilterCoeffs or a vectorized callable lambda -> response.
        part: The partition.
        anchors: One anchor C_l per multi group, in group order, inside the
            group's eigenvalue range.
    """
    respond = h.response if hasattr(h, "response") else h
    multi = part.multi_groups
    anchors = [float(c) for c in anchors]
    if len(anchors) != len(multi):
        raise ValueError(f"need {len(multi)} anchors, got {len(anchors)}")
    for grp, c in zip(multi, anchors):
        lo, hi = part.eigenvalues[grp[0]], part.eigenvalues[grp[-1]]
        if not lo <= c <= hi:
            raise ValueError(f"anchor {c} lies outside its group [{lo}, {hi}]")

    values = part.eigenvalues
    response = np.asarray(respond(values), dtype=float).reshape(values.shape)
    anchor_resp = [float(np.asarray(respond(np.array([c])), dtype=float).ravel()[0]) for c in anchors]
    singleton = np.zeros(values.size, dtype=bool)
    for grp in part.singleton_groups:
        singleton[grp.start:grp.stop] = True

    h0 = np.where(singleton, response - sum(anchor_resp), 0.0)
    components = []
    for grp, hc in zip(multi, anchor_resp):
        comp = np.where(singleton, hc, 0.0)
        comp[grp.start:grp.stop] = response[grp.start:grp.stop]
        components.append(comp)
    return FdtDecomposition(values, response, h0, components, anchors)


__all__ = [
    "FreqPartition",
    "alpha_partition",
    "eigengap",
    "weyl_N1",
    "FdtDecomposition",
    "fdt_decompose",
]
