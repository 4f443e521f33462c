"""Filter-bank architectures shared by graph and manifold execution."""

import copy
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from geognn.filters.coeffs import FilterCoeffs, Provenance


class Nonlinearity(Enum):
    """Pointwise nonlinearity; all three satisfy sigma(0) = 0 and are 1-Lipschitz."""

    RELU = "relu"
    TANH = "tanh"
    IDENTITY = "identity"

    @property
    def is_identity(self) -> bool:
        return self == Nonlinearity.IDENTITY

    def apply(self, a):
        if self == Nonlinearity.RELU:
            return np.maximum(a, 0.0)
        if self == Nonlinearity.TANH:
            return np.tanh(a)
        return np.asarray(a, dtype=float)

    def derivative(self, a):
        a = np.asarray(a, dtype=float)
        if self == Nonlinearity.RELU:
            return (a > 0).astype(float)
        if self == Nonlinearity.TANH:
            return 1.0 - np.tanh(a) ** 2
        return np.ones_like(a)


class ArchFamily(Enum):
    """Model families compared in the experiments."""

    GRAPH_FILTER = "graph_filter"
    GNN = "gnn"
    LIPSCHITZ_GNN = "lipschitz_gnn"

    @property
    def nonlinearity(self) -> Nonlinearity:
        if self == ArchFamily.GRAPH_FILTER:
            return Nonlinearity.IDENTITY
        return Nonlinearity.RELU

    @property
    def penalized(self) -> bool:
        return self == ArchFamily.LIPSCHITZ_GNN


@dataclass(eq=False)
class Readout:
    """Affine map W^T z + b on node features, or on their mean when `pool` is set."""

    W: np.ndarray
    b: np.ndarray
    pool: bool = False

    def __post_init__(self):
        self.W = np.array(self.W, dtype=float)
        self.b = np.array(self.b, dtype=float).ravel()
        if self.W.ndim != 2 or self.W.shape[1] != self.b.size:
            raise ValueError(f"readout shapes disagree: W {self.W.shape}, b {self.b.shape}")

    @property
    def in_dim(self) -> int:
        return self.W.shape[0]

    @property
    def out_dim(self) -> int:
        return self.W.shape[1]

    def features(self, Z: np.ndarray) -> np.ndarray:
        return Z.mean(axis=0, keepdims=True) if self.pool else Z

    def apply(self, Z: np.ndarray) -> np.ndarray:
        return self.features(Z) @ self.W + self.b


@dataclass(eq=False)
class GnnArch:
    """
    Layered filter banks x_l^p = sigma(sum_q h_l^{pq}(L) x_{l-1}^q).

    `banks[l]` has shape (F_{l+1}, F_l, K_t). `version` changes whenever the
    parameters are replaced, which invalidates forward caches.
    """

    widths: tuple
    banks: list
    nonlinearity: Nonlinearity = Nonlinearity.RELU
    readout: Readout | None = None
    T_s: float = 1.0
    version: int = field(default=0)

    def __post_init__(self):
        self.widths = tuple(int(w) for w in self.widths)
        if len(self.widths) < 2 or min(self.widths) < 1:
            raise ValueError(f"need at least one layer of positive widths, got {self.widths}")
        self.banks = [np.array(b, dtype=float) for b in self.banks]
        if len(self.banks) != len(self.widths) - 1:
            raise ValueError(f"{len(self.widths) - 1} layers need as many banks, got {len(self.banks)}")
        for l, bank in enumerate(self.banks):
            expected = (self.widths[l + 1], self.widths[l])
            if bank.ndim != 3 or bank.shape[:2] != expected or bank.shape[2] < 1:
                raise ValueError(f"bank {l} has shape {bank.shape}, expected {expected + ('K_t',)}")
        if self.readout is not None and self.readout.in_dim != self.widths[-1]:
            raise ValueError(
                f"readout expects {self.readout.in_dim} features, last layer has {self.widths[-1]}"
            )
        if not self.T_s > 0:
            raise ValueError(f"T_s must be positive, got {self.T_s}")

    @property
    def L(self) -> int:
        return len(self.banks)

    def filter(self, l: int, p: int, q: int) -> FilterCoeffs:
        """Filter of layer l (0-based) from input feature q to output feature p."""
        return FilterCoeffs(self.banks[l][p, q], T_s=self.T_s, provenance=Provenance.LEARNED)

    def parameters(self) -> dict[str, np.ndarray]:
        params = {f"bank{l}": bank for l, bank in enumerate(self.banks)}
        if self.readout is not None:
            params["readout.W"] = self.readout.W
            params["readout.b"] = self.readout.b
        return params

    def set_parameters(self, params: dict[str, np.ndarray]) -> None:
        for name, value in params.items():
            if name.startswith("bank"):
                l = int(name[4:])
                if value.shape != self.banks[l].shape:
                    raise ValueError(f"{name} has shape {value.shape}, expected {self.banks[l].shape}")
                self.banks[l] = np.array(value, dtype=float)
            elif name == "readout.W":
                self.readout.W = np.array(value, dtype=float)
            elif name == "readout.b":
                self.readout.b = np.array(value, dtype=float)
            else:
                raise KeyError(f"unknown parameter {name}")
        self.version += 1

    def copy(self) -> "GnnArch":
        return copy.deepcopy(self)

    @classmethod
    def random(
        cls,
        widths,
        K_t: int,
        seed,
        nonlinearity: Nonlinearity = Nonlinearity.RELU,
        out_dim: int | None = None,
        pool: bool = False,
        T_s: float = 1.0,
    ) -> "GnnArch":
        """
        Uniform initialization on [-1/sqrt(K_t F_in), 1/sqrt(K_t F_in)] per
        bank; the readout, when requested, draws W on [-1/sqrt(F_L), 1/sqrt(F_L)]
        and starts with b = 0.
        """
        if K_t < 1:
            raise ValueError(f"K_t must be >= 1, got {K_t}")
        rng = np.random.default_rng(seed)
        widths = tuple(int(w) for w in widths)
        banks = []
        for f_in, f_out in zip(widths[:-1], widths[1:]):
            bound = 1.0 / np.sqrt(K_t * f_in)
            banks.append(rng.uniform(-bound, bound, size=(f_out, f_in, K_t)))
        readout = None
        if out_dim is not None:
            bound = 1.0 / np.sqrt(widths[-1])
            readout = Readout(
                rng.uniform(-bound, bound, size=(widths[-1], out_dim)), np.zeros(out_dim), pool
            )
        return cls(widths, banks, nonlinearity, readout, T_s)

    @classmethod
    def from_filter(
        cls, h: FilterCoeffs, nonlinearity: Nonlinearity = Nonlinearity.IDENTITY
    ) -> "GnnArch":
        """Single-layer, single-feature architecture around one filter."""
        return cls((1, 1), [h.h.reshape(1, 1, -1)], nonlinearity, None, h.T_s)

    def to_dict(self) -> dict:
        return {
            "widths": list(self.widths),
            "K_t": [int(b.shape[2]) for b in self.banks],
            "nonlinearity": self.nonlinearity.value,
            "T_s": self.T_s,
            "readout": None
            if self.readout is None
            else {"out_dim": self.readout.out_dim, "pool": self.readout.pool},
        }


__all__ = ["Nonlinearity", "ArchFamily", "Readout", "GnnArch"]
