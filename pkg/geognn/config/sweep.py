"""
Run configuration loaded from YAML files.

A run configuration describes the manifold, the size grid, seeds, kernels and
the filter/network/training settings of every experiment command.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from geognn.errors import ConfigError

MANIFOLDS = ("circle", "sphere", "torus")
KERNEL_KINDS = ("dense", "sparse")
EPS_RULES = ("manual", "dense_rate", "sparse_rate")
NONLINEARITIES = ("relu", "tanh", "identity")
LOSSES = ("mse", "cross_entropy")
OPTIMIZERS = ("sgd", "adam")
TRANSFER_MODES = ("frozen", "readout_retrain")
FAMILIES = ("graph_filter", "gnn", "lipschitz_gnn")
# Where a run reads and writes; excluded from config_hash.
LOCATION_FIELDS = ("output", "jobs", "fixtures", "plots")


@dataclass
class KernelSpec:
    """One graph construction; `name` labels result rows."""

    kind: str = "dense"
    eps_rule: str | None = None
    eps: float | None = None
    calibrate: bool = True
    name: str | None = None

    @property
    def label(self) -> str:
        return self.name or self.kind


@dataclass
class ArchSpec:
    widths: list = field(default_factory=lambda: [1, 2, 1])
    K_t: int = 5
    T_s: float = 1.0
    nonlinearity: str = "relu"
    seed: int = 0


@dataclass
class TrainSpec:
    loss: str = "mse"
    optimizer: str = "adam"
    learning_rate: float = 0.005
    epochs: int = 40
    batch_size: int = 8
    penalty_weight: float = 0.0
    seed: int = 0
    n: int = 1000
    samples: int = 16
    target_time: float = 0.5
    bandwidth: int = 9


@dataclass
class TransferSpec:
    n_train: int = 250
    n_targets: list = field(default_factory=lambda: [500, 1000, 2000])
    mode: str = "frozen"
    signals: int = 4
    quadrature: int = 128


@dataclass
class ClassifySpec:
    n: int = 300
    n_transfer: int = 1000
    clouds_per_class: int = 40
    test_fraction: float = 0.25
    widths: list = field(default_factory=lambda: [3, 8, 8])
    K_t: int = 5
    epochs: int = 40
    batch_size: int = 8
    learning_rate: float = 0.005
    penalty_weight: float = 0.3
    families: list = field(default_factory=lambda: list(FAMILIES))
    kernel: KernelSpec = field(
        default_factory=lambda: KernelSpec(kind="dense", eps_rule="manual", eps=0.1)
    )


_NESTED = {
    "arch": ArchSpec,
    "train": TrainSpec,
    "transfer": TransferSpec,
    "classify": ClassifySpec,
}


def _build(cls, data: Any, path: str):
    """Instantiate a spec dataclass from a mapping, naming unknown keys by path."""
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected a mapping, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown field")
    kwargs = dict(data)
    if cls is ClassifySpec and "kernel" in kwargs:
        kwargs["kernel"] = _build(KernelSpec, kwargs["kernel"], f"{path}.kernel")
    return cls(**kwargs)


@dataclass
class SweepConfig:
    """Run configuration; `manifold` and `n_grid` are required."""

    manifold: str
    n_grid: list
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    kernels: list = field(default_factory=lambda: [KernelSpec("dense"), KernelSpec("sparse")])
    filter: list = field(default_factory=lambda: [0.0, 1.0])
    filter_T_s: float = 1.0
    signal_mode: int = 1
    truncation: int = 25
    quadrature: int = 512
    K: int = 5
    alpha_grid: list = field(default_factory=lambda: [0.5, 2.0])
    penalty_grid: list = field(default_factory=lambda: [0.0, 0.3, 1.0, 3.0])
    reference_n: int = 0
    spectrum_k: int | None = None
    export_edges: bool = False
    off_files: list = field(default_factory=list)
    off_n: int | None = None
    off_dim: int = 2
    arch: ArchSpec = field(default_factory=ArchSpec)
    train: TrainSpec = field(default_factory=TrainSpec)
    transfer: TransferSpec = field(default_factory=TransferSpec)
    classify: ClassifySpec = field(default_factory=ClassifySpec)
    output: str = "results"
    jobs: int = 0
    fixtures: str = "fixtures/oracle.json"
    plots: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a mapping")
        for required in ("manifold", "n_grid"):
            if data.get(required) is None:
                raise ConfigError(required, "required field is missing")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        kwargs = dict(data)
        kernels = kwargs.get("kernels")
        if kernels is not None:
            if not isinstance(kernels, list) or not kernels:
                raise ConfigError("kernels", "expected a nonempty list")
            kwargs["kernels"] = [
                _build(KernelSpec, spec, f"kernels[{i}]") for i, spec in enumerate(kernels)
            ]
        for name, spec_cls in _NESTED.items():
            if name in kwargs:
                kwargs[name] = _build(spec_cls, kwargs[name], name)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError("<root>", str(exc)) from exc

    @classmethod
    def from_file(cls, config_path: str | Path) -> "SweepConfig":
        """Load a configuration from a YAML file."""
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")
        with open(config_path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as exc:
                raise ConfigError("<root>", f"invalid YAML: {exc}") from exc
        return cls.from_dict(data or {})

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        """First 12 hex digits of the sha256 of the canonical JSON snapshot, location fields left out."""
        snapshot = {k: v for k, v in self.to_dict().items() if k not in LOCATION_FIELDS}
        canonical = json.dumps(snapshot, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def check(self, min_seeds: int = 1) -> None:
        """Raise ConfigError naming the first invalid field."""
        if self.manifold not in MANIFOLDS:
            raise ConfigError("manifold", f"must be one of {', '.join(MANIFOLDS)}")
        _positive_ints("n_grid", self.n_grid, minimum=2)
        if list(self.n_grid) != sorted(set(self.n_grid)):
            raise ConfigError("n_grid", "must be strictly ascending")
        if not isinstance(self.seeds, list) or len(self.seeds) < min_seeds:
            raise ConfigError("seeds", f"need at least {min_seeds} seeds")
        if any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ConfigError("seeds", "seeds must be nonnegative integers")
        for i, spec in enumerate(self.kernels):
            _check_kernel(spec, f"kernels[{i}]")
        labels = [spec.label for spec in self.kernels]
        if len(set(labels)) != len(labels):
            raise ConfigError("kernels", f"kernel labels must be unique, got {labels}")
        if not self.filter or any(not _is_number(v) for v in self.filter):
            raise ConfigError("filter", "expected a nonempty list of numbers")
        if not self.filter_T_s > 0:
            raise ConfigError("filter_T_s", "must be positive")
        for name in ("truncation", "K"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ConfigError(name, "must be a positive integer")
        if self.quadrature < 64:
            raise ConfigError("quadrature", "must be >= 64")
        if not 0 <= self.signal_mode < self.truncation:
            raise ConfigError("signal_mode", "must index a mode below the truncation")
        if any(not _is_number(a) or a <= 0 for a in self.alpha_grid):
            raise ConfigError("alpha_grid", "alphas must be positive")
        if any(not _is_number(c) or c < 0 for c in self.penalty_grid):
            raise ConfigError("penalty_grid", "penalty weights must be >= 0")
        if self.reference_n < 0:
            raise ConfigError("reference_n", "must be >= 0")
        if self.spectrum_k is not None and (not isinstance(self.spectrum_k, int) or self.spectrum_k < 1):
            raise ConfigError("spectrum_k", "must be a positive integer")
        if self.jobs < 0:
            raise ConfigError("jobs", "must be >= 0")
        self._check_off()
        self._check_arch(self.arch.widths, self.arch.K_t, "arch")
        if self.arch.nonlinearity not in NONLINEARITIES:
            raise ConfigError("arch.nonlinearity", f"must be one of {', '.join(NONLINEARITIES)}")
        self._check_train()
        self._check_transfer()
        self._check_classify()

    def _check_off(self) -> None:
        if not isinstance(self.off_files, list):
            raise ConfigError("off_files", "expected a list of paths")
        for i, path in enumerate(self.off_files):
            if not isinstance(path, str) or not path.lower().endswith(".off"):
                raise ConfigError(f"off_files[{i}]", "expected a path to an .off file")
        if self.off_n is not None and (not isinstance(self.off_n, int) or self.off_n < 2):
            raise ConfigError("off_n", "must be an integer >= 2")
        if not isinstance(self.off_dim, int) or self.off_dim < 1:
            raise ConfigError("off_dim", "must be a positive integer")

    def _check_arch(self, widths, K_t, path: str) -> None:
        _positive_ints(f"{path}.widths", widths, minimum=1)
        if len(widths) < 2:
            raise ConfigError(f"{path}.widths", "need at least one layer")
        if not isinstance(K_t, int) or K_t < 1:
            raise ConfigError(f"{path}.K_t", "must be a positive integer")

    def _check_train(self) -> None:
        t = self.train
        if t.loss not in LOSSES:
            raise ConfigError("train.loss", f"must be one of {', '.join(LOSSES)}")
        if t.optimizer not in OPTIMIZERS:
            raise ConfigError("train.optimizer", f"must be one of {', '.join(OPTIMIZERS)}")
        if t.learning_rate < 0:
            raise ConfigError("train.learning_rate", "must be >= 0")
        for name in ("epochs", "batch_size", "samples", "bandwidth"):
            if getattr(t, name) < 1:
                raise ConfigError(f"train.{name}", "must be >= 1")
        if t.n < 2:
            raise ConfigError("train.n", "must be >= 2")
        if t.penalty_weight < 0:
            raise ConfigError("train.penalty_weight", "must be >= 0")
        if not t.target_time > 0:
            raise ConfigError("train.target_time", "must be positive")

    def _check_transfer(self) -> None:
        t = self.transfer
        if t.n_train < 2:
            raise ConfigError("transfer.n_train", "must be >= 2")
        _positive_ints("transfer.n_targets", t.n_targets, minimum=2)
        if t.mode not in TRANSFER_MODES:
            raise ConfigError("transfer.mode", f"must be one of {', '.join(TRANSFER_MODES)}")
        if t.signals < 1:
            raise ConfigError("transfer.signals", "must be >= 1")
        if t.quadrature < 64:
            raise ConfigError("transfer.quadrature", "must be >= 64")

    def _check_classify(self) -> None:
        c = self.classify
        if c.n < 50:
            raise ConfigError("classify.n", "must be >= 50")
        if c.n_transfer < 50:
            raise ConfigError("classify.n_transfer", "must be >= 50")
        if c.clouds_per_class < 1:
            raise ConfigError("classify.clouds_per_class", "must be >= 1")
        if not 0 < c.test_fraction < 1:
            raise ConfigError("classify.test_fraction", "must lie in (0, 1)")
        self._check_arch(c.widths, c.K_t, "classify")
        if c.widths[0] != 3:
            raise ConfigError("classify.widths", "point coordinates give F_0 = 3")
        for i, family in enumerate(c.families):
            if family not in FAMILIES:
                raise ConfigError(f"classify.families[{i}]", f"must be one of {', '.join(FAMILIES)}")
        _check_kernel(c.kernel, "classify.kernel")

    def validate(self, min_seeds: int = 3) -> tuple[bool, str]:
        """Validate the configuration; returns (ok, message)."""
        try:
            self.check(min_seeds=min_seeds)
        except ConfigError as exc:
            return False, str(exc)
        return True, "Configuration is valid"


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive_ints(path: str, values, minimum: int) -> None:
    if not isinstance(values, list) or not values:
        raise ConfigError(path, "expected a nonempty list")
    for i, v in enumerate(values):
        if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
            raise ConfigError(f"{path}[{i}]", f"must be an integer >= {minimum}")


def _check_kernel(spec: KernelSpec, path: str) -> None:
    if spec.kind not in KERNEL_KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {', '.join(KERNEL_KINDS)}")
    if spec.eps_rule is not None and spec.eps_rule not in EPS_RULES:
        raise ConfigError(f"{path}.eps_rule", f"must be one of {', '.join(EPS_RULES)}")
    if spec.eps_rule == "manual" and spec.eps is None:
        raise ConfigError(f"{path}.eps", "required when eps_rule is manual")
    if spec.eps is not None and (not _is_number(spec.eps) or spec.eps <= 0):
        raise ConfigError(f"{path}.eps", "must be positive")


__all__ = [
    "KernelSpec",
    "ArchSpec",
    "TrainSpec",
    "TransferSpec",
    "ClassifySpec",
    "SweepConfig",
]
