"""
Convergence sweeps over (n, seed, kernel) cells.

Every cell samples its own point cloud from cell_seed(seed, n), so all
kernels of a seed see the same points. Cells run concurrently; a failing
cell is recorded as a `cell_error` row and the sweep continues.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from geognn.config.runtime import get_runtime_config
from geognn.config.sweep import KernelSpec, SweepConfig
from geognn.errors import SoftAssertionWarning
from geognn.experiments.datasets import cell_seed, manifold_graph, regression_task
from geognn.experiments.off import off_load
from geognn.experiments.results import CELL_ERROR, ErrorCurve, ErrorRow
from geognn.filters.apply import filter_convergence_error
from geognn.filters.coeffs import FilterCoeffs, fdt_check
from geognn.geograph.graph import GeoGraph, build_graph
from geognn.geograph.kernels import EpsRule, KernelConfig, KernelKind, calibrated_kernel
from geognn.geograph.operators import interpolate
from geognn.gnn.arch import GnnArch, Nonlinearity
from geognn.gnn.convergence import gnn_convergence_error
from geognn.gnn.network import gnn_forward
from geognn.gnn.train import Loss, TrainConfig, train
from geognn.manifold.models import ManifoldModel, get_manifold, sample_uniform
from geognn.manifold.signals import ManifoldSignal, quadrature_grid, sample_signal
from geognn.spectral.alignment import align_spectra
from geognn.spectral.partition import alpha_partition, eigengap

# Metrics compared between dense and sparse kernels.
COMPARED_METRICS = ("eval_err", "efun_err", "op_err", "filter_err", "gnn_err", "avg_degree")
OFF_SUBSAMPLE_KEY = 7


def kernel_config(spec: KernelSpec, m: ManifoldModel | None, d: int = 1) -> KernelConfig:
    """
    KernelConfig for a configured kernel on a manifold.

    Without a manifold (external clouds) the kernel is left uncalibrated and
    `d` gives the intrinsic dimension.
    """
    if spec.calibrate and m is not None:
        return calibrated_kernel(spec.kind, m, eps=spec.eps, eps_rule=spec.eps_rule)
    kind = KernelKind(spec.kind)
    if spec.eps_rule is not None:
        rule = EpsRule(spec.eps_rule)
    elif spec.eps is not None:
        rule = EpsRule.MANUAL
    else:
        rule = EpsRule.DENSE_RATE if kind == KernelKind.DENSE_GAUSSIAN else EpsRule.SPARSE_RATE
    return KernelConfig(kind, eps=spec.eps, d=m.intrinsic_dim if m is not None else d, eps_rule=rule)


def sweep_arch(cfg: SweepConfig) -> GnnArch:
    """The frozen random network whose convergence is measured."""
    a = cfg.arch
    return GnnArch.random(a.widths, a.K_t, a.seed, Nonlinearity(a.nonlinearity), T_s=a.T_s)


def sweep_filter(cfg: SweepConfig) -> FilterCoeffs:
    return FilterCoeffs(cfg.filter, T_s=cfg.filter_T_s)


def train_regression(
    cfg: SweepConfig,
    m: ManifoldModel,
    kernel: KernelConfig,
    seed: int,
    penalty_weight: float,
    verbose: bool = False,
):
    """
    Train the configured network on the heat-diffusion regression task.

    Returns:
        (TrainResult, graph, spectrum) for the train.n graph of `seed`.
    """
    t = cfg.train
    g, spectrum = manifold_graph(m, t.n, seed, kernel)
    task = regression_task(m, t.samples, cell_seed(seed, t.n, 1), t.bandwidth, t.target_time,
                           cfg.truncation)
    arch = GnnArch.random(cfg.arch.widths, cfg.arch.K_t, cell_seed(seed, cfg.arch.seed),
                          Nonlinearity(cfg.arch.nonlinearity), T_s=cfg.arch.T_s)
    result = train(arch, task.samples(g, spectrum), TrainConfig(
        loss=Loss(t.loss), optimizer=t.optimizer, learning_rate=t.learning_rate,
        epochs=t.epochs, batch_size=t.batch_size, penalty_weight=penalty_weight, seed=t.seed,
    ), verbose=verbose)
    return result, g, spectrum


def resolve_workers(jobs: int | None, cfg: SweepConfig) -> int:
    if jobs:
        return jobs
    if cfg.jobs:
        return cfg.jobs
    return get_runtime_config().execution.workers


def run_cells(cells, job, workers: int, verbose: bool = False) -> list[ErrorRow]:
    """
    Run job(cell) -> list[ErrorRow] for every cell.

    A cell that raises contributes one `cell_error` row built by the job's
    `failure_row` attribute.
    """

    def guarded(cell):
        try:
            return job(cell)
        except Exception as exc:  # noqa: BLE001
            if verbose:
                print(f"  ❌ cell {cell}: {exc}")
            return [job.failure_row(cell, exc)]

    rows = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for cell_rows in pool.map(guarded, cells):
            rows.extend(cell_rows)
    return rows


@dataclass
class _ConvergenceJob:
    cfg: SweepConfig
    manifold: ManifoldModel
    arch: GnnArch
    h: FilterCoeffs
    kernels: dict
    config_hash: str
    references: dict = field(default_factory=dict)

    def row(self, n, seed, eps, kernel, metric, value, note=""):
        return ErrorRow(n, seed, float(eps), kernel, metric, float(value),
                        self.cfg.truncation, self.config_hash, note=note)

    def failure_row(self, cell, exc) -> ErrorRow:
        n, seed, label = cell
        return self.row(n, seed, math.nan, label, CELL_ERROR, math.nan,
                        note=f"{type(exc).__name__}: {exc}")

    def reference_output(self, seed: int, label: str):
        """Network output on the large reference graph, interpolated onto the manifold."""
        key = (seed, label)
        if key not in self.references:
            g, spectrum = manifold_graph(self.manifold, self.cfg.reference_n, seed, self.kernels[label])
            x = sample_signal(self._input(), g.cloud)
            y = gnn_forward(self.arch, g, x, spectrum, readout=False)[:, 0]
            self.references[key] = interpolate(y, g.cloud, self.manifold)
        return self.references[key]

    def _input(self) -> ManifoldSignal:
        return ManifoldSignal.mode(self.manifold, self.cfg.signal_mode, self.cfg.truncation)

    def __call__(self, cell) -> list[ErrorRow]:
        n, seed, label = cell
        cfg, m = self.cfg, self.manifold
        g, spectrum = manifold_graph(m, n, seed, self.kernels[label])
        eps = g.eps
        rows = []

        K = min(cfg.K, spectrum.k - 1)
        report = align_spectra(spectrum, m, g.cloud, K, laplacian=g.laplacian)
        for metric, value in report.summary().items():
            rows.append(self.row(n, seed, eps, label, metric, value))
        rows.append(self.row(n, seed, eps, label, "eigengap", eigengap(spectrum.eigenvalues, K)))

        f = self._input()
        rows.append(self.row(n, seed, eps, label, "filter_err",
                             filter_convergence_error(self.h, g, f, m, cfg.truncation, spectrum)))
        if self.arch.widths[0] == 1:
            gnn = gnn_convergence_error(self.arch, g, f, m, cfg.truncation, spectrum, cfg.quadrature,
                                        allow_general_widths=True)
            rows.append(self.row(n, seed, eps, label, "gnn_err", gnn.error))
            rows.append(self.row(n, seed, eps, label, "gnn_bound_shape", gnn.bound_shape))

        rows.append(self.row(n, seed, eps, label, "avg_degree", g.avg_degree))
        rows.append(self.row(n, seed, eps, label, "expected_degree", g.expected_degree(m.volume)))
        rows.append(self.row(n, seed, eps, label, "components", g.n_components))

        for alpha in cfg.alpha_grid:
            part = alpha_partition(spectrum.eigenvalues[: K + 1], alpha)
            tag = f"alpha={alpha:g}"
            rows.append(self.row(n, seed, eps, label, f"partition_N[{tag}]", part.N))
            rows.append(self.row(n, seed, eps, label, f"partition_Nm[{tag}]", part.N_m))
            fdt = fdt_check(self.h, part, 1.0)
            rows.append(self.row(n, seed, eps, label, f"fdt_gamma[{tag}]", max(fdt.gamma_k)))

        if cfg.reference_n > 0:
            nodes, weights = quadrature_grid(m, cfg.quadrature)
            x = sample_signal(f, g.cloud)
            y = gnn_forward(self.arch, g, x, spectrum, readout=False)[:, 0]
            diff = interpolate(y, g.cloud, m)(nodes) - self.reference_output(seed, label)(nodes)
            rows.append(self.row(n, seed, eps, label, "ref_diff", math.sqrt(np.sum(weights * diff**2))))
        return rows


def convergence_sweep(cfg: SweepConfig, jobs: int | None = None, verbose: bool = False) -> ErrorCurve:
    """
    Measure spectral, filter and network convergence on every (n, seed, kernel) cell.

    Args:
        cfg: A checked run configuration.
        jobs: Worker threads; the configuration or runtime default when omitted.
        verbose: Print failed cells.

    Returns:
        ErrorCurve with rows sorted by (metric, kernel, n, seed).
    """
    m = get_manifold(cfg.manifold)
    kernels = {spec.label: kernel_config(spec, m) for spec in cfg.kernels}
    job = _ConvergenceJob(cfg, m, sweep_arch(cfg), sweep_filter(cfg), kernels, cfg.config_hash())
    if cfg.reference_n > 0:
        # Reference graphs are built up front so worker threads only read them.
        for seed in cfg.seeds:
            for label in kernels:
                job.reference_output(seed, label)
    cells = [(n, seed, label) for n in cfg.n_grid for seed in cfg.seeds for label in kernels]
    rows = run_cells(cells, job, resolve_workers(jobs, cfg), verbose)
    return ErrorCurve(rows, job.config_hash).sorted()


@dataclass
class DenseSparseReport:
    """Per-n medians of dense and sparse kernels side by side."""

    dense: str
    sparse: str
    table: list = field(default_factory=list)
    comparisons: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """The dense-below-sparse claim fails only when it fails at every n."""
        return not self.comparisons or any(self.comparisons.values())

    def header(self) -> list[str]:
        return ["n"] + [f"{kernel}_{metric}" for metric in COMPARED_METRICS
                        for kernel in (self.dense, self.sparse)]


def densevs_sparse_report(
    cfg: SweepConfig,
    curve: ErrorCurve | None = None,
    metric: str = "filter_err",
    jobs: int | None = None,
) -> DenseSparseReport:
    """
    Compare the first dense and the first sparse kernel of a configuration.

    The dense median of `metric` is expected to stay at or below the sparse
    one; a violation at a single n is only a SoftAssertionWarning.
    """
    dense = next((s.label for s in cfg.kernels if s.kind == "dense"), None)
    sparse_ = next((s.label for s in cfg.kernels if s.kind == "sparse"), None)
    if dense is None or sparse_ is None:
        raise ValueError("dense-vs-sparse comparison needs one dense and one sparse kernel")
    curve = curve if curve is not None else convergence_sweep(cfg, jobs)
    report = DenseSparseReport(dense, sparse_)
    medians = {
        (kernel, name): curve.medians(name, kernel)
        for name in COMPARED_METRICS for kernel in (dense, sparse_)
    }
    for n in cfg.n_grid:
        row = [n]
        for name in COMPARED_METRICS:
            for kernel in (dense, sparse_):
                row.append(medians[(kernel, name)].get(n, math.nan))
        report.table.append(row)
        d, s = medians[(dense, metric)].get(n), medians[(sparse_, metric)].get(n)
        if d is None or s is None:
            continue
        report.comparisons[n] = d <= s
        if d > s:
            warnings.warn(
                f"n={n}: dense {metric} median {d:.4g} exceeds sparse median {s:.4g}",
                SoftAssertionWarning,
                stacklevel=2,
            )
    return report


@dataclass
class _PenaltyJob:
    cfg: SweepConfig
    manifold: ManifoldModel
    kernel: KernelConfig
    label: str
    config_hash: str

    def row(self, seed, eps, weight, metric, value, note=""):
        return ErrorRow(self.cfg.train.n, seed, float(eps), self.label, metric, float(value),
                        self.cfg.truncation, self.config_hash, param=float(weight), note=note)

    def failure_row(self, cell, exc) -> ErrorRow:
        weight, seed = cell
        return self.row(seed, math.nan, weight, CELL_ERROR, math.nan, f"{type(exc).__name__}: {exc}")

    def __call__(self, cell) -> list[ErrorRow]:
        weight, seed = cell
        cfg, m = self.cfg, self.manifold
        result, g, spectrum = train_regression(cfg, m, self.kernel, seed, weight)
        f = ManifoldSignal.mode(m, cfg.signal_mode, cfg.truncation)
        report = gnn_convergence_error(result.arch, g, f, m, cfg.truncation, spectrum, cfg.quadrature,
                                       allow_general_widths=True)
        final = result.history[-1]
        return [
            self.row(seed, g.eps, weight, "gnn_err", report.error),
            self.row(seed, g.eps, weight, "max_filter_err", report.max_filter_error),
            self.row(seed, g.eps, weight, "train_loss", final.loss),
            self.row(seed, g.eps, weight, "penalty", final.penalty),
        ]


def penalty_sweep(cfg: SweepConfig, jobs: int | None = None, verbose: bool = False) -> ErrorCurve:
    """
    Train the regression network for every penalty weight C_L and seed and
    measure its graph-versus-manifold error at n = train.n.

    Rows carry C_L in `param`; medians by param give the trade-off curve.
    """
    m = get_manifold(cfg.manifold)
    spec = cfg.kernels[0]
    job = _PenaltyJob(cfg, m, kernel_config(spec, m), spec.label, cfg.config_hash())
    cells = [(float(w), seed) for w in cfg.penalty_grid for seed in cfg.seeds]
    return ErrorCurve(run_cells(cells, job, resolve_workers(jobs, cfg), verbose), job.config_hash).sorted()


def spectrum_graph(cfg: SweepConfig, spec: KernelSpec, n: int, seed: int) -> GeoGraph:
    """The graph the spectrum command analyses for one cell."""
    m = get_manifold(cfg.manifold)
    return build_graph(sample_uniform(m, n, cell_seed(seed, n)), kernel_config(spec, m))


def off_graph(cfg: SweepConfig, spec: KernelSpec, path: str, seed: int) -> GeoGraph:
    """Graph on the vertices of an OFF file, subsampled to `off_n` points by seed."""
    cloud = off_load(path, cfg.off_n, cell_seed(seed, OFF_SUBSAMPLE_KEY))
    return build_graph(cloud, kernel_config(spec, None, d=cfg.off_dim))


__all__ = [
    "COMPARED_METRICS",
    "kernel_config",
    "sweep_arch",
    "sweep_filter",
    "train_regression",
    "resolve_workers",
    "run_cells",
    "convergence_sweep",
    "DenseSparseReport",
    "densevs_sparse_report",
    "penalty_sweep",
    "spectrum_graph",
    "off_graph",
]
