#!/usr/bin/env python3
"""
geognn CLI - convergence experiments for geometric graph neural networks.

Usage:
    python main.py COMMAND [OPTIONS]

Commands:
    spectrum   Graph spectra and their alignment with the manifold spectrum
    converge   Convergence sweep of spectra, filters and networks over n
    train      Train the regression network; sweep the Lipschitz penalty
    transfer   Run a trained network on graphs of other sizes
    classify   Sphere-versus-torus point-cloud classification

Exit codes:
    0 success, 1 configuration or I/O error, 2 failed acceptance check

Environment Variables:
    GEOGNN_CONFIG: Default configuration file (default: configs/circle.yaml)
    GEOGNN_LANG: Console language, cn or en (default: cn)
    GEOGNN_JOBS: Default worker count (default: all cores)
"""

import argparse
import os
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path

import geognn
from geognn.config.i18n import get_message, get_messages
from geognn.config.runtime import ExecutionConfig, update_runtime_config
from geognn.config.sweep import SweepConfig
from geognn.errors import ConfigError, GeoGnnError, TruncationWarning
from geognn.experiments.classify import classify_experiment
from geognn.experiments.manifest import RunManifest
from geognn.experiments.oracle import (
    DEFAULT_MIN_SEEDS,
    FAIL,
    ORACLE_NAME,
    SKIP,
    check_oracle,
    load_fixtures,
    regen_oracle,
)
from geognn.experiments.plots import plot_medians
from geognn.experiments.sweeps import (
    convergence_sweep,
    densevs_sparse_report,
    kernel_config,
    off_graph,
    penalty_sweep,
    resolve_workers,
    spectrum_graph,
    train_regression,
)
from geognn.experiments.transfer import transferability_eval
from geognn.export import (
    atomic_write_json,
    write_alignment,
    write_checkpoint,
    write_csv,
    write_edges,
    write_filter,
    write_loss,
    write_spectrum,
)
from geognn.manifold.models import get_manifold
from geognn.spectral.alignment import align_spectra
from geognn.spectral.eig import eig_sym

COMMANDS = ("spectrum", "converge", "train", "transfer", "classify")
EXIT_OK, EXIT_CONFIG, EXIT_ACCEPTANCE = 0, 1, 2
CONVERGE_PLOTS = ("eval_err", "efun_err", "filter_err", "gnn_err")


class Run:
    """Output directory, manifest and console settings of one invocation."""

    def __init__(self, cfg: SweepConfig, manifest: RunManifest, verbose: bool, lang: str):
        self.cfg = cfg
        self.out = Path(cfg.output)
        self.manifest = manifest
        self.verbose = verbose
        self.messages = get_messages(lang)

    def msg(self, key: str) -> str:
        return self.messages.get(key, key)

    def say(self, text: str = "") -> None:
        if self.verbose:
            print(text)

    def wrote(self, path) -> None:
        if path is not None:
            self.manifest.add_output(path, self.out)


def cmd_spectrum(run: Run):
    """Spectrum and alignment CSVs for every (kernel, n, seed), then spectra of the OFF clouds."""
    cfg = run.cfg
    m = get_manifold(cfg.manifold)
    summary = {}
    for spec in cfg.kernels:
        run.say(f"{run.msg('building_graphs')}: {spec.label}")
        for n in cfg.n_grid:
            k = cfg.spectrum_k or n
            if k > n:
                warnings.warn(f"{run.msg('k_clamped')}: k={k}, n={n}", TruncationWarning, stacklevel=2)
                k = n
            for seed in cfg.seeds:
                g = spectrum_graph(cfg, spec, n, seed)
                spectrum = eig_sym(g, k)
                stem = f"{spec.label}_n{n}_s{seed}"
                run.wrote(write_spectrum(run.out / "spectrum" / f"{stem}.csv", spectrum))
                K = min(cfg.K, spectrum.k)
                report = align_spectra(spectrum, m, g.cloud, K, laplacian=g.laplacian)
                run.wrote(write_alignment(run.out / "alignment" / f"{stem}.csv", report))
                if cfg.export_edges:
                    run.wrote(write_edges(run.out / "edges" / f"{stem}.csv", g))
                summary[stem] = {
                    "eps": g.eps,
                    "avg_degree": g.avg_degree,
                    "components": g.n_components,
                    **report.summary(),
                }
                run.say(f"  ✅ {stem}: eval_err {report.summary()['eval_err']:.4g}")

    # External clouds have no analytic spectrum, so only the graph side is written.
    for path in cfg.off_files:
        name = Path(path).stem
        for spec in cfg.kernels:
            run.say(f"{run.msg('external_cloud')}: {path} ({spec.label})")
            for seed in cfg.seeds:
                g = off_graph(cfg, spec, path, seed)
                k = cfg.spectrum_k or g.n
                if k > g.n:
                    warnings.warn(f"{run.msg('k_clamped')}: k={k}, n={g.n}", TruncationWarning, stacklevel=2)
                    k = g.n
                spectrum = eig_sym(g, k)
                stem = f"off_{name}_{spec.label}_s{seed}"
                run.wrote(write_spectrum(run.out / "spectrum" / f"{stem}.csv", spectrum))
                if cfg.export_edges:
                    run.wrote(write_edges(run.out / "edges" / f"{stem}.csv", g))
                summary[stem] = {
                    "n": g.n,
                    "eps": g.eps,
                    "avg_degree": g.avg_degree,
                    "components": g.n_components,
                }
                run.say(f"  ✅ {stem}: n={g.n}")
    run.wrote(atomic_write_json(run.out / "spectrum_summary.json", summary))
    return None


def _emit_curve(run: Run, name: str, curve, plots=(), by: str = "n") -> None:
    run.wrote(curve.to_csv(run.out / f"{name}.csv"))
    run.wrote(atomic_write_json(run.out / f"{name}_summary.json", curve.summary(by)))
    for failure in curve.failures:
        warnings.warn(f"{run.msg('cell_failed')} n={failure.n} seed={failure.seed} "
                      f"{failure.kernel}: {failure.note}", stacklevel=2)
    if run.cfg.plots:
        for metric in plots:
            run.wrote(plot_medians(curve, metric, run.out / "plots" / f"{name}_{metric}.svg", by=by))


def _check(run: Run, command: str, curve, args):
    fixtures = load_fixtures(run.cfg.fixtures)
    if args.regen_oracle:
        # Only an explicit --fixtures path is rewritten in place.
        target = Path(args.fixtures) if args.fixtures else run.out / ORACLE_NAME
        fixtures = regen_oracle(command, curve, target, base=fixtures)
        if not args.fixtures:
            run.wrote(target)
        run.say(f"  ✅ {run.msg('oracle_regenerated')}: {target}")
    return check_oracle(command, curve, fixtures, run.cfg)


def cmd_converge(run: Run, args):
    cfg = run.cfg
    curve = convergence_sweep(cfg, verbose=run.verbose)
    _emit_curve(run, "converge", curve, CONVERGE_PLOTS)
    kinds = {spec.kind for spec in cfg.kernels}
    if {"dense", "sparse"} <= kinds:
        report = densevs_sparse_report(cfg, curve)
        run.wrote(write_csv(run.out / "dense_vs_sparse.csv", report.header(), report.table))
    return _check(run, "converge", curve, args)


def cmd_train(run: Run, args):
    """Train the regression network on one graph; then sweep the penalty weights."""
    cfg = run.cfg
    m = get_manifold(cfg.manifold)
    result, _, _ = train_regression(cfg, m, kernel_config(cfg.kernels[0], m), cfg.seeds[0],
                                    cfg.train.penalty_weight, verbose=run.verbose)
    run.wrote(write_loss(run.out / "loss.csv", result.history))
    run.wrote(write_checkpoint(run.out / "model.ckpt", result.arch))
    for l in range(result.arch.L):
        for p in range(result.arch.widths[l + 1]):
            for q in range(result.arch.widths[l]):
                run.wrote(write_filter(run.out / "filters" / f"layer{l}_p{p}_q{q}.csv",
                                       result.arch.filter(l, p, q)))
    run.say(f"  ✅ {run.msg('loss')}: {result.history[-1].loss:.6g}")

    if len(cfg.penalty_grid) < 2:
        return None
    curve = penalty_sweep(cfg, verbose=run.verbose)
    _emit_curve(run, "penalty", curve, ("gnn_err",), by="param")
    return _check(run, "penalty", curve, args)


def cmd_transfer(run: Run, args):
    curve = transferability_eval(run.cfg, verbose=run.verbose)
    _emit_curve(run, "transfer", curve, ("transfer_diff",))
    return _check(run, "transfer", curve, args)


def cmd_classify(run: Run, args):
    curve = classify_experiment(run.cfg, verbose=run.verbose)
    _emit_curve(run, "classify", curve)
    return _check(run, "classify", curve, args)


def parse_args(argv=None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="geognn - geometric graph neural network convergence experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Spectra of the default circle configuration
    python main.py spectrum

    # Convergence sweep with 8 workers into a custom directory
    python main.py converge --config configs/circle.yaml --jobs 8 --out results/circle

    # Validate a configuration without running anything
    python main.py classify --config configs/classify.yaml --dry-run

    # Regenerate the medians into <out>/oracle.json for review
    python main.py converge --regen-oracle

    # Rewrite the committed fixtures file in place
    python main.py converge --regen-oracle --fixtures fixtures/oracle.json
        """,
    )

    parser.add_argument("command", choices=COMMANDS, help="Experiment to run")

    parser.add_argument(
        "--config",
        type=str,
        default=os.getenv("GEOGNN_CONFIG", "configs/circle.yaml"),
        help="YAML run configuration",
    )

    parser.add_argument("--out", type=str, help="Output directory (overrides `output`)")

    parser.add_argument(
        "--seed",
        type=int,
        help="First seed; the seed list becomes seed, seed+1, ... with the same length",
    )

    parser.add_argument(
        "--jobs",
        type=int,
        default=int(os.getenv("GEOGNN_JOBS", "0")) or None,
        help="Worker threads (default: all cores)",
    )

    parser.add_argument(
        "--mode",
        choices=["frozen", "readout_retrain"],
        help="Transfer mode (overrides transfer.mode)",
    )

    parser.add_argument(
        "--dry-run", action="store_true", help="Validate the configuration and exit"
    )

    parser.add_argument(
        "--regen-oracle",
        action="store_true",
        help="Regenerate the fixture medians from this run (into --fixtures if given, "
        "else <out>/oracle.json)",
    )

    parser.add_argument(
        "--fixtures",
        type=str,
        help="Fixtures file (overrides `fixtures`); the only path --regen-oracle rewrites in place",
    )

    parser.add_argument(
        "--quiet", "-q", action="store_true", help="Suppress verbose output"
    )

    parser.add_argument(
        "--lang",
        type=str,
        choices=["cn", "en"],
        default=os.getenv("GEOGNN_LANG", "cn"),
        help="Console language (cn or en, default: cn)",
    )

    return parser.parse_args(argv)


def load_config(args) -> SweepConfig:
    """Load the configuration and apply the scalar flag overrides."""
    cfg = SweepConfig.from_file(args.config)
    if args.out:
        cfg.output = args.out
    if args.seed is not None:
        cfg.seeds = [args.seed + i for i in range(len(cfg.seeds))]
    if args.jobs:
        cfg.jobs = args.jobs
    if args.mode:
        cfg.transfer = replace(cfg.transfer, mode=args.mode)
    if args.fixtures:
        cfg.fixtures = args.fixtures
    cfg.check(min_seeds=3)
    return cfg


def main(argv=None) -> int:
    args = parse_args(argv)
    lang = args.lang
    verbose = not args.quiet

    try:
        cfg = load_config(args)
    except (ConfigError, ValueError) as e:
        print(f"❌ {get_message('config_invalid', lang)}: {e}")
        return EXIT_CONFIG
    except OSError as e:
        print(f"❌ {get_message('error', lang)}: {e}")
        return EXIT_CONFIG
    update_runtime_config(execution=ExecutionConfig(jobs=cfg.jobs, verbose=verbose))

    if verbose:
        print("=" * 50)
        print(f"geognn {geognn.__version__} - {get_message(args.command, lang)}")
        print("=" * 50)
        print(f"{get_message('config', lang)}: {args.config}")
        print(f"{get_message('config_hash', lang)}: {cfg.config_hash()}")
        print(f"{get_message('seeds', lang)}: {cfg.seeds}")
        print(f"{get_message('workers', lang)}: {resolve_workers(None, cfg)}")
        print(f"{get_message('output_dir', lang)}: {cfg.output}")
        print("=" * 50)

    if args.dry_run:
        print(f"✅ {get_message('config_valid', lang)}. {get_message('dry_run', lang)}")
        # Trend checks are skipped below the fixtures' seed count.
        try:
            min_seeds = int(load_fixtures(cfg.fixtures).get("min_seeds", DEFAULT_MIN_SEEDS))
        except (OSError, ValueError) as e:
            print(f"❌ {get_message('error', lang)}: {type(e).__name__}: {e}")
            return EXIT_CONFIG
        ok, message = cfg.validate(min_seeds=min_seeds)
        if not ok:
            print(f"⚠️ {get_message('trends_skipped', lang)}: {message}")
        return EXIT_OK

    manifest = RunManifest(
        command=args.command,
        config=cfg.to_dict(),
        config_hash=cfg.config_hash(),
        seeds=list(cfg.seeds),
        version=geognn.__version__,
    )
    run = Run(cfg, manifest, verbose, lang)
    handlers = {
        "spectrum": lambda: cmd_spectrum(run),
        "converge": lambda: cmd_converge(run, args),
        "train": lambda: cmd_train(run, args),
        "transfer": lambda: cmd_transfer(run, args),
        "classify": lambda: cmd_classify(run, args),
    }

    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            with manifest.stage(args.command):
                result = handlers[args.command]()
    except (OSError, GeoGnnError, ValueError) as e:
        print(f"❌ {get_message('error', lang)}: {type(e).__name__}: {e}")
        return EXIT_CONFIG

    for w in caught:
        manifest.add_warning(f"{w.category.__name__}: {w.message}")

    exit_code = EXIT_OK
    if result is not None:
        manifest.checks = result.to_dict()
        if verbose:
            print(f"\n{get_message('acceptance', lang)}:")
            for check in result.checks:
                mark = {FAIL: "❌", SKIP: "⏭️"}.get(check.status, "✅")
                print(f"  {mark} {check.name}  {check.message}")
        if not result.passed:
            exit_code = EXIT_ACCEPTANCE
        print(("✅ " + get_message("acceptance_passed", lang)) if result.passed
              else ("❌ " + get_message("acceptance_failed", lang)))
    manifest.exit_code = exit_code

    try:
        manifest.write(cfg.output)
    except OSError as e:
        print(f"❌ {get_message('error', lang)}: {e}")
        return EXIT_CONFIG

    if verbose:
        if manifest.warnings:
            print(f"\n{get_message('warnings', lang)}: {len(manifest.warnings)}")
            for text in manifest.warnings:
                print(f"  - {text}")
        print(f"\n{get_message('files_written', lang)}: {len(manifest.outputs)}")
        print(f"{get_message('elapsed', lang)}: {time.perf_counter() - start:.1f}s")
        print(f"✅ {get_message('done', lang)}")
        print("=" * 50)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
