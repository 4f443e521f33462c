"""Tests for configuration, datasets, sweeps, results and acceptance checks."""

import json
import math

import numpy as np
import pytest

from geognn.config.sweep import KernelSpec, SweepConfig
from geognn.errors import (
    ConfigError,
    CountMismatchError,
    MalformedHeaderError,
    NonNumericError,
    SoftAssertionWarning,
)
from geognn.experiments.classify import classify_experiment, family_order
from geognn.experiments.datasets import (
    band_limited_signals,
    cell_seed,
    ring_torus_points,
    split_indices,
    synth_pointcloud_task,
)
from geognn.experiments.manifest import MANIFEST_NAME, RunManifest
from geognn.experiments.off import off_load, parse_off
from geognn.experiments.oracle import FAIL, PASS, SKIP, check_oracle, load_fixtures, regen_oracle
from geognn.experiments.plots import plot_medians
from geognn.experiments.results import CELL_ERROR, ErrorCurve, ErrorRow
from geognn.experiments.sweeps import (
    convergence_sweep,
    densevs_sparse_report,
    penalty_sweep,
    run_cells,
)
from geognn.experiments.transfer import transferability_eval
from geognn.export import fmt, read_checkpoint, read_filter, write_checkpoint, write_filter
from geognn.filters.coeffs import FilterCoeffs
from geognn.gnn.arch import GnnArch, Nonlinearity

TRIANGLE = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"


def make_curve(metric, kernel, values, config_hash="abc", by="n"):
    """Curve from {key: [value per seed]}."""
    rows = []
    for key, per_seed in values.items():
        for seed, value in enumerate(per_seed):
            n, param = (key, math.nan) if by == "n" else (100, float(key))
            rows.append(ErrorRow(n, seed, 0.1, kernel, metric, value, 5, config_hash, param))
    return ErrorCurve(rows, config_hash)


class TestOff:
    def test_parse_triangle(self):
        np.testing.assert_array_equal(parse_off(TRIANGLE), [[0, 0, 0], [1, 0, 0], [0, 1, 0]])

    def test_counts_glued_to_header(self):
        assert parse_off("OFF3 0 0\n0 0 0\n1 1 1\n2 2 2\n").shape == (3, 3)

    def test_comments_and_blank_lines(self):
        text = "# mesh\nOFF\n\n2 0 0  # counts\n0 0 1\n\n0 1 0\n"
        assert parse_off(text).shape == (2, 3)

    def test_empty_file(self):
        with pytest.raises(MalformedHeaderError) as info:
            parse_off("")
        assert info.value.line == 1

    def test_bad_header(self):
        with pytest.raises(MalformedHeaderError):
            parse_off("PLY\n3 0 0\n")

    def test_too_few_vertices(self):
        with pytest.raises(CountMismatchError):
            parse_off("OFF\n3 0 0\n0 0 0\n1 0 0\n")

    def test_non_numeric_vertex(self):
        with pytest.raises(NonNumericError) as info:
            parse_off("OFF\n2 0 0\n0 0 0\n1 x 0\n")
        assert info.value.line == 4

    def test_load_and_subsample(self, tmp_path):
        path = tmp_path / "tri.off"
        path.write_text(TRIANGLE, encoding="utf-8")
        cloud = off_load(path, n=2, seed=0)
        assert cloud.n == 2 and cloud.source == "external"
        with pytest.raises(ValueError):
            off_load(path, n=4)
        with pytest.raises(FileNotFoundError):
            off_load(tmp_path / "missing.off")


class TestSweepConfig:
    def test_missing_required_field(self):
        with pytest.raises(ConfigError) as info:
            SweepConfig.from_dict({"n_grid": [100]})
        assert info.value.field == "manifold"

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError) as info:
            SweepConfig.from_dict({"manifold": "circle", "n_grid": [100], "train": {"lr": 0.1}})
        assert info.value.field == "train.lr"

    def test_unknown_kernel_key(self):
        with pytest.raises(ConfigError) as info:
            SweepConfig.from_dict({"manifold": "circle", "n_grid": [100], "kernels": [{"bogus": 1}]})
        assert info.value.field == "kernels[0].bogus"

    def test_kernels_are_built(self):
        cfg = SweepConfig.from_dict(
            {"manifold": "circle", "n_grid": [100], "kernels": [{"kind": "sparse", "name": "knn"}]}
        )
        assert cfg.kernels[0].label == "knn"

    @pytest.mark.parametrize(
        "changes,field",
        [
            ({"manifold": "klein"}, "manifold"),
            ({"n_grid": [200, 100]}, "n_grid"),
            ({"seeds": [0, 1]}, "seeds"),
            ({"kernels": [KernelSpec("dense"), KernelSpec("dense")]}, "kernels"),
            ({"quadrature": 32}, "quadrature"),
            ({"signal_mode": 25}, "signal_mode"),
            ({"off_files": ["cloud.xyz"]}, "off_files[0]"),
            ({"off_files": ["cloud.off"], "off_n": 1}, "off_n"),
        ],
    )
    def test_check_names_the_field(self, changes, field):
        cfg = SweepConfig(**{"manifold": "circle", "n_grid": [100, 200], **changes})
        with pytest.raises(ConfigError) as info:
            cfg.check(min_seeds=3)
        assert info.value.field == field

    def test_classify_inputs_are_coordinates(self):
        cfg = SweepConfig(manifold="sphere", n_grid=[300])
        cfg.classify.widths = [1, 8]
        with pytest.raises(ConfigError) as info:
            cfg.check()
        assert info.value.field == "classify.widths"

    def test_validate(self):
        ok, _ = SweepConfig(manifold="circle", n_grid=[100, 200]).validate()
        assert ok
        ok, message = SweepConfig(manifold="circle", n_grid=[100], seeds=[0]).validate()
        assert not ok and message.startswith("seeds")

    def test_config_hash(self):
        a = SweepConfig(manifold="circle", n_grid=[100])
        b = SweepConfig(manifold="circle", n_grid=[100])
        assert a.config_hash() == b.config_hash()
        assert len(a.config_hash()) == 12
        b.output, b.jobs, b.fixtures = "elsewhere", 4, "other.json"
        assert a.config_hash() == b.config_hash()
        b.seeds = [0, 1, 2]
        assert a.config_hash() != b.config_hash()

    def test_from_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("manifold: torus\nn_grid: [100, 200]\narch:\n  K_t: 3\n", encoding="utf-8")
        cfg = SweepConfig.from_file(path)
        assert cfg.manifold == "torus" and cfg.arch.K_t == 3
        with pytest.raises(FileNotFoundError):
            SweepConfig.from_file(tmp_path / "missing.yaml")
        path.write_text("manifold: [circle\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            SweepConfig.from_file(path)


class TestDatasets:
    def test_one_cloud_per_class(self):
        task = synth_pointcloud_task(50, 1, 0)
        assert [item.label for item in task] == [0, 1]
        assert [item.shape for item in task] == ["sphere", "torus"]
        assert all(item.cloud.n == 50 for item in task)

    def test_seeded(self):
        a = synth_pointcloud_task(60, 2, 3)
        b = synth_pointcloud_task(60, 2, 3)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.cloud.points, y.cloud.points)

    def test_small_clouds_rejected(self):
        with pytest.raises(ValueError):
            synth_pointcloud_task(49, 1, 0)

    def test_ring_torus_points(self, rng):
        p = ring_torus_points(500, rng)
        tube = (np.hypot(p[:, 0], p[:, 1]) - 1.0) ** 2 + p[:, 2] ** 2
        np.testing.assert_allclose(tube, 0.16, atol=1e-12)

    def test_split(self):
        train_idx, test_idx = split_indices(8, 0.25, 0)
        assert len(test_idx) == 2
        assert sorted(np.concatenate([train_idx, test_idx]).tolist()) == list(range(8))

    def test_band_limited_signals_have_unit_rms(self, sphere):
        for f in band_limited_signals(sphere, 3, 4, 9, 0):
            assert np.linalg.norm(f.coeffs) == pytest.approx(math.sqrt(sphere.volume))
            assert np.all(f.coeffs[4:] == 0)

    def test_cell_seed(self):
        assert np.array_equal(cell_seed(1, 100).generate_state(4), cell_seed(1, 100).generate_state(4))
        assert not np.array_equal(cell_seed(1, 100).generate_state(4), cell_seed(1, 200).generate_state(4))


class TestResults:
    def test_medians_over_seeds(self):
        curve = make_curve("filter_err", "dense", {100: [0.3, 0.1, 0.2], 200: [0.1, math.nan, 0.05]})
        assert curve.medians("filter_err", "dense") == pytest.approx({100: 0.2, 200: 0.075})
        assert curve.seeds_per_n("filter_err") == {100: 3, 200: 2}

    def test_failures_and_summary(self):
        curve = make_curve("gnn_err", "sparse", {100: [1.0]})
        curve.add(ErrorRow(200, 0, math.nan, "sparse", CELL_ERROR, math.nan, 5, "abc", note="boom"))
        summary = curve.summary()
        assert summary["failures"] == 1 and summary["rows"] == 2
        assert summary["medians"] == {"sparse": {"gnn_err": {"100": 1.0}}}
        assert curve.metrics() == ["gnn_err"]

    def test_csv_round_trip_keeps_values(self, tmp_path):
        curve = make_curve("eval_err", "dense", {100: [0.1, 1 / 3]})
        curve.to_csv(tmp_path / "c.csv")
        back = ErrorCurve.from_csv(tmp_path / "c.csv")
        assert [r.value for r in back.rows] == [0.1, 1 / 3]
        assert back.config_hash == "abc"
        assert math.isnan(back.rows[0].param)

    def test_rows_sort_by_metric_kernel_n_seed(self):
        curve = ErrorCurve([
            ErrorRow(200, 0, 0.1, "dense", "b", 1.0, 5, "h"),
            ErrorRow(100, 1, 0.1, "dense", "a", 1.0, 5, "h"),
            ErrorRow(100, 0, 0.1, "dense", "a", 1.0, 5, "h"),
        ]).sorted()
        assert [(r.metric, r.n, r.seed) for r in curve.rows] == [("a", 100, 0), ("a", 100, 1), ("b", 200, 0)]


class _Flaky:
    def __call__(self, cell):
        if cell == 2:
            raise RuntimeError("boom")
        return [ErrorRow(cell, 0, 0.1, "dense", "x", float(cell), 5, "h")]

    def failure_row(self, cell, exc):
        return ErrorRow(cell, 0, math.nan, "dense", CELL_ERROR, math.nan, 5, "h", note=str(exc))


class TestSweeps:
    def test_failing_cell_becomes_a_row(self):
        rows = run_cells([1, 2, 3], _Flaky(), workers=2)
        assert [r.metric for r in rows] == ["x", CELL_ERROR, "x"]
        assert rows[1].note == "boom"

    def test_identity_filter_converges_exactly(self):
        cfg = SweepConfig(
            manifold="circle", n_grid=[60, 120], seeds=[0], kernels=[KernelSpec("dense")],
            filter=[1.0], quadrature=128,
        )
        curve = convergence_sweep(cfg, jobs=1)
        assert curve.failures == []
        for row in curve.select("filter_err"):
            assert row.value == pytest.approx(0.0, abs=1e-12)
        assert {"eval_err", "efun_err", "op_err", "gnn_err", "avg_degree"} <= set(curve.metrics())
        assert curve.seeds_per_n("gnn_err") == {60: 1, 120: 1}
        assert curve.config_hash == cfg.config_hash()

    def test_dense_sparse_needs_both_kinds(self):
        cfg = SweepConfig(manifold="circle", n_grid=[100], kernels=[KernelSpec("dense")])
        with pytest.raises(ValueError):
            densevs_sparse_report(cfg, ErrorCurve())

    def test_dense_sparse_fails_only_everywhere(self):
        cfg = SweepConfig(manifold="circle", n_grid=[100, 200])
        curve = make_curve("filter_err", "dense", {100: [0.1], 200: [0.3]})
        curve.extend(make_curve("filter_err", "sparse", {100: [0.2], 200: [0.2]}).rows)
        with pytest.warns(SoftAssertionWarning):
            report = densevs_sparse_report(cfg, curve)
        assert report.comparisons == {100: True, 200: False}
        assert report.passed
        assert report.table[0][:1] == [100]

    @pytest.mark.parametrize("mode", ["frozen", "readout_retrain"])
    def test_transfer_to_the_training_size_is_zero(self, mode):
        cfg = SweepConfig(manifold="circle", n_grid=[60], seeds=[0], kernels=[KernelSpec("dense")])
        cfg.train.epochs, cfg.train.samples = 2, 2
        cfg.transfer.n_train, cfg.transfer.n_targets = 60, [60, 120]
        cfg.transfer.signals, cfg.transfer.quadrature = 1, 64
        curve = transferability_eval(cfg, mode, jobs=1)
        assert curve.failures == []
        diffs = curve.medians("transfer_diff")
        assert diffs[60] == pytest.approx(0.0, abs=1e-12)
        assert math.isfinite(diffs[120])
        assert {r.param for r in curve.rows} == {60.0}

    def test_penalty_sweep_rows_per_weight(self):
        cfg = SweepConfig(manifold="circle", n_grid=[60], seeds=[0], kernels=[KernelSpec("dense")],
                          penalty_grid=[0.0, 1.0], quadrature=64)
        cfg.train.n, cfg.train.epochs, cfg.train.samples = 60, 2, 2
        curve = penalty_sweep(cfg, jobs=1)
        assert curve.failures == []
        assert {"gnn_err", "max_filter_err", "train_loss", "penalty"} <= set(curve.metrics())
        assert {r.param for r in curve.rows} == {0.0, 1.0}
        assert {r.n for r in curve.rows} == {60}
        penalties = {r.param: r.value for r in curve.select("penalty")}
        assert penalties[0.0] == 0.0
        assert math.isfinite(penalties[1.0]) and penalties[1.0] >= 0.0
        for row in curve.select("gnn_err"):
            assert math.isfinite(row.value)

    def test_small_classification_run(self):
        cfg = SweepConfig(manifold="sphere", n_grid=[50], seeds=[0])
        c = cfg.classify
        c.n, c.n_transfer, c.clouds_per_class = 50, 60, 2
        c.widths, c.K_t, c.epochs = [3, 4], 2, 1
        c.kernel = KernelSpec("dense", eps_rule="manual", eps=0.5)
        curve = classify_experiment(cfg, jobs=1)
        assert curve.failures == []
        assert curve.kernels() == ["gnn", "graph_filter", "lipschitz_gnn"]
        for row in curve.select("test_accuracy"):
            assert 0.0 <= row.value <= 1.0


class TestOracle:
    def fixtures(self, **section):
        return {"min_seeds": 2, "rtol": 0.2, "converge": section}

    def test_decreasing_trend(self):
        curve = make_curve("filter_err", "dense", {100: [0.4, 0.5], 200: [0.2, 0.3]})
        result = check_oracle("converge", curve, self.fixtures(decreasing=[{"metric": "filter_err", "kernel": "dense"}]))
        assert [c.status for c in result.checks] == [PASS, SKIP]
        assert result.passed

    def test_missing_medians_are_reported(self):
        curve = make_curve("filter_err", "dense", {100: [0.4, 0.5]})
        result = check_oracle("converge", curve, self.fixtures(medians={}))
        assert [(c.name, c.status) for c in result.checks] == [("committed medians", SKIP)]
        assert "--regen-oracle" in result.checks[0].message

    def test_increasing_curve_fails(self):
        curve = make_curve("filter_err", "dense", {100: [0.1, 0.1], 200: [0.3, 0.3]})
        result = check_oracle("converge", curve, self.fixtures(decreasing=[{"metric": "filter_err", "kernel": "dense"}]))
        assert not result.passed
        assert result.failed()[0].name.startswith("dense/filter_err")

    def test_too_few_seeds_skip(self):
        curve = make_curve("filter_err", "dense", {100: [0.1], 200: [0.3]})
        with pytest.warns(SoftAssertionWarning):
            result = check_oracle("converge", curve, self.fixtures(decreasing=[{"metric": "filter_err"}]))
        assert result.checks[0].status == SKIP
        assert result.passed

    def test_trend_in_param(self):
        curve = make_curve("gnn_err", "dense", {0.0: [1.0, 1.0], 1.0: [0.5, 0.6]}, by="param")
        fixtures = {"min_seeds": 2, "penalty": {"nonincreasing_in_param": [{"metric": "gnn_err"}]}}
        assert check_oracle("penalty", curve, fixtures).checks[0].status == PASS

    def test_committed_medians(self):
        curve = make_curve("filter_err", "dense", {100: [0.55, 0.55]})
        ok = check_oracle("converge", curve, self.fixtures(medians={"dense/filter_err": {"100": 0.5}}))
        bad = check_oracle("converge", curve, self.fixtures(medians={"dense/filter_err": {"100": 0.3}}))
        assert ok.checks[0].status == PASS
        assert bad.checks[0].status == FAIL

    def test_medians_of_another_config_are_skipped(self):
        curve = make_curve("filter_err", "dense", {100: [0.55]})
        result = check_oracle("converge", curve, self.fixtures(
            config_hash="other", medians={"dense/filter_err": {"100": 0.3}}
        ))
        assert [c.status for c in result.checks] == [SKIP]

    def test_regen_then_check(self, tmp_path):
        path = tmp_path / "oracle.json"
        path.write_text(json.dumps({"rtol": 0.2, "converge": {"decreasing": []}}), encoding="utf-8")
        curve = make_curve("filter_err", "dense", {100: [0.4, 0.6], 200: [0.2, 0.2]})
        regen_oracle("converge", curve, path)
        fixtures = load_fixtures(path)
        assert fixtures["converge"]["medians"]["dense/filter_err"] == pytest.approx({"100": 0.5, "200": 0.2})
        assert fixtures["converge"]["config_hash"] == "abc"
        assert check_oracle("converge", curve, fixtures).passed

    def test_regen_from_base_keeps_other_sections(self, tmp_path):
        base = {"rtol": 0.2, "converge": {"decreasing": [{"metric": "filter_err"}]}}
        target = tmp_path / "out" / "oracle.json"
        regen_oracle("converge", make_curve("filter_err", "dense", {100: [0.4]}), target, base=base)
        written = load_fixtures(target)
        assert written["converge"]["decreasing"] == [{"metric": "filter_err"}]
        assert written["converge"]["medians"] == {"dense/filter_err": {"100": 0.4}}
        assert "medians" not in base["converge"]

    def test_missing_fixtures_file(self, tmp_path):
        assert load_fixtures(tmp_path / "none.json") == {}

    def test_classification_thresholds(self):
        curve = make_curve("test_accuracy", "gnn", {300: [0.95, 0.97]})
        fixtures = {"classify": {"thresholds": {"gnn/test_accuracy": 0.9, "graph_filter/test_accuracy": 0.9}}}
        statuses = {c.name: c.status for c in check_oracle("classify", curve, fixtures).checks}
        assert statuses == {
            "gnn/test_accuracy >= 0.9": PASS,
            "graph_filter/test_accuracy >= 0.9": SKIP,
            "committed medians": SKIP,
        }

    def test_family_order_is_soft(self):
        curve = make_curve("test_accuracy", "gnn", {300: [0.6]})
        curve.extend(make_curve("test_accuracy", "lipschitz_gnn", {300: [0.9]}).rows)
        assert family_order(curve)
        curve.extend(make_curve("test_accuracy", "graph_filter", {300: [0.8]}).rows)
        with pytest.warns(SoftAssertionWarning):
            assert not family_order(curve)


class TestExport:
    def test_fmt(self):
        assert fmt(0.1) == "0.10000000000000001"
        assert fmt(math.nan) == "nan"
        assert fmt(True) == "true"
        assert fmt(np.int64(3)) == "3"
        assert fmt(None) == ""

    def test_checkpoint_restores_parameters(self, tmp_path):
        arch = GnnArch.random([1, 3, 2], 4, 9, Nonlinearity.TANH, out_dim=2, pool=True, T_s=0.5)
        back = read_checkpoint(write_checkpoint(tmp_path / "model.ckpt", arch))
        assert back.to_dict() == arch.to_dict()
        for name, value in arch.parameters().items():
            np.testing.assert_array_equal(back.parameters()[name], value)

    def test_not_a_checkpoint(self, tmp_path):
        path = tmp_path / "x.ckpt"
        path.write_text("tensor,index,value\n", encoding="utf-8")
        with pytest.raises(ValueError):
            read_checkpoint(path)

    def test_filter_file(self, tmp_path):
        h = FilterCoeffs([0.25, -1 / 3, 2.0])
        np.testing.assert_array_equal(read_filter(write_filter(tmp_path / "h.csv", h)).h, h.h)
        (tmp_path / "gap.csv").write_text("k,h_k\n0,1.0\n2,1.0\n", encoding="utf-8")
        with pytest.raises(ValueError):
            read_filter(tmp_path / "gap.csv")

    def test_svg_is_deterministic(self, tmp_path):
        curve = make_curve("filter_err", "dense", {100: [0.4], 200: [0.2]})
        a = plot_medians(curve, "filter_err", tmp_path / "a.svg")
        b = plot_medians(curve, "filter_err", tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()
        assert plot_medians(curve, "gnn_err", tmp_path / "none.svg") is None


class TestManifest:
    def test_write(self, tmp_path):
        manifest = RunManifest("converge", {"manifold": "circle"}, "abc", [0, 1], "0.1.0")
        with manifest.stage("sweep"):
            pass
        manifest.add_output(tmp_path / "b.csv", tmp_path)
        manifest.add_output(tmp_path / "a.csv", tmp_path)
        manifest.add_warning("k clamped")
        manifest.add_warning("k clamped")
        data = json.loads(manifest.write(tmp_path).read_text(encoding="utf-8"))
        assert data["outputs"] == ["a.csv", "b.csv"]
        assert data["warnings"] == ["k clamped"]
        assert data["stages"]["sweep"] >= 0
        assert (tmp_path / MANIFEST_NAME).exists()


@pytest.mark.slow
def test_filter_error_shrinks_with_n():
    cfg = SweepConfig(
        manifold="circle", n_grid=[100, 1600], seeds=[0, 1, 2], kernels=[KernelSpec("dense")],
        quadrature=128, alpha_grid=[2.0],
    )
    medians = convergence_sweep(cfg).medians("filter_err", "dense")
    assert medians[1600] < medians[100]
