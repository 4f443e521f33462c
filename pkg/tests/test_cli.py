"""Tests for the command line entry point."""

import json
from pathlib import Path

import pytest
import yaml

from geognn.experiments.manifest import MANIFEST_NAME
from main import EXIT_ACCEPTANCE, EXIT_CONFIG, EXIT_OK, load_config, main, parse_args


@pytest.fixture
def write_config(tmp_path):
    """Write a small circle configuration with overrides; returns its path."""

    def make(**overrides):
        data = {
            "manifold": "circle",
            "n_grid": [20, 30],
            "seeds": [0, 1, 2],
            "kernels": [{"kind": "dense"}],
            "quadrature": 64,
            "plots": False,
            "output": str(tmp_path / "out"),
            "fixtures": str(tmp_path / "oracle.json"),
        }
        data.update(overrides)
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return str(path)

    return make


def test_dry_run_writes_nothing(write_config, tmp_path):
    assert main(["converge", "--config", write_config(), "--dry-run", "-q"]) == EXIT_OK
    assert not (tmp_path / "out").exists()


def test_invalid_config(write_config):
    assert main(["converge", "--config", write_config(manifold="klein"), "-q"]) == EXIT_CONFIG


def test_missing_config(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "none.yaml"), "-q"]) == EXIT_CONFIG


def test_unknown_command():
    with pytest.raises(SystemExit):
        parse_args(["plot"])


def test_flag_overrides(write_config, tmp_path):
    args = parse_args([
        "transfer", "--config", write_config(), "--seed", "10", "--mode", "readout_retrain",
        "--out", str(tmp_path / "elsewhere"), "--jobs", "2",
    ])
    cfg = load_config(args)
    assert cfg.seeds == [10, 11, 12]
    assert cfg.transfer.mode == "readout_retrain"
    assert cfg.output == str(tmp_path / "elsewhere")
    assert cfg.jobs == 2


def test_spectrum_run(write_config, tmp_path):
    path = write_config(spectrum_k=25, K=3, export_edges=True)
    assert main(["spectrum", "--config", path, "-q", "--lang", "en"]) == EXIT_OK

    out = tmp_path / "out"
    manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert manifest["command"] == "spectrum"
    assert manifest["exit_code"] == 0
    assert any(w.startswith("TruncationWarning") for w in manifest["warnings"])
    assert "spectrum/dense_n20_s0.csv" in manifest["outputs"]
    assert "edges/dense_n30_s2.csv" in manifest["outputs"]
    assert "spectrum_summary.json" in manifest["outputs"]

    rows = (out / "spectrum" / "dense_n20_s0.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "index,eigenvalue" and len(rows) == 21
    rows = (out / "spectrum" / "dense_n30_s0.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 26
    alignment = (out / "alignment" / "dense_n30_s1.csv").read_text(encoding="utf-8").splitlines()
    assert alignment[0] == "i,a_i,eval_err,efun_err,op_err" and len(alignment) == 4


def test_spectrum_run_is_reproducible(write_config, tmp_path):
    path = write_config(n_grid=[20])
    main(["spectrum", "--config", path, "-q"])
    first = (tmp_path / "out" / "spectrum" / "dense_n20_s1.csv").read_bytes()
    main(["spectrum", "--config", path, "-q"])
    assert (tmp_path / "out" / "spectrum" / "dense_n20_s1.csv").read_bytes() == first


def test_failed_acceptance_exits_with_two(write_config, tmp_path):
    fixtures = {"converge": {"medians": {"dense/components": {"20": 5.0}}}}
    (tmp_path / "oracle.json").write_text(json.dumps(fixtures), encoding="utf-8")
    assert main(["converge", "--config", write_config(), "-q"]) == EXIT_ACCEPTANCE

    out = tmp_path / "out"
    manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert manifest["exit_code"] == EXIT_ACCEPTANCE
    assert manifest["checks"]["passed"] is False
    assert "converge.csv" in manifest["outputs"]
    assert "converge_summary.json" in manifest["outputs"]


ICOSAHEDRON = str(Path(__file__).resolve().parent.parent / "fixtures" / "icosahedron.off")
MANUAL_DENSE = {"kind": "dense", "eps_rule": "manual", "eps": 1.0, "calibrate": False}


def test_spectrum_of_an_off_cloud(write_config, tmp_path):
    path = write_config(n_grid=[20], kernels=[MANUAL_DENSE], off_files=[ICOSAHEDRON])
    assert main(["spectrum", "--config", path, "-q"]) == EXIT_OK

    out = tmp_path / "out"
    rows = (out / "spectrum" / "off_icosahedron_dense_s0.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "index,eigenvalue" and len(rows) == 13
    summary = json.loads((out / "spectrum_summary.json").read_text(encoding="utf-8"))
    assert summary["off_icosahedron_dense_s2"]["n"] == 12
    assert summary["off_icosahedron_dense_s2"]["components"] == 1
    assert "dense_n20_s0" in summary


def test_off_cloud_is_subsampled_per_seed(write_config, tmp_path):
    path = write_config(n_grid=[20], kernels=[MANUAL_DENSE], off_files=[ICOSAHEDRON], off_n=8)
    assert main(["spectrum", "--config", path, "-q"]) == EXIT_OK
    rows = (tmp_path / "out" / "spectrum" / "off_icosahedron_dense_s1.csv").read_text(encoding="utf-8")
    assert len(rows.splitlines()) == 9


def test_library_value_error_exits_with_one(write_config, capsys):
    path = write_config(n_grid=[20], kernels=[MANUAL_DENSE], off_files=[ICOSAHEDRON], off_n=50)
    assert main(["spectrum", "--config", path, "-q", "--lang", "en"]) == EXIT_CONFIG
    assert "ValueError" in capsys.readouterr().out


def test_regen_writes_into_the_output_directory(write_config, tmp_path):
    assert main(["converge", "--config", write_config(), "-q", "--regen-oracle"]) == EXIT_OK
    assert not (tmp_path / "oracle.json").exists()

    out = tmp_path / "out"
    fixtures = json.loads((out / "oracle.json").read_text(encoding="utf-8"))
    assert fixtures["converge"]["medians"]["dense/filter_err"].keys() == {"20", "30"}
    manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert "oracle.json" in manifest["outputs"]


def test_regen_rewrites_an_explicit_fixtures_path(write_config, tmp_path):
    pinned = tmp_path / "pinned.json"
    pinned.write_text(json.dumps({"converge": {"decreasing": []}}), encoding="utf-8")
    args = ["converge", "--config", write_config(), "-q", "--regen-oracle", "--fixtures", str(pinned)]
    assert main(args) == EXIT_OK

    fixtures = json.loads(pinned.read_text(encoding="utf-8"))
    assert fixtures["converge"]["decreasing"] == []
    assert "dense/filter_err" in fixtures["converge"]["medians"]
    assert not (tmp_path / "out" / "oracle.json").exists()


def test_dry_run_reports_too_few_seeds_for_trends(write_config, capsys):
    assert main(["converge", "--config", write_config(), "--dry-run", "--lang", "en"]) == EXIT_OK
    assert "Too few seeds" in capsys.readouterr().out


def test_dry_run_with_malformed_fixtures(write_config, tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    argv = ["converge", "--config", write_config(), "--dry-run", "--fixtures", str(broken)]
    assert main(argv + ["--lang", "en"]) == EXIT_CONFIG
    assert "JSONDecodeError" in capsys.readouterr().out
