import json
import subprocess
import sys
from pathlib import Path

import pytest

from filtration_lab.cli import (
    main,
    report_to_csv,
    report_to_json,
    run_config,
    validate_config,
)
from filtration_lab.errors import ConfigInvalid
from filtration_lab.suites import REGISTRY, describe_suite, list_suites

CONFIG_DIR = Path(__file__).resolve().parent.parent / "src" / "filtration_lab" / "configs"


def _flab(*args, env=None):
    import os

    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "filtration_lab", *args],
        capture_output=True,
        text=True,
        env=full_env,
    )


def _small_mc_config(**overrides):
    cfg = {
        "schema": "filtration-lab/config-v1",
        "engine": "mc",
        "seed": 20260810,
        "mc": {"lambda": 1.0, "mu": 1.0, "t_real": 10.0, "n_paths": 4000, "z_max": 4.0},
        "suites": ["mc_poisson_compensator"],
    }
    cfg.update(overrides)
    return cfg


class TestRegistry:
    def test_at_least_twelve_suites(self):
        assert len(REGISTRY) >= 12

    def test_listing_is_stable_and_annotated(self):
        text = list_suites()
        assert text == list_suites()
        for name, spec in REGISTRY.items():
            assert name in text
            assert spec.anchor in text

    def test_describe_cites_reference(self):
        text = describe_suite("triple_representation")
        assert "Eq. (prp.spp)" in text
        assert "exact" in text

    def test_describe_unknown(self):
        from filtration_lab.errors import UnknownSuite

        with pytest.raises(UnknownSuite):
            describe_suite("nope")


class TestValidation:
    def test_engine_required(self):
        with pytest.raises(ConfigInvalid):
            validate_config({"suites": ["wrp_representation"]})

    def test_unknown_suite_rejected(self):
        with pytest.raises(ConfigInvalid):
            validate_config({"engine": "exact", "suites": ["nope"]})

    def test_engine_suite_mismatch(self):
        with pytest.raises(ConfigInvalid):
            validate_config({"engine": "exact", "suites": ["mc_poisson_compensator"]})
        with pytest.raises(ConfigInvalid):
            validate_config(_small_mc_config(suites=["wrp_representation"]))

    def test_exact_rejects_mc_keys_and_parallel(self):
        cfg = {"engine": "exact", "suites": ["counterexample_a2"], "mc": {}}
        with pytest.raises(ConfigInvalid):
            validate_config(cfg)
        with pytest.raises(ConfigInvalid):
            validate_config({"engine": "exact", "suites": ["counterexample_a2"]}, parallel=4)

    def test_mc_rejects_fixture(self):
        with pytest.raises(ConfigInvalid):
            validate_config(_small_mc_config(fixture="space_a"))

    def test_bad_expected_outcome(self):
        cfg = {"engine": "exact", "suites": [{"name": "counterexample_a2", "expected_outcome": "maybe"}]}
        with pytest.raises(ConfigInvalid):
            validate_config(cfg)


class TestRunConfig:
    def test_counterexample_polarity(self):
        cfg = json.load(open(CONFIG_DIR / "counterexample_a2.json"))
        report = run_config(cfg)
        assert report["summary"]["failed"] == 0
        row = next(
            c for c in report["checks"] if c["name"] == "disjoint_jumps_orthogonality"
        )
        assert row["outcome"] == "fails" and row["expected"] == "fails" and row["passed"]

    def test_counterexample_without_polarity_fails(self):
        cfg = json.load(open(CONFIG_DIR / "counterexample_a2.json"))
        cfg["suites"] = ["counterexample_a2"]
        report = run_config(cfg)
        assert report["summary"]["failed"] == 1

    def test_report_shape(self):
        report = run_config(_small_mc_config())
        assert report["schema"] == "filtration-lab/report-v1"
        assert report["summary"]["checks"] == len(report["checks"])
        for c in report["checks"]:
            assert {"suite", "name", "anchor", "outcome", "expected", "passed", "evidence"} <= set(c)
        parsed = json.loads(report_to_json(report))
        assert parsed == json.loads(report_to_json(parsed))

    def test_seed_override(self):
        cfg = _small_mc_config()
        r1 = run_config(cfg, seed_override=123)
        assert r1["config"]["seed"] == 123

    def test_csv_table(self):
        report = run_config(_small_mc_config())
        text = report_to_csv(report)
        lines = text.split("\r\n")
        assert lines[0] == "suite,check,anchor,outcome,expected,passed,evidence"
        assert len([ln for ln in lines if ln]) == len(report["checks"]) + 1


class TestCommandLine:
    def test_exit_zero_and_report_written(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(_small_mc_config()))
        out = tmp_path / "report.json"
        csv_out = tmp_path / "report.csv"
        proc = _flab("run", str(cfg_path), "--out", str(out), "--csv", str(csv_out))
        assert proc.returncode == 0, proc.stderr
        report = json.loads(out.read_text())
        assert report["summary"]["failed"] == 0
        assert csv_out.read_text().startswith("suite,check")
        assert "[PASS]" in proc.stderr

    def test_exit_one_on_failed_check_report_still_written(self, tmp_path):
        cfg = _small_mc_config(suites=["mc_negative_controls"])
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "report.json"
        proc = _flab("run", str(cfg_path), "--out", str(out))
        assert proc.returncode == 1
        assert json.loads(out.read_text())["summary"]["failed"] > 0

    def test_exit_two_on_invalid_config(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"engine": "nope", "suites": ["x"]}))
        proc = _flab("run", str(cfg_path))
        assert proc.returncode == 2
        assert "invalid config" in proc.stderr

    def test_env_seed_override(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(_small_mc_config()))
        out = tmp_path / "report.json"
        proc = _flab("run", str(cfg_path), "--out", str(out), env={"FLAB_SEED": "999"})
        assert proc.returncode == 0
        assert json.loads(out.read_text())["config"]["seed"] == 999

    def test_suites_and_describe_commands(self):
        proc = _flab("suites")
        assert proc.returncode == 0
        assert "wrp_representation" in proc.stdout
        proc = _flab("describe", "azema_compensator")
        assert proc.returncode == 0
        assert "Eq. (G.com.gen)" in proc.stdout
        proc = _flab("describe", "nope")
        assert proc.returncode == 2

    def test_main_entry_in_process(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(_small_mc_config()))
        code = main(["run", str(cfg_path), "--out", str(tmp_path / "r.json")])
        assert code == 0
