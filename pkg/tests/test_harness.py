import json
import math

import numpy as np
import pytest

from inflow_lab.config import ModuleName, configure
from inflow_lab.errors import ConfigurationError, SchemaMismatchError
from inflow_lab.harness import (
    PRESETS,
    SUITE,
    ExperimentConfig,
    SolveReport,
    compare,
    config_hash,
    execute,
    get_preset,
    list_presets,
    load_report,
    maybe_log_report,
    run,
    run_suite,
    tracking_enabled,
)
from inflow_lab.harness.experiments import series_gap
from inflow_lab.harness.report import plain, series_csv


class TestPresets:
    def test_suite_presets_exist(self):
        assert all(name in PRESETS for name in SUITE)

    def test_module_listing(self):
        assert "trace-affine" in list_presets(ModuleName.TRACE)
        assert "pipe-lateral" not in list_presets(ModuleName.TRACE)
        assert list_presets() == sorted(PRESETS)

    def test_divcurl_preset_runs_under_pipe3d(self):
        assert "divcurl-manufactured" in list_presets(ModuleName.PIPE3D)
        ExperimentConfig(module="pipe3d", preset="divcurl-manufactured").validate()

    def test_pipe_stability_uses_unit_amplitude(self):
        assert get_preset("pipe-stability").params["profile"]["amplitude"] == 1.0
        assert get_preset("pipe-weak-shear").params["profile"]["amplitude"] == pytest.approx(0.02)
        assert "pipe-weak-shear" not in SUITE

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            get_preset("vortex-ring")


class TestExperimentConfig:
    def test_from_dict(self):
        config = ExperimentConfig.from_dict({"module": "hyp1d", "preset": "zero", "seed": 3})
        assert config.module is ModuleName.HYP1D
        assert config.resolved_params()["system"] == "burgers"

    @pytest.mark.parametrize("data", [
        {"module": "hyp1d", "preset": "zero", "colour": "red"},
        {"preset": "zero"},
        {"module": "hyp2d", "preset": "zero"},
    ])
    def test_malformed(self, data):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_json(tmp_path / "absent.json")

    @pytest.mark.parametrize("module, preset, params, seed", [
        ("trace", "zero", {}, 0),
        ("hyp1d", "zero", {"grid": 100}, 0),
        ("hyp1d", "zero", {"grid": 2048}, 0),
        ("pipe3d", "pipe-zero", {"grid": 128}, 0),
        ("hyp1d", "zero", {"horizon": -1.0}, 0),
        ("hyp1d", "zero", {}, -1),
        ("hyp1d", "zero", {}, 2**64),
    ])
    def test_validation(self, module, preset, params, seed):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(module=module, preset=preset, params=params, seed=seed).validate()

    def test_hash_ignores_output_dir(self, tmp_path):
        a = ExperimentConfig(module="trace", preset="trace-constant")
        b = ExperimentConfig(module="trace", preset="trace-constant", output_dir=tmp_path)
        assert config_hash(a.to_dict()) == config_hash(b.to_dict())
        c = ExperimentConfig(module="trace", preset="trace-constant", seed=1)
        assert config_hash(a.to_dict()) != config_hash(c.to_dict())


def make_report(values, t=(0.0, 1.0, 2.0), preset="p"):
    report = SolveReport(module="trace", preset=preset)
    report.add_series("trace", {"t": list(t), "x": list(values)})
    report.add_verdict("ok", True, 1.0, 2.0)
    return report


class TestReport:
    def test_plain(self):
        data = plain({"a": float("inf"), "b": float("nan"), "c": np.float64(2.0)})
        assert data["a"] == math.inf
        assert math.isnan(data["b"])
        assert type(data["c"]) is float

    def test_infinite_verdict_round_trip(self, tmp_path):
        report = make_report([1.0, 2.0, 3.0])
        report.add_verdict("blowup", False, float("inf"), 1.0)
        report.monitors["ratio"] = float("nan")
        report.write(tmp_path)
        assert "Infinity" in (tmp_path / "report.json").read_text()
        loaded = load_report(tmp_path)
        value = loaded.verdict("blowup").value
        assert isinstance(value, float) and value == math.inf
        assert math.isnan(loaded.monitors["ratio"])

    def test_round_trip(self, tmp_path):
        report = make_report([1.0, 2.0, 3.0])
        report.write(tmp_path)
        assert (tmp_path / "trace.csv").read_text().splitlines()[0] == "t,x"
        loaded = load_report(tmp_path)
        assert loaded.to_dict() == report.to_dict()
        assert loaded.verdict("ok").passed

    def test_series_csv(self):
        assert series_csv({"t": [0.0, 0.5], "x": [1.0, None]}) == "t,x\n0.0,1.0\n0.5,\n"

    def test_malformed_reports(self, tmp_path):
        with pytest.raises(SchemaMismatchError):
            SolveReport.from_dict({"preset": "p"})
        with pytest.raises(ConfigurationError):
            load_report(tmp_path / "missing")
        (tmp_path / "report.json").write_text("{not json")
        with pytest.raises(SchemaMismatchError):
            load_report(tmp_path)

    def test_unknown_verdict(self):
        with pytest.raises(KeyError):
            make_report([0.0, 0.0, 0.0]).verdict("missing")


class TestCompare:
    def test_same_axis(self):
        summary = compare(make_report([1.0, 2.0, 4.0]), make_report([1.0, 2.0, 3.0]))
        assert summary["series"]["trace"]["x"]["abs"] == pytest.approx(1.0)
        assert summary["series"]["trace"]["x"]["rel"] == pytest.approx(0.25)
        assert summary["verdicts"]["ok"]["changed"] is False

    def test_interpolates_other_sampling(self):
        a = make_report([0.0, 1.0, 2.0])
        b = make_report([2.0, 0.0], t=(2.0, 0.0))
        assert compare(a, b)["series"]["trace"]["x"]["abs"] == pytest.approx(0.0, abs=1e-12)

    def test_mismatch(self):
        with pytest.raises(SchemaMismatchError):
            compare(make_report([0.0] * 3), make_report([0.0] * 3, preset="q"))
        other = SolveReport(module="trace", preset="p")
        with pytest.raises(SchemaMismatchError):
            compare(make_report([0.0] * 3), other)


class TestRun:
    def test_trace_report(self, tmp_path):
        report = run(ExperimentConfig(module="trace", preset="trace-constant", output_dir=tmp_path), track=False)
        assert report.passed
        assert report.monitors["exit_time"] == pytest.approx(1.0)
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["provenance"]["config_hash"] == config_hash(data["config"])
        assert (tmp_path / "trace.csv").exists()

    def test_default_output_dir(self, tmp_path):
        configure(output_dir=tmp_path)
        run(ExperimentConfig(module="trace", preset="trace-constant"), track=False)
        assert (tmp_path / "trace-constant" / "report.json").exists()

    def test_translation(self):
        report = execute(ExperimentConfig(module="transport1d", preset="translation",
                                          params={"grid": 64}, seed=5))
        assert report.verdict("transport-exactness").passed
        assert len(report.series["translation"]["t"]) == 6

    def test_compat_vectors_as_documented(self):
        report = execute(ExperimentConfig(module="pipe3d", preset="compat-vectors"))
        assert report.passed
        assert report.verdict("compat-unbalanced-flux").passed

    def test_lateral(self):
        report = execute(ExperimentConfig(module="pipe3d", preset="pipe-lateral",
                                          params={"horizon": 2.0, "samples": 3}))
        assert report.verdict("lateral-invariance").passed

    def test_zero_hyp1d(self):
        report = execute(ExperimentConfig(module="hyp1d", preset="zero", params={"grid": 32}))
        assert report.verdict("outer-convergence").passed
        assert report.verdict("w1inf-stability").passed

    def test_series_gap(self):
        gap, rel = series_gap([0.0, 1.0, 2.0], [1.0, 2.0, 4.0], [0.0, 2.0], [1.0, 3.0])
        assert gap == pytest.approx(1.0)
        assert rel == pytest.approx(0.25)
        assert series_gap([0.0, 1.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]) == (0.0, 0.0)

    def test_budget_failure_becomes_verdict(self):
        report = execute(ExperimentConfig(module="pipe3d", preset="pipe-zero",
                                          params={"boundary": {"kind": "pulse", "amplitude": 10.0},
                                                  "horizon": 0.5, "window": 0.5}))
        assert not report.passed
        assert not report.verdict("pipe-convergence").passed
        assert not report.verdict("pipe-stability").passed
        assert report.monitors["failure"]["error"] == "StabilityBudgetError"
        assert report.monitors["failure"]["exit_code"] == 3

    @pytest.mark.slow
    def test_hyp1d_grid_agreement(self):
        report = execute(ExperimentConfig(module="hyp1d", preset="linear2-small",
                                          params={"grid": 64, "refine_grid": 128, "horizon": 2.0,
                                                  "agreement_tol": 2e-3}))
        assert report.verdict("grid-agreement").passed
        assert "refinement" in report.series
        assert report.monitors["grid_gap"] <= 2e-3

    @pytest.mark.slow
    def test_pipe_grid_agreement_and_epsilon(self):
        report = execute(ExperimentConfig(module="pipe3d", preset="pipe-plug-pulse",
                                          params={"refine_grid": 32, "epsilon_check": True, "dt": 0.1,
                                                  "horizon": 1.0, "window": 1.0}))
        assert report.verdict("grid-agreement").passed
        assert report.monitors["grid_gap"] < 1e-3
        assert report.monitors["epsilon_sensitivity"] < 1e-3

    def test_unknown_case(self):
        with pytest.raises(ConfigurationError):
            execute(ExperimentConfig(module="pipe3d", preset="pipe-zero", params={"case": "warp"}))

    def test_suite_subset(self, tmp_path):
        summary = run_suite(tmp_path, presets=("trace-constant", "compat-vectors"), track=False)
        assert summary["passed"]
        assert [e["preset"] for e in summary["presets"]] == ["trace-constant", "compat-vectors"]
        assert (tmp_path / "compat-vectors" / "report.json").exists()
        assert json.loads((tmp_path / "suite.json").read_text())["passed"]

    def test_suite_records_errors(self, tmp_path):
        summary = run_suite(tmp_path, presets=("trace-constant",), seed=2**64, track=False)
        assert not summary["passed"]
        assert summary["presets"][0]["error"]["exit_code"] == 2


class TestTracking:
    def test_disabled_by_default(self, monkeypatch):
        monkeypatch.delenv("INFLOW_LAB_MLFLOW", raising=False)
        assert not tracking_enabled()
        assert maybe_log_report(make_report([0.0] * 3), enabled=False) is False

    def test_environment_switch(self, monkeypatch):
        monkeypatch.setenv("INFLOW_LAB_MLFLOW", "yes")
        assert tracking_enabled()
