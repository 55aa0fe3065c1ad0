import json

import pytest

from inflow_lab.scripts.inflow_cli import main, parse_arguments


def exit_code(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


@pytest.fixture(autouse=True)
def no_tracking(monkeypatch, tmp_path):
    monkeypatch.delenv("INFLOW_LAB_MLFLOW", raising=False)
    monkeypatch.setenv("INFLOW_LAB_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.chdir(tmp_path)


def write_config(path, **data):
    path.write_text(json.dumps(data))
    return str(path)


def test_parse_defaults():
    args = parse_arguments(["trace"])
    assert args.command == "trace"
    assert args.config is None and not args.mlflow_tracking


def test_trace_default_preset(tmp_path, capsys):
    out = tmp_path / "trace"
    assert exit_code(["trace", "--out", str(out)]) == 0
    assert "trace/trace-affine: PASS" in capsys.readouterr().out
    assert json.loads((out / "report.json").read_text())["passed"]


def test_config_file(tmp_path):
    config = write_config(tmp_path / "c.json", module="trace", preset="trace-constant", seed=4)
    assert exit_code(["trace", "--config", config, "--out", str(tmp_path / "a")]) == 0
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["preset"] == "trace-constant"
    assert report["config"]["seed"] == 4


def test_out_of_range_grid_writes_error(tmp_path, capsys):
    out = tmp_path / "bad"
    out.mkdir()
    config = write_config(tmp_path / "c.json", module="hyp1d", preset="zero", params={"grid": 100})
    assert exit_code(["hyp1d", "--config", config, "--out", str(out)]) == 2
    error = json.loads((out / "error.json").read_text())
    assert error["error"] == "ConfigurationError"
    assert error["exit_code"] == 2
    assert "power of two" in capsys.readouterr().err


def test_module_mismatch(tmp_path):
    config = write_config(tmp_path / "c.json", module="trace", preset="trace-constant")
    assert exit_code(["pipe3d", "--config", config]) == 2


def test_missing_config(tmp_path):
    assert exit_code(["trace", "--config", str(tmp_path / "absent.json")]) == 2


def test_compare(tmp_path, capsys):
    for name in ("a", "b"):
        assert exit_code(["trace", "--out", str(tmp_path / name)]) == 0
    capsys.readouterr()
    cmp_dir = tmp_path / "cmp"
    assert exit_code(["compare", str(tmp_path / "a"), str(tmp_path / "b" / "report.json"),
                      "--out", str(cmp_dir)]) == 0
    summary = json.loads((cmp_dir / "comparison.json").read_text())
    assert summary["series"]["trace"]["x"]["abs"] == 0.0
    assert "trace.x: abs=0.000e+00" in capsys.readouterr().out


def test_compare_mismatch(tmp_path):
    assert exit_code(["trace", "--out", str(tmp_path / "a")]) == 0
    config = write_config(tmp_path / "c.json", module="trace", preset="trace-constant")
    assert exit_code(["trace", "--config", config, "--out", str(tmp_path / "b")]) == 0
    assert exit_code(["compare", str(tmp_path / "a"), str(tmp_path / "b")]) == 2


def test_internal_error_has_own_exit_code(monkeypatch, capsys):
    def broken(config, track):
        raise RuntimeError("boom")

    monkeypatch.setattr("inflow_lab.scripts.inflow_cli.run", broken)
    assert exit_code(["trace"]) == 4
    assert "boom" in capsys.readouterr().err
