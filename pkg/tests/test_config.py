import pytest

from inflow_lab import ConfigurationError, DivergenceError, InflowLabError, configure, get_config
from inflow_lab.config import LabConfig


def test_defaults():
    config = get_config()
    assert config.lp_exponent == 4.0
    assert config.tol_gamma == 1e-9
    assert config.eps0 == 0.01


def test_configure_replaces_global():
    config = configure(eps0=0.02)
    assert get_config() is config
    assert get_config().eps0 == 0.02


def test_lp_exponent_must_exceed_three():
    with pytest.raises(ValueError):
        LabConfig(lp_exponent=3.0)


def test_output_dir_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv("INFLOW_LAB_OUTPUT_DIR", str(tmp_path))
    assert LabConfig.from_env().output_dir == tmp_path


def test_updated_ignores_unknown_keys():
    config = LabConfig().updated(cfl=1.0, not_a_field=3)
    assert config.cfl == 1.0


def test_error_exit_codes():
    assert ConfigurationError("x").exit_code == 2
    assert DivergenceError("x").exit_code == 3
    document = DivergenceError("stalled", details={"level": 4}).to_dict()
    assert document == {
        "error": "DivergenceError",
        "message": "stalled",
        "exit_code": 3,
        "details": {"level": 4},
    }
    assert isinstance(ConfigurationError("x"), InflowLabError)
