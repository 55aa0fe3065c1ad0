import pytest

from inflow_lab.config import LabConfig, set_config


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the default LabConfig."""
    set_config(LabConfig())
    yield
    set_config(LabConfig())
