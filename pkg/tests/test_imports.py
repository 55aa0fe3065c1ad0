import pytest


def test_imports():
    import inflow_lab
    import inflow_lab.harness
    import inflow_lab.pipe
    import inflow_lab.solvers
    import inflow_lab.systems
    import inflow_lab.transport

    assert inflow_lab.__version__ == "0.1.0"


def test_public_names_resolve():
    import inflow_lab
    from inflow_lab import harness, pipe, solvers, systems, transport

    for module in (inflow_lab, harness, pipe, solvers, systems, transport):
        for name in module.__all__:
            assert hasattr(module, name), f"{module.__name__}.{name}"
