import numpy as np
import pytest

from inflow_lab.errors import (
    CharacteristicDegeneracyError,
    ConfigurationError,
    DomainError,
    HyperbolicityError,
)
from inflow_lab.systems import (
    decompose_matrices,
    eigendecompose,
    eigendecompose_field,
    characteristic_unknowns,
    from_characteristic,
    get_system,
    jacobian_fd_check,
    list_systems,
    to_characteristic,
)


def test_catalog_names():
    assert list_systems() == ["advection", "burgers", "linear2", "psystem"]


def test_unknown_system():
    with pytest.raises(ConfigurationError):
        get_system("euler")


def test_linear2_canonical_frame():
    decomp = eigendecompose(get_system("linear2"), np.zeros(2))
    np.testing.assert_allclose(decomp.lambdas, [-1.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(decomp.T[:, 0], np.array([1.0, -1.0]) / np.sqrt(2.0), atol=1e-14)
    np.testing.assert_allclose(decomp.T[:, 1], np.array([1.0, 1.0]) / np.sqrt(2.0), atol=1e-14)


def test_burgers_speed_is_state():
    decomp = eigendecompose(get_system("burgers"), np.array([1.25]))
    assert decomp.lambdas[0] == pytest.approx(1.25)
    assert decomp.T[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("name,state", [
    ("advection", [0.3]),
    ("burgers", [1.1]),
    ("linear2", [0.2, -0.1]),
    ("psystem", [1.0, 0.0]),
    ("psystem", [1.3, 0.4]),
])
def test_jacobian_matches_differences(name, state):
    assert jacobian_fd_check(get_system(name), state) < 1e-6


def test_psystem_eigenvalues():
    decomp = eigendecompose(get_system("psystem"), np.array([1.0, 0.0]))
    np.testing.assert_allclose(decomp.lambdas, [-np.sqrt(2.0), np.sqrt(2.0)], rtol=1e-12)


def test_psystem_domain():
    with pytest.raises(DomainError):
        get_system("psystem").evaluate_flux(np.array([-0.5, 0.0]))


def test_wrong_component_count():
    with pytest.raises(ConfigurationError):
        get_system("linear2").evaluate_flux(np.zeros(3))


def test_complex_eigenvalues_rejected():
    with pytest.raises(HyperbolicityError):
        decompose_matrices(np.array([[0.0, -1.0], [1.0, 0.0]]))


def test_repeated_eigenvalues_rejected():
    with pytest.raises(HyperbolicityError):
        decompose_matrices(np.eye(2))


def test_eigenvalue_floor():
    with pytest.raises(CharacteristicDegeneracyError):
        eigendecompose(get_system("burgers"), np.array([0.0]))
    # disabled floor
    decomp = decompose_matrices(np.array([[0.0]]), lambda_floor=0.0)
    assert decomp.lambdas[0] == 0.0


def test_batched_decomposition():
    system = get_system("psystem")
    rng = np.random.default_rng(3)
    states = system.state(0.05 * rng.standard_normal((4, 5, 2)))
    decomp = eigendecompose_field(system, states)
    assert decomp.lambdas.shape == (4, 5, 2)
    assert decomp.residual(system.evaluate_jacobian(states)) < 1e-12
    assert np.all(np.diff(decomp.lambdas, axis=-1) > 0)
    np.testing.assert_allclose(np.linalg.norm(decomp.T, axis=-2), 1.0, rtol=1e-12)


def test_characteristic_unknowns_invert():
    decomp = eigendecompose(get_system("psystem"), np.array([1.1, 0.2]))
    V = np.array([0.3, -0.7])
    np.testing.assert_allclose(from_characteristic(decomp, to_characteristic(decomp, V)), V, atol=1e-14)


def test_characteristic_unknowns_pair():
    decomp = eigendecompose(get_system("linear2"), np.zeros(2))
    unknowns = characteristic_unknowns(decomp, np.array([1.0, 0.0]))
    assert unknowns.g is None
    unknowns = characteristic_unknowns(decomp, np.array([1.0, 0.0]), np.array([0.0, 2.0]))
    np.testing.assert_allclose(from_characteristic(decomp, unknowns.f), [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(from_characteristic(decomp, unknowns.g), [0.0, 2.0], atol=1e-14)
