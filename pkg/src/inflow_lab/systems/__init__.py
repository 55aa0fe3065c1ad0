"""Catalog of hyperbolic flux systems and their eigenstructure."""

from .flux import (
    CATALOG,
    FluxSystem,
    get_system,
    jacobian_fd_check,
    list_systems,
)
from .eigen import (
    CharacteristicUnknowns,
    EigenDecomposition,
    characteristic_unknowns,
    decompose_matrices,
    eigendecompose,
    eigendecompose_field,
    from_characteristic,
    to_characteristic,
)

__all__ = [
    "CATALOG",
    "FluxSystem",
    "get_system",
    "jacobian_fd_check",
    "list_systems",
    "CharacteristicUnknowns",
    "EigenDecomposition",
    "characteristic_unknowns",
    "decompose_matrices",
    "eigendecompose",
    "eigendecompose_field",
    "from_characteristic",
    "to_characteristic",
]
