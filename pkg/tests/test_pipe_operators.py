import numpy as np
import pytest

from inflow_lab.config import BoundaryKind
from inflow_lab.errors import NoSolutionError, PreconditionError, SolverFailureError
from inflow_lab.pipe import (
    GridInterpolator,
    PipeGrid,
    PipeSlab,
    curl,
    div,
    divcurl_refinement,
    divcurl_solve,
    face_values,
    lp_norm,
    manufactured_divcurl,
    solve_box_poisson,
    w2p_norm,
)

D, N = BoundaryKind.DIRICHLET, BoundaryKind.NEUMANN


def box_laplacian(psi, h):
    """Seven-point Laplacian on the interior nodes."""
    c = psi[1:-1, 1:-1, 1:-1]
    total = -6.0 * c
    total = total + psi[2:, 1:-1, 1:-1] + psi[:-2, 1:-1, 1:-1]
    total = total + psi[1:-1, 2:, 1:-1] + psi[1:-1, :-2, 1:-1]
    total = total + psi[1:-1, 1:-1, 2:] + psi[1:-1, 1:-1, :-2]
    return total / h**2


class TestGrid:
    def test_too_few_nodes(self):
        with pytest.raises(PreconditionError):
            PipeGrid(4)

    def test_quadrature(self):
        grid = PipeGrid(9)
        assert grid.h == pytest.approx(0.25)
        assert grid.integrate(np.ones(grid.shape)) == pytest.approx(8.0)
        assert grid.integrate_face(np.ones((9, 9))) == pytest.approx(4.0)
        assert lp_norm(np.ones(grid.shape), grid, 4.0) == pytest.approx(8.0 ** 0.25)

    def test_linear_fields_differentiate_exactly(self):
        grid = PipeGrid(9)
        x1, x2, x3 = grid.mesh()
        np.testing.assert_allclose(div(np.stack([x1, x2, x3]), grid.h), 3.0, atol=1e-12)
        rotation = curl(np.stack([-x2, x1, np.zeros_like(x1)]), grid.h)
        np.testing.assert_allclose(rotation[:2], 0.0, atol=1e-12)
        np.testing.assert_allclose(rotation[2], 2.0, atol=1e-12)

    def test_w2p_of_constant(self):
        grid = PipeGrid(9)
        assert w2p_norm(np.ones(grid.shape), grid, 4.0) == pytest.approx(8.0 ** 0.25)

    def test_face_values(self):
        grid = PipeGrid(9)
        x1, _, _ = grid.mesh()
        np.testing.assert_array_equal(face_values(x1, 0, 0), -1.0)
        np.testing.assert_array_equal(face_values(x1, 0, -1), 1.0)

    def test_interpolator_is_exact_at_nodes(self):
        grid = PipeGrid(9)
        values = np.random.default_rng(2).standard_normal((3,) + grid.shape)
        np.testing.assert_allclose(GridInterpolator(grid, values)(grid.mesh()), values, atol=1e-10)

    def test_slab_length_mismatch(self):
        grid = PipeGrid(5)
        with pytest.raises(PreconditionError):
            PipeSlab(grid, np.linspace(0.0, 1.0, 3), np.zeros((2,) + grid.shape))


class TestPoisson:
    def test_dirichlet_inverts_stencil(self):
        grid = PipeGrid(9)
        rhs = np.random.default_rng(4).standard_normal(grid.shape)
        psi = solve_box_poisson(rhs, grid.h, (D, D, D))
        np.testing.assert_allclose(box_laplacian(psi, grid.h), rhs[1:-1, 1:-1, 1:-1], atol=1e-10)
        np.testing.assert_array_equal(psi[0], 0.0)

    def test_neumann_cosine_modes(self):
        grid = PipeGrid(17)
        x1, x2, x3 = grid.mesh()
        rhs = np.cos(np.pi * x1) + np.cos(np.pi * x2) * np.cos(np.pi * x3)
        psi = solve_box_poisson(rhs, grid.h, (N, N, N), strict=True)
        np.testing.assert_allclose(box_laplacian(psi, grid.h), rhs[1:-1, 1:-1, 1:-1], atol=1e-9)
        assert abs(grid.integrate(psi)) < 1e-10

    def test_unsolvable_neumann(self):
        grid = PipeGrid(9)
        with pytest.raises(NoSolutionError):
            solve_box_poisson(np.ones(grid.shape), grid.h, (N, N, N), strict=True)

    def test_projection_keeps_zero_mean(self):
        grid = PipeGrid(9)
        psi = solve_box_poisson(np.ones(grid.shape), grid.h, (N, N, N))
        assert abs(grid.integrate(psi)) < 1e-10


class TestDivCurl:
    def test_plug_flow_is_unique(self):
        grid = PipeGrid(16)
        result = divcurl_solve(grid, np.zeros((3,) + grid.shape), 1.0, 1.0)
        np.testing.assert_allclose(result.v[0], 1.0, atol=1e-10)
        np.testing.assert_allclose(result.v[1:], 0.0, atol=1e-10)
        assert result.div_residual < 1e-9

    def test_flux_imbalance(self):
        grid = PipeGrid(9)
        with pytest.raises(NoSolutionError):
            divcurl_solve(grid, np.zeros((3,) + grid.shape), 1.0, 0.5)

    def test_non_solenoidal_vorticity_is_reported(self):
        grid = PipeGrid(17)
        x1, _, _ = grid.mesh()
        omega = np.stack([x1, np.zeros_like(x1), np.zeros_like(x1)])
        with pytest.raises(SolverFailureError):
            divcurl_solve(grid, omega, 0.0, 0.0, residual_factor=1.0)

    def test_manufactured_error_decreases(self):
        coarse, fine = manufactured_divcurl(12), manufactured_divcurl(16)
        assert fine.error < coarse.error

    @pytest.mark.slow
    def test_second_order(self):
        table = divcurl_refinement((16, 32))
        assert 1.7 <= table.observed_order <= 2.3
        assert table.rows[-1].curl_residual <= 5.0 * table.rows[-1].h ** 2
