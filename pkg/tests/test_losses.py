import numpy as np
import pytest

from pinnlab.Activation import ReLU, Tanh
from pinnlab.AutoDiff import eval_jet2, fd_gradient_oracle, parameter_gradient
from pinnlab.Collocation import CollocationSet, build_slit_domain
from pinnlab.Error import DimensionMismatch, InputError, StencilOutOfRange, UnsupportedExponent
from pinnlab.Losses import GridData, LossBreakdown, LossWeights, adpinn_loss, adpinn_objective, \
    evaluate_in_precision, fd_loss, fdpinn_loss, fdpinn_objective, ridge_penalty, with_ridge
from pinnlab.Network import init_network
from pinnlab.Poisson import POISSON_BOUNDARY, POISSON_RESIDUAL, PoissonResidualFD
from pinnlab.Witness import interpolate_values


@pytest.mark.travis
def test_loss_weights_validation():
    with pytest.raises(UnsupportedExponent):
        LossWeights(nu=3)
    with pytest.raises(InputError):
        LossWeights(alpha_B=-1.0)
    w = LossWeights(alpha_B=100.0)
    assert w.alpha_B == 100.0 and w.nu == 2


@pytest.mark.travis
def test_breakdown_total_is_sum_of_terms():
    breakdown = LossBreakdown(pde_term=1.0, boundary_term=0.5, data_term=0.25, ridge_term=0.125, divergence_term=2.0)
    values = breakdown.values()
    assert values["total"] == 3.875
    assert set(values.keys()) == set(LossBreakdown.TERMS + ["total"])
    assert breakdown.to_row(7)["iteration"] == 7


@pytest.mark.travis
@pytest.mark.parametrize("nu", [1, 2])
def test_adpinn_loss_matches_pointwise_residuals(slit_coarse, nu):
    grid, colloc, system, u_fdm = slit_coarse
    net = init_network((2, 6, 6, 1), Tanh(), 3)
    w   = LossWeights(alpha_F=1.0, alpha_B=10.0, nu=nu)

    loss = adpinn_loss(net, colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, w)
    jet  = eval_jet2(net, colloc.interior)
    residual = -(jet.hess[:, 0, 0, 0] + jet.hess[:, 0, 1, 1]) - 1.0
    boundary = net.eval(colloc.boundary)[:, 0]
    expected_pde      = np.mean(np.abs(residual)**nu)
    expected_boundary = 10.0*np.mean(np.abs(boundary)**nu)

    assert loss.pde_term == pytest.approx(expected_pde, rel=1e-12)
    assert loss.boundary_term == pytest.approx(expected_boundary, rel=1e-12)
    assert loss.data_term == 0.0
    assert loss.total == pytest.approx(expected_pde + expected_boundary, rel=1e-12)


@pytest.mark.travis
def test_adpinn_data_term():
    net    = init_network((2, 4, 1), Tanh(), 0)
    points = np.array([[0.1, 0.2], [0.3, -0.4], [-0.5, 0.6]])
    colloc = CollocationSet(np.array([[0.0, 0.0]]), [], points, np.array([1.0, -1.0, 0.5]))
    loss   = adpinn_loss(net, colloc, None, None, LossWeights(alpha_D=2.0))
    expected = 2.0*np.mean((net.eval(points)[:, 0] - np.array([1.0, -1.0, 0.5]))**2)
    assert loss.data_term == pytest.approx(expected, rel=1e-12)
    assert loss.pde_term == 0.0


@pytest.mark.travis
@pytest.mark.parametrize("nu", [1, 2])
def test_adpinn_gradient(slit_coarse, nu):
    grid, colloc, system, u_fdm = slit_coarse
    net       = init_network((2, 5, 5, 1), Tanh(), 8)
    objective = adpinn_objective(colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, LossWeights(alpha_B=100.0, nu=nu))
    exact     = parameter_gradient(net, objective)
    reference = fd_gradient_oracle(net, objective, 1e-6)
    assert exact.breakdown["total"] == pytest.approx(exact.objective_value)
    assert np.allclose(exact.grad, reference, rtol=1e-5, atol=1e-7)


@pytest.mark.travis
def test_fd_loss_of_fdm_solution(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    D_res = PoissonResidualFD(grid, colloc, system)
    loss  = fd_loss(u_fdm, D_res, None, LossWeights())
    print("FD loss of the FDM solution: %.3e" % loss.total)
    assert loss.total <= 1e-16
    assert loss.boundary_term == 0.0

    # the zero field leaves -1 in every interior row
    zero = fd_loss(np.zeros(grid.num_nodes), D_res, None, LossWeights())
    assert zero.pde_term == pytest.approx(1.0)


@pytest.mark.travis
def test_fd_loss_data_term(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    D_res = PoissonResidualFD(grid, colloc, system)
    data  = GridData([3], [2.0])
    loss  = fd_loss(np.zeros(grid.num_nodes), D_res, data, LossWeights(alpha_F=0.0))
    assert loss.data_term == 4.0
    assert loss.pde_term == 0.0


@pytest.mark.travis
def test_fd_loss_dimension_mismatch(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    D_res = PoissonResidualFD(grid, colloc, system)
    with pytest.raises(DimensionMismatch):
        fd_loss(np.zeros(grid.num_nodes - 1), D_res, None, LossWeights())


@pytest.mark.travis
def test_fdpinn_loss_of_interpolated_solution(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    D_res = PoissonResidualFD(grid, colloc, system)
    net   = interpolate_values(grid.node_coordinates(), u_fdm, ReLU())
    loss  = fdpinn_loss(net, colloc, D_res, LossWeights())
    print("FD-PINN loss of the interpolant: %.3e" % loss.total)
    assert loss.total <= 1e-8


@pytest.mark.travis
def test_fdpinn_rejects_other_collocation(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    D_res = PoissonResidualFD(grid, colloc, system)
    other_grid, other_colloc = build_slit_domain(0.5)
    with pytest.raises(StencilOutOfRange):
        fdpinn_objective(other_colloc, D_res, LossWeights())


@pytest.mark.travis
def test_ridge_penalty():
    theta = np.array([3.0, -4.0])
    assert ridge_penalty(theta, LossWeights(alpha_theta=0.5, q=2)) == pytest.approx(2.5)
    assert ridge_penalty(theta, LossWeights(alpha_theta=0.5, q=1)) == pytest.approx(3.5)
    with pytest.raises(UnsupportedExponent):
        ridge_penalty(theta, LossWeights(alpha_theta=0.5, q=3))


@pytest.mark.travis
def test_ridge_term_enters_objective_and_gradient(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    net   = init_network((2, 4, 1), Tanh(), 2)
    w     = LossWeights(alpha_theta=1e-2, q=2)
    D_res = PoissonResidualFD(grid, colloc, system)
    objective = with_ridge(fdpinn_objective(colloc, D_res, w), w)

    exact = parameter_gradient(net, objective)
    assert exact.breakdown["ridge_term"] == pytest.approx(1e-2*np.linalg.norm(net.flatten()))
    assert np.allclose(exact.grad, fd_gradient_oracle(net, objective, 1e-6), rtol=1e-5, atol=1e-8)


@pytest.mark.travis
def test_evaluate_in_float32(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    net       = init_network((2, 8, 8, 1), Tanh(), 5)
    objective = adpinn_objective(colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, LossWeights())
    single    = evaluate_in_precision(net, objective, np.float32)
    double    = adpinn_loss(net, colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, LossWeights())
    assert single.total != double.total
    assert single.total == pytest.approx(double.total, rel=1e-4)
