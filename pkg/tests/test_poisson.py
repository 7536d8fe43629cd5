import numpy as np
import pytest

from pinnlab.Activation import Tanh
from pinnlab.AutoDiff import Jet2, eval_jet2, fd_gradient_oracle, parameter_gradient
from pinnlab.Collocation import build_slit_domain
from pinnlab.Losses import LossWeights, adpinn_objective
from pinnlab.Network import init_network, wrap_hard_constraint
from pinnlab.Poisson import DiscreteSystem, POISSON_BOUNDARY, POISSON_RESIDUAL, assemble_poisson_slit, \
    evaluation_points, poisson_hard_constraint, poisson_residual_ad, slit_mask_jet, solve_poisson_fdm


@pytest.mark.travis
def test_assembled_system(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    h = 0.25
    assert system.num_equations == colloc.num_interior
    assert system.num_nodes == grid.num_nodes
    assert abs(system.matrix - system.matrix.T).max() == 0.0
    assert np.allclose(system.matrix.diagonal(), 4.0/(h*h))
    assert np.all(system.rhs == 1.0)

    entries, rhs = system.row(0)
    assert len(entries) == 5
    assert sum(coefficient for node, coefficient in entries) == pytest.approx(0.0, abs=1e-9)

    df = system.to_dataframe()
    assert list(df.columns) == ["equation", "node", "coefficient", "rhs"]
    assert len(df) == 5*system.num_equations


@pytest.mark.travis
@pytest.mark.parametrize("h", [0.25, 0.1, 0.05])
def test_fdm_solution(h):
    grid, colloc = build_slit_domain(h)
    system = assemble_poisson_slit(grid, colloc)
    u      = solve_poisson_fdm(system)

    relative = np.linalg.norm(system.matrix.dot(u[system.node_map]) - system.rhs)/np.linalg.norm(system.rhs)
    print("h=%g: relative residual %.3e, max u %.6f" % (h, relative, u.max()))
    assert relative <= DiscreteSystem.SOLVE_TOLERANCE
    assert np.all(u[colloc.boundary_index] == 0.0)
    assert np.all(u[colloc.interior_index] > 0.0)

    # the slit domain is symmetric under y -> -y
    field = u.reshape(grid.shape)
    assert np.allclose(field, field[:, ::-1], atol=1e-9)


@pytest.mark.travis
def test_residual_of_quadratic():
    # u = -(x^2 + y^2)/4 solves -Laplace(u) = 1
    hess = np.tile(-0.5*np.eye(2), (3, 1, 1, 1))
    jet  = Jet2(np.zeros((3, 1)), np.zeros((3, 1, 2)), hess)
    assert np.allclose(poisson_residual_ad(np.zeros((3, 2)), jet), 0.0)
    single = Jet2(np.zeros(1), np.zeros((1, 2)), -0.5*np.eye(2).reshape(1, 2, 2))
    assert poisson_residual_ad(np.zeros(2), single).shape == (1,)


@pytest.mark.travis
def test_mask_vanishes_on_boundary(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    m, m_grad, m_hess = slit_mask_jet(colloc.boundary)
    assert np.all(m == 0.0)
    m, m_grad, m_hess = slit_mask_jet(colloc.interior)
    assert np.all(m > 0.0)

    net = wrap_hard_constraint(init_network((2, 6, 1), Tanh(), 1), poisson_hard_constraint())
    assert np.all(net.eval(colloc.boundary) == 0.0)


@pytest.mark.travis
def test_mask_jet_matches_finite_differences():
    points = np.array([[-0.4, 0.3], [0.5, 0.35], [1.0 - 0.2, -0.6], [-0.3, -0.05]])
    m, m_grad, m_hess = slit_mask_jet(points)
    step = 1e-6
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = step
        plus  = slit_mask_jet(points + shift)
        minus = slit_mask_jet(points - shift)
        assert np.allclose((plus[0] - minus[0])/(2.0*step), m_grad[:, axis], atol=1e-7)
        assert np.allclose((plus[1] - minus[1])/(2.0*step), m_hess[:, :, axis], atol=1e-6)


@pytest.mark.travis
def test_constrained_jet_and_gradient(slit_coarse):
    grid, colloc, system, u_fdm = slit_coarse
    net = wrap_hard_constraint(init_network((2, 5, 5, 1), Tanh(), 6), poisson_hard_constraint())

    z     = np.array([-0.35, 0.4])
    jet   = eval_jet2(net, z)
    step  = 1e-5
    grads = [(eval_jet2(net, z + step*e).value - eval_jet2(net, z - step*e).value)/(2.0*step) for e in np.eye(2)]
    assert np.allclose(jet.grad[0], [g[0] for g in grads], atol=1e-8)

    objective = adpinn_objective(colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, LossWeights())
    exact     = parameter_gradient(net, objective)
    assert exact.breakdown["boundary_term"] == 0.0
    assert np.allclose(exact.grad, fd_gradient_oracle(net, objective, 1e-6), rtol=1e-5, atol=1e-7)


@pytest.mark.travis
def test_evaluation_points_order():
    points = evaluation_points(3)
    assert points.shape == (9, 2)
    assert np.array_equal(points[:3, 0], [-1.0, -1.0, -1.0])
    assert np.array_equal(points[:3, 1], [-1.0, 0.0, 1.0])
