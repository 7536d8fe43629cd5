import numpy as np
import pytest

from pinnlab.Activation import ReLU, Sigmoid, Tanh
from pinnlab.AutoDiff import Variable, dense, eval_jet2, fd_gradient_oracle, jet_fd_oracle, parameter_gradient
from pinnlab.Error import InputError, KinkAtPoint
from pinnlab.Network import Network, init_network

ACTIVATIONS = [Tanh(), Sigmoid()]
POINTS      = np.array([[0.3, -0.2], [-0.7, 0.45], [0.05, 0.9], [0.61, 0.13]])


@pytest.mark.travis
def test_variable_arithmetic():
    x = Variable(np.array([1.0, 2.0, 3.0]), requires_grad=True)
    y = Variable(np.array([0.5, -1.0, 4.0]), requires_grad=True)
    out = (x*y + x/y - 2.0*x**2 + abs(y)).sum()
    out.backward()

    assert np.allclose(x.grad, y.data + 1.0/y.data - 4.0*x.data)
    assert np.allclose(y.grad, x.data - x.data/y.data**2 + np.sign(y.data))


@pytest.mark.travis
def test_variable_broadcasting_and_reflected_operands():
    a = Variable(np.arange(12.0).reshape(3, 4))
    b = Variable(np.array([1.0, 2.0, 3.0, 4.0]), requires_grad=True)
    (a*b).sum().backward()
    assert np.allclose(b.grad, np.arange(12.0).reshape(3, 4).sum(axis=0))
    assert a.grad is None

    x = Variable(np.array([1.0, 2.0, 3.0]), requires_grad=True)
    (np.array([2.0, 3.0, 4.0]) - x).sum().backward()
    assert np.allclose(x.grad, -1.0)


@pytest.mark.travis
def test_variable_fancy_index_accumulates():
    x = Variable(np.array([1.0, 2.0, 3.0]), requires_grad=True)
    x[[0, 0, 2]].sum().backward()
    assert np.array_equal(x.grad, np.array([2.0, 0.0, 1.0]))


@pytest.mark.travis
def test_backward_needs_scalar():
    x = Variable(np.ones(3), requires_grad=True)
    with pytest.raises(InputError):
        (x*2.0).backward()


@pytest.mark.travis
def test_dense_gradients():
    x = np.array([[1.0, 2.0, 3.0], [-1.0, 0.5, 2.0]])
    W = Variable(np.ones((4, 3)), requires_grad=True)
    b = Variable(np.zeros(4), requires_grad=True)
    dense(x, W, b).sum().backward()
    assert np.allclose(W.grad, np.tile(x.sum(axis=0), (4, 1)))
    assert np.allclose(b.grad, 2.0)


@pytest.mark.travis
@pytest.mark.parametrize("activation", ACTIVATIONS)
def test_parameter_gradient_matches_central_differences(activation):
    net = init_network((2, 5, 4, 1), activation, 3)

    def objective(view):
        residual = view.eval(POINTS) - 0.3
        return (residual*residual).sum()

    exact     = parameter_gradient(net, objective)
    reference = fd_gradient_oracle(net, objective, 1e-6)
    print("max abs gradient difference %.3e" % np.max(np.abs(exact.grad - reference)))
    assert exact.grad.shape == (net.num_parameters,)
    assert np.allclose(exact.grad, reference, rtol=1e-6, atol=1e-8)


@pytest.mark.travis
def test_parameter_gradient_with_extra_scalars():
    net = init_network((2, 3, 1), Tanh(), 5)

    def objective(view):
        residual = view.eval(POINTS)[:, 0] - view.extra[0]
        return (residual*residual).sum() + view.extra[1]*view.extra[1]

    extra     = np.array([0.2, -0.4])
    exact     = parameter_gradient(net, objective, extra)
    reference = fd_gradient_oracle(net, objective, 1e-6, extra)
    assert exact.grad.shape == (net.num_parameters + 2,)
    assert np.allclose(exact.grad, reference, rtol=1e-6, atol=1e-8)
    assert exact.grad[-1] == pytest.approx(-0.8)


@pytest.mark.travis
def test_fd_oracle_rejects_nonpositive_step():
    net = init_network((2, 3, 1), Tanh(), 0)
    with pytest.raises(InputError):
        fd_gradient_oracle(net, lambda view: view.eval(POINTS).sum(), 0.0)


@pytest.mark.travis
def test_jet_of_single_unit_network():
    a, c, k = np.array([0.7, -1.3]), 0.2, 1.5
    net = Network((2, 1, 1), [a.reshape(1, 2), [[k]]], [[c], [0.0]], Tanh())
    z   = np.array([0.4, 0.1])
    t   = np.tanh(a.dot(z) + c)

    jet = eval_jet2(net, z)
    assert jet.value.shape == (1,)
    assert jet.grad.shape  == (1, 2)
    assert jet.hess.shape  == (1, 2, 2)
    assert jet.value[0] == pytest.approx(k*t)
    assert np.allclose(jet.grad[0], k*(1.0 - t*t)*a)
    assert np.allclose(jet.hess[0], -2.0*k*t*(1.0 - t*t)*np.outer(a, a))


@pytest.mark.travis
@pytest.mark.parametrize("activation", ACTIVATIONS)
def test_jet_matches_finite_differences(activation):
    net = init_network((2, 6, 6, 2), activation, 11)
    for z in POINTS:
        jet    = eval_jet2(net, z)
        oracle = jet_fd_oracle(net, z, step_grad=1e-5, step_hess=1e-4)
        assert np.allclose(jet.value, oracle.value)
        assert np.allclose(jet.grad, oracle.grad, atol=1e-8)
        assert np.allclose(jet.hess, oracle.hess, atol=1e-7)


@pytest.mark.travis
def test_batched_jet_shapes():
    net = init_network((2, 4, 2), Tanh(), 1)
    jet = eval_jet2(net, POINTS)
    assert jet.value.shape == (4, 2)
    assert jet.grad.shape  == (4, 2, 2)
    assert jet.hess.shape  == (4, 2, 2, 2)
    single = eval_jet2(net, POINTS[2])
    assert np.allclose(jet.point(2).hess, single.hess)


@pytest.mark.travis
def test_relu_jet_at_kink():
    # |z| = ReLU(z) + ReLU(-z)
    net = Network((1, 2, 1), [[[1.0], [-1.0]], [[1.0, 1.0]]], [[0.0, 0.0], [0.0]], ReLU())
    assert net.eval(np.array([0.0]))[0] == 0.0
    with pytest.raises(KinkAtPoint):
        eval_jet2(net, np.array([0.0]))

    jet = eval_jet2(net, np.array([-0.5]))
    assert jet.grad[0, 0] == -1.0
    assert np.all(jet.hess == 0.0)


@pytest.mark.travis
def test_relu_kink_behind_inactive_unit():
    # ReLU(|z| - 1): the kink of |z| at 0 sits behind a unit that is strictly negative near 0
    net = Network((1, 2, 1, 1), [[[1.0], [-1.0]], [[1.0, 1.0]], [[2.0]]], [[0.0, 0.0], [-1.0], [0.5]], ReLU())
    jet = eval_jet2(net, np.array([0.0]))
    assert jet.value[0] == 0.5
    assert np.all(jet.grad == 0.0)
    assert np.all(jet.hess == 0.0)

    # the same kink feeding the output through an active unit is still an error
    live = Network((1, 2, 1, 1), [[[1.0], [-1.0]], [[1.0, 1.0]], [[2.0]]], [[0.0, 0.0], [1.0], [0.5]], ReLU())
    with pytest.raises(KinkAtPoint):
        eval_jet2(live, np.array([0.0]))


@pytest.mark.travis
def test_relu_kink_with_constant_input():
    # a unit fed only by a dead unit is constant, so its own zero pre-activation is harmless
    net = Network((1, 1, 1, 1), [[[1.0]], [[3.0]], [[1.0]]], [[-2.0], [0.0], [0.0]], ReLU())
    jet = eval_jet2(net, np.array([[0.5], [1.0]]))
    assert np.all(jet.value == 0.0)
    assert np.all(jet.grad == 0.0)
