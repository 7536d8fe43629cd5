import os

import numpy as np
import pytest

from pinnlab.Activation import ReLU, Tanh
from pinnlab.Error import IncompatibleNetworks, InvalidArchitecture, WrongActivation
from pinnlab.Network import Network, deepen_relu_identity, init_network, linear_combine

ARCHITECTURES = [(2, 1), (2, 7, 1), (2, 32, 32, 32, 1), (3, 100, 100, 2)]
POINTS        = np.random.default_rng(7).uniform(-1.0, 1.0, size=(25, 2))


@pytest.mark.travis
@pytest.mark.parametrize("widths", ARCHITECTURES)
def test_parameter_count_and_flatten(widths):
    net = init_network(widths, Tanh(), 0)
    expected = sum(widths[i]*(widths[i-1] + 1) for i in range(1, len(widths)))
    assert net.num_parameters == expected
    assert net.flatten().shape == (expected,)
    assert net.depth == len(widths) - 1

    rebuilt = net.with_parameters(net.flatten())
    assert np.array_equal(rebuilt.flatten(), net.flatten())


@pytest.mark.travis
def test_init_is_reproducible_glorot():
    first  = init_network((2, 32, 32, 1), Tanh(), 42)
    second = init_network((2, 32, 32, 1), Tanh(), 42)
    third  = init_network((2, 32, 32, 1), Tanh(), 43)
    assert np.array_equal(first.flatten(), second.flatten())
    assert not np.array_equal(first.flatten(), third.flatten())
    assert np.max(np.abs(first.weights[1])) <= np.sqrt(6.0/64.0)
    for b in first.biases:
        assert np.all(b == 0.0)


@pytest.mark.travis
def test_invalid_architectures():
    with pytest.raises(InvalidArchitecture):
        init_network((2,), Tanh(), 0)
    with pytest.raises(InvalidArchitecture):
        init_network((2, 0, 1), Tanh(), 0)
    with pytest.raises(InvalidArchitecture):
        Network((2, 3, 1), [np.zeros((3, 2))], [np.zeros(3)], Tanh())


@pytest.mark.travis
def test_eval_shapes():
    net = init_network((2, 5, 3), Tanh(), 1)
    assert net.eval(np.array([0.1, 0.2])).shape == (3,)
    assert net.eval(POINTS).shape == (25, 3)


@pytest.mark.travis
@pytest.mark.parametrize("with_extra", [False, True])
def test_checkpoint_round_trip(tmp_path, with_extra):
    net   = init_network((3, 8, 8, 2), ReLU(), 9)
    net   = net.with_parameters(net.flatten() + 0.1*np.arange(net.num_parameters)/net.num_parameters)
    extra = np.array([0.9522, 0.0960]) if with_extra else None
    filename = os.path.join(str(tmp_path), "network.npz")
    net.save(filename, extra)

    loaded, loaded_extra = Network.load(filename, with_extra=True)
    assert loaded.widths == net.widths
    assert loaded.activation == net.activation
    assert loaded.seed == 9
    assert np.array_equal(loaded.flatten(), net.flatten())
    if with_extra:
        assert np.array_equal(loaded_extra, extra)
    else:
        assert loaded_extra is None


@pytest.mark.travis
@pytest.mark.parametrize("c1,c2", [(1.0, 0.0), (1.0, -3.5), (0.25, 2.0)])
@pytest.mark.parametrize("depth", [1, 2, 4])
def test_linear_combine(c1, c2, depth):
    f = init_network((2,) + (6,)*(depth - 1) + (1,), Tanh(), 1)
    g = init_network((2,) + (4,)*(depth - 1) + (1,), Tanh(), 2)
    h = linear_combine(f, g, c1, c2)
    assert h.depth == depth
    assert np.allclose(h.eval(POINTS), c1*f.eval(POINTS) + c2*g.eval(POINTS), rtol=1e-13, atol=1e-13)


@pytest.mark.travis
def test_linear_combine_rejects_incompatible_networks():
    f = init_network((2, 6, 1), Tanh(), 1)
    with pytest.raises(IncompatibleNetworks):
        linear_combine(f, init_network((2, 6, 6, 1), Tanh(), 2), 1.0, 1.0)
    with pytest.raises(IncompatibleNetworks):
        linear_combine(f, init_network((2, 6, 1), ReLU(), 2), 1.0, 1.0)
    with pytest.raises(IncompatibleNetworks):
        linear_combine(f, init_network((2, 6, 2), Tanh(), 2), 1.0, 1.0)


@pytest.mark.travis
@pytest.mark.parametrize("target_depth", [3, 4, 8])
def test_deepen_relu_identity_is_exact(target_depth):
    net  = init_network((2, 5, 5, 1), ReLU(), 4)
    net  = net.with_parameters(net.flatten() + 0.05)
    deep = deepen_relu_identity(net, target_depth)
    assert deep.depth == target_depth
    assert np.array_equal(deep.eval(POINTS), net.eval(POINTS))

    deep_jet = deep.forward(POINTS, order=2).numpy()
    net_jet  = net.forward(POINTS, order=2).numpy()
    assert np.array_equal(deep_jet.value, net_jet.value)
    assert np.allclose(deep_jet.grad, net_jet.grad, rtol=0.0, atol=1e-12)
    assert np.array_equal(deep_jet.hess, net_jet.hess)
    assert not np.any(deep_jet.hess)


@pytest.mark.travis
def test_deepen_needs_relu():
    with pytest.raises(WrongActivation):
        deepen_relu_identity(init_network((2, 5, 1), Tanh(), 0), 4)
    with pytest.raises(InvalidArchitecture):
        deepen_relu_identity(init_network((2, 5, 5, 1), ReLU(), 0), 2)


@pytest.mark.travis
def test_min_abs_preactivation():
    net = Network((1, 2, 1), [[[1.0], [-1.0]], [[1.0, 1.0]]], [[0.25, 0.0], [0.0]], ReLU())
    assert net.min_abs_preactivation(np.array([[0.5], [1.0]])) == pytest.approx(0.5)
    assert init_network((2, 1), ReLU(), 0).min_abs_preactivation(POINTS) == np.inf
