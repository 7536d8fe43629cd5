import numpy as np
import pytest

from pinnlab.Activation import Tanh
from pinnlab.AutoDiff import fd_gradient_oracle, parameter_gradient
from pinnlab.Collocation import build_periodic_grid
from pinnlab.Error import InputError
from pinnlab.Losses import LossWeights, fd_loss
from pinnlab.NavierStokes import DIVERGENCE_TOLERANCE, FlowObservations, NavierStokesResidualFD, divergence, \
    initial_streamfunction, inject_noise, ns_generate_data, ns_initial_field, ns_inverse_loss, ns_inverse_objective, \
    ns_residuals_fd, periodic_dx, periodic_laplacian, remove_level_means, space_time_points, trajectory_dataframe, \
    velocities_from_streamfunction
from pinnlab.Network import init_network

N_SMALL = 16


@pytest.fixture(scope="module")
def snapshots():
    yield ns_generate_data(1.0, 0.1, 0.1, 5, N_SMALL)


@pytest.mark.travis
def test_periodic_operators():
    grid   = build_periodic_grid(64, 2.0*np.pi)
    h      = grid.spacing[0]
    xx, yy = np.meshgrid(grid.coordinates(0), grid.coordinates(1), indexing="ij")
    f      = np.sin(xx)*np.cos(2.0*yy)
    assert np.max(np.abs(periodic_dx(f, h) - np.cos(xx)*np.cos(2.0*yy))) < 1e-2
    assert np.max(np.abs(periodic_laplacian(f, h) + 5.0*f)) < 5e-2


@pytest.mark.travis
def test_initial_field_is_divergence_free():
    grid = build_periodic_grid(N_SMALL, 2.0*np.pi)
    snap = ns_initial_field(grid)
    assert snap.divergence() <= 1e-12
    assert np.all(snap.p == 0.0)
    assert snap.energy() > 0.0


@pytest.mark.travis
def test_generated_trajectory(snapshots):
    assert len(snapshots) == 6
    energies = [snap.energy() for snap in snapshots]
    for snap in snapshots[1:]:
        assert snap.divergence() <= DIVERGENCE_TOLERANCE
    print("energies: %s" % str(energies))
    assert all(energies[k + 1] <= energies[k] for k in range(len(energies) - 1))
    assert snapshots[-1].time == pytest.approx(0.5)

    df = trajectory_dataframe(snapshots)
    assert list(df.columns) == ["k", "t", "i", "j", "x", "y", "u", "v", "p"]
    assert len(df) == 6*N_SMALL*N_SMALL


@pytest.mark.travis
def test_generator_arguments():
    with pytest.raises(InputError):
        ns_generate_data(1.0, 0.0, 0.1, 5, N_SMALL)
    with pytest.raises(InputError):
        ns_generate_data(1.0, 0.1, 0.1, 0, N_SMALL)


@pytest.mark.travis
def test_inverse_loss_data_term_of_generating_streamfunction():
    grid   = build_periodic_grid(N_SMALL, 2.0*np.pi)
    snap   = ns_initial_field(grid)
    obs    = FlowObservations(np.stack([snap.u, snap.u]), np.stack([snap.v, snap.v]), snap.spacing, 0.1)
    xx, yy = np.meshgrid(grid.coordinates(0), grid.coordinates(1), indexing="ij")
    psi    = np.stack([initial_streamfunction(xx, yy)]*2)

    loss = ns_inverse_loss(psi, np.zeros_like(psi), obs, 1.0, 0.1)
    assert loss.data_term <= 1e-28
    assert loss.divergence_term <= 1e-25
    assert loss.pde_term > 0.0


@pytest.mark.travis
def test_noise_injection(snapshots):
    obs   = FlowObservations.from_snapshots(snapshots)
    clean = inject_noise(obs, 0.0, 1)
    assert np.array_equal(clean.u, obs.u)

    noisy  = inject_noise(obs, 0.01, 1)
    again  = inject_noise(obs, 0.01, 1)
    assert np.array_equal(noisy.u, again.u)
    assert np.std(noisy.u - obs.u) == pytest.approx(0.01*np.std(obs.u), rel=0.1)
    with pytest.raises(InputError):
        inject_noise(obs, -0.1, 1)


@pytest.mark.travis
def test_inverse_objective_gradient():
    snaps     = ns_generate_data(1.0, 0.1, 0.1, 2, 8)
    obs       = FlowObservations.from_snapshots(snaps)
    times     = [snap.time for snap in snaps]
    net       = init_network((3, 4, 2), Tanh(), 2)
    objective = ns_inverse_objective(obs, times, 1e-3)
    extra     = np.array([0.5, 0.5])

    exact = parameter_gradient(net, objective, extra)
    assert exact.grad.shape == (net.num_parameters + 2,)
    assert exact.breakdown["divergence_term"] >= 0.0
    assert np.allclose(exact.grad, fd_gradient_oracle(net, objective, 1e-6, extra), rtol=1e-5, atol=1e-8)


@pytest.mark.travis
def test_residual_operator_rows(snapshots):
    times = [snap.time for snap in snapshots]
    D_res = NavierStokesResidualFD(N_SMALL, times, 1.0, 0.1)
    assert D_res.num_interior == (len(times) - 1)*(N_SMALL - 4)**2
    loss = fd_loss(np.zeros((len(times)*N_SMALL*N_SMALL, 2)), D_res, None, LossWeights())
    assert loss.total == 0.0


@pytest.mark.travis
def test_space_time_points_and_level_means():
    points = space_time_points(4, [0.0, 0.5])
    assert points.shape == (32, 3)
    assert np.all(points[:16, 0] == 0.0) and np.all(points[16:, 0] == 0.5)
    assert np.array_equal(points[:4, 1], np.zeros(4))

    p = np.random.default_rng(0).normal(size=(3, 5, 5)) + np.array([1.0, 2.0, 3.0]).reshape(3, 1, 1)
    assert np.allclose(remove_level_means(p).mean(axis=(1, 2)), 0.0)
    assert np.allclose(divergence(np.ones((5, 5)), np.ones((5, 5)), 0.1), 0.0)


@pytest.mark.travis
def test_residuals_fd_pressure_gradient_only():
    # no flow: the momentum residual reduces to the centered pressure gradient
    K, n, h = 3, 10, 0.2
    psi = np.zeros((K, n, n))
    i   = np.arange(n).reshape(1, n, 1)*np.ones((K, n, n))
    f, g = ns_residuals_fd(psi, i*h, 0.7, 0.05, h, 0.1)
    assert f.shape == (K - 1, n - 4, n - 4)
    assert g.shape == (K - 1, n - 4, n - 4)
    assert np.allclose(f, 1.0, rtol=0.0, atol=1e-12)
    assert np.allclose(g, 0.0, rtol=0.0, atol=1e-12)


@pytest.mark.travis
def test_residuals_fd_time_derivative():
    K, n, h, h_t = 4, 12, 0.3, 0.05
    rng  = np.random.RandomState(5)
    base = rng.uniform(-1.0, 1.0, (1, n, n))
    psi  = np.arange(K).reshape(K, 1, 1)*base
    f, g = ns_residuals_fd(psi, np.zeros((K, n, n)), 0.0, 0.0, h, h_t)

    u, v = velocities_from_streamfunction(base, h)
    for k in range(K - 1):
        assert np.allclose(f[k], u[0, 1:-1, 1:-1]/h_t, rtol=1e-12, atol=1e-12)
        assert np.allclose(g[k], v[0, 1:-1, 1:-1]/h_t, rtol=1e-12, atol=1e-12)
