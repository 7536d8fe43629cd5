"""
Incompressible Navier-Stokes on the periodic square [0, 2 pi)^2 with convection parameter lambda1 and
viscosity lambda2:

* a projection-method data generator (implicit diffusion, fixed-point iteration per step),
* the stencil momentum residuals of a streamfunction / pressure pair on the trimmed core grid,
* the inverse-problem training loss and the observation noise model.

Fields are stored as arrays indexed ``[k, i, j]`` (time level, x node, y node).
"""

__copyright__ = "Copyright 2026 Contributing Entities"
__license__   = """
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
"""
import numpy as np
import pandas as pd
import scipy.sparse.linalg

from .AutoDiff    import concatenate
from .Collocation import CollocationSet, build_periodic_grid, core_subgrids
from .Error       import FixedPointDiverged, InputError, NoConvergence
from .Logger      import PinnLabLogger
from .Losses      import DiscreteResidual, LossBreakdown


#: Modes of the initial streamfunction: (coefficient, x wavenumber, y wavenumber) of c sin(kx x) cos(ky y)
INITIAL_MODES           = [(1.00, 1, 1), (0.30, 2, 1), (0.20, 1, 2), (0.15, 2, 2)]
#: Max-norm change between fixed-point iterates accepted as converged
FIXED_POINT_TOLERANCE   = 1e-9
#: Fixed-point iterations per step before giving up
FIXED_POINT_MAX_ITER    = 200
#: Max discrete divergence accepted after projection
DIVERGENCE_TOLERANCE    = 1e-8
#: Default weight of the divergence term of the inverse loss
DEFAULT_W_DIV           = 1e-3


# ---------------------------------------------------------------------- periodic operators

def periodic_dx(f, h):
    """Central difference along x (axis -2), periodic."""
    return (np.roll(f, -1, axis=-2) - np.roll(f, 1, axis=-2))/(2.0*h)


def periodic_dy(f, h):
    """Central difference along y (axis -1), periodic."""
    return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1))/(2.0*h)


def periodic_laplacian(f, h):
    """Compact 5-point Laplacian, periodic."""
    return (np.roll(f, -1, axis=-2) + np.roll(f, 1, axis=-2) + np.roll(f, -1, axis=-1) + np.roll(f, 1, axis=-1) - 4.0*f)/(h*h)


def periodic_wide_laplacian(f, h):
    """``Dx Dx + Dy Dy``: the Laplacian whose range matches the central divergence of central gradients."""
    return periodic_dx(periodic_dx(f, h), h) + periodic_dy(periodic_dy(f, h), h)


def divergence(u, v, h):
    return periodic_dx(u, h) + periodic_dy(v, h)


def kinetic_energy(u, v, h):
    """``0.5 h^2 sum(u^2 + v^2)``."""
    return 0.5*h*h*float(np.sum(u*u + v*v))


def null_space_basis(n):
    """
    Orthonormal basis of the kernel of the wide periodic Laplacian on an n x n grid: the constants and,
    for even n, the sign-alternating modes along x, y and both.
    """
    i, j  = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    modes = [np.ones((n, n))]
    if n % 2 == 0:
        modes += [(-1.0)**i, (-1.0)**j, (-1.0)**(i + j)]
    return [m/np.linalg.norm(m) for m in modes]


class PeriodicSolver(object):
    """
    Conjugate gradient solves on an n x n periodic grid: the Helmholtz problem ``(I - c Lap) x = b`` and the
    singular pressure Poisson problem ``Lap_w x = b``, the latter on the complement of the kernel.
    """
    #: Absolute residual (2-norm) requested from CG
    ATOL = 1e-12

    def __init__(self, n, h):
        self.n     = int(n)
        self.h     = float(h)
        self.basis = null_space_basis(self.n)
        self.size  = self.n*self.n

    def project(self, f):
        """Removes the kernel components of a field."""
        f = np.array(f, dtype=np.float64, copy=True)
        for mode in self.basis:
            f -= np.sum(f*mode)*mode
        return f

    def _cg(self, matvec, rhs, label):
        if not np.any(rhs):
            return np.zeros_like(rhs)
        operator = scipy.sparse.linalg.LinearOperator((self.size, self.size), matvec=matvec, dtype=np.float64)
        iterations = [0]

        def count(xk):
            iterations[0] += 1
        scale = max(1.0, float(np.linalg.norm(rhs)))
        x, info = scipy.sparse.linalg.cg(operator, rhs.ravel(), rtol=0.0, atol=PeriodicSolver.ATOL*scale,
                                         maxiter=10*self.size, callback=count)
        if info != 0:
            raise NoConvergence(iterations[0], "%s CG did not converge (info %d)" % (label, info))
        return x.reshape(self.n, self.n)

    def helmholtz(self, rhs, coefficient):
        """Solves ``(I - coefficient Lap_c) x = rhs``."""
        def matvec(x):
            f = x.reshape(self.n, self.n)
            return (f - coefficient*periodic_laplacian(f, self.h)).ravel()
        return self._cg(matvec, np.asarray(rhs, dtype=np.float64), "Helmholtz")

    def pressure_poisson(self, rhs):
        """Solves ``Lap_w x = rhs`` for the projected rhs; the solution has no kernel component."""
        def matvec(x):
            f = self.project(x.reshape(self.n, self.n))
            return self.project(-periodic_wide_laplacian(f, self.h)).ravel()
        return self.project(-self._cg(matvec, self.project(rhs), "Pressure Poisson"))


# ---------------------------------------------------------------------- data generator

class FlowSnapshot(object):
    """
    Velocity and pressure on the periodic grid at one time level of a trajectory generated with (lambda1, lambda2).
    """
    def __init__(self, u, v, p, time_index, time, lambda1, lambda2, spacing):
        self.u          = np.asarray(u, dtype=np.float64)
        self.v          = np.asarray(v, dtype=np.float64)
        self.p          = np.asarray(p, dtype=np.float64)
        self.time_index = int(time_index)
        self.time       = float(time)
        self.lambda1    = float(lambda1)
        self.lambda2    = float(lambda2)
        self.spacing    = float(spacing)

    def __repr__(self):
        return "FlowSnapshot(k=%d, t=%g, shape=%s)" % (self.time_index, self.time, str(self.u.shape))

    def divergence(self):
        """Max |Dx u + Dy v|."""
        return float(np.max(np.abs(divergence(self.u, self.v, self.spacing))))

    def energy(self):
        return kinetic_energy(self.u, self.v, self.spacing)


def initial_streamfunction(x, y):
    psi = np.zeros(np.broadcast(x, y).shape)
    for coefficient, kx, ky in INITIAL_MODES:
        psi = psi + coefficient*np.sin(kx*x)*np.cos(ky*y)
    return psi


def ns_initial_field(grid, lambda1=1.0, lambda2=0.1):
    """
    Snapshot 0: ``u = Dy psi``, ``v = -Dx psi`` of the four-mode streamfunction by central differences, p = 0.
    """
    h      = grid.spacing[0]
    xx, yy = np.meshgrid(grid.coordinates(0), grid.coordinates(1), indexing="ij")
    psi    = initial_streamfunction(xx, yy)
    return FlowSnapshot(periodic_dy(psi, h), -periodic_dx(psi, h), np.zeros_like(psi), 0, 0.0, lambda1, lambda2, h)


class ProjectionStepper(object):
    """
    One time step: fixed-point iteration on the convection velocity, each iterate solving the implicit
    diffusion (Helmholtz) problem for the intermediate velocity, then the pressure Poisson problem for the
    increment phi, and projecting: ``u = u~ - h_t Dx phi``, ``v = v~ - h_t Dy phi``, ``p = p + phi``.
    """
    def __init__(self, n, h, lambda1, lambda2, h_t, tolerance=FIXED_POINT_TOLERANCE, max_iterations=FIXED_POINT_MAX_ITER):
        self.solver         = PeriodicSolver(n, h)
        self.h              = h
        self.lambda1        = lambda1
        self.lambda2        = lambda2
        self.h_t            = h_t
        self.tolerance      = tolerance
        self.max_iterations = max_iterations

    def step(self, u_n, v_n, p_n, step_index):
        h, h_t, lam1 = self.h, self.h_t, self.lambda1
        u_m, v_m, p_m = u_n, v_n, p_n
        change = np.inf
        for iteration in range(1, self.max_iterations + 1):
            r_u = u_n - h_t*lam1*(u_m*periodic_dx(u_m, h) + v_m*periodic_dy(u_m, h)) - h_t*periodic_dx(p_m, h)
            r_v = v_n - h_t*lam1*(u_m*periodic_dx(v_m, h) + v_m*periodic_dy(v_m, h)) - h_t*periodic_dy(p_m, h)
            u_tilde = self.solver.helmholtz(r_u, h_t*self.lambda2)
            v_tilde = self.solver.helmholtz(r_v, h_t*self.lambda2)
            phi     = self.solver.pressure_poisson(divergence(u_tilde, v_tilde, h)/h_t)
            u_new   = u_tilde - h_t*periodic_dx(phi, h)
            v_new   = v_tilde - h_t*periodic_dy(phi, h)
            p_new   = p_m + phi

            change  = max(np.max(np.abs(u_new - u_m)), np.max(np.abs(v_new - v_m)), np.max(np.abs(phi)))
            u_m, v_m, p_m = u_new, v_new, p_new
            if not np.isfinite(change):
                break
            if change <= self.tolerance:
                div = float(np.max(np.abs(divergence(u_m, v_m, h))))
                if div > DIVERGENCE_TOLERANCE:
                    raise FixedPointDiverged(step_index, "Divergence %.3e after projection in step %d" % (div, step_index))
                PinnLabLogger.debug("NS step %d: %d fixed-point iterations, divergence %.3e" % (step_index, iteration, div))
                return u_m, v_m, p_m
        raise FixedPointDiverged(step_index, "NS fixed point stalled at change %.3e after %d iterations in step %d" %
                                 (change, self.max_iterations, step_index))


def ns_generate_data(lambda1, lambda2, h_t, steps, n=32, initial=None):
    """
    Trajectory of ``steps + 1`` snapshots starting from :py:func:`ns_initial_field` (or *initial*).

    :raises: :py:class:`pinnlab.Error.FixedPointDiverged` with the failing step
    """
    if lambda2 <= 0:
        raise InputError("ns_generate_data needs lambda2 > 0, got %g" % lambda2)
    if steps < 1:
        raise InputError("ns_generate_data needs steps >= 1, got %d" % steps)
    grid    = build_periodic_grid(n, 2.0*np.pi)
    h       = grid.spacing[0]
    current = initial if initial is not None else ns_initial_field(grid, lambda1, lambda2)
    stepper = ProjectionStepper(n, h, lambda1, lambda2, h_t)

    snapshots = [FlowSnapshot(current.u, current.v, current.p, 0, 0.0, lambda1, lambda2, h)]
    u, v, p   = current.u, current.v, current.p
    for k in range(steps):
        u, v, p = stepper.step(u, v, p, k)
        snapshots.append(FlowSnapshot(u, v, p, k + 1, (k + 1)*h_t, lambda1, lambda2, h))
    PinnLabLogger.info("NS data: %d snapshots on %dx%d, energy %.6f -> %.6f, max divergence %.3e" %
                       (len(snapshots), n, n, snapshots[0].energy(), snapshots[-1].energy(),
                        max(s.divergence() for s in snapshots[1:])))
    return snapshots


def trajectory_dataframe(snapshots):
    """
    Columnar trajectory with columns ``k``, ``t``, ``i``, ``j``, ``x``, ``y``, ``u``, ``v``, ``p``.
    """
    frames = []
    for snap in snapshots:
        n    = snap.u.shape[0]
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        frames.append(pd.DataFrame({"k": snap.time_index, "t": snap.time,
                                    "i": i.ravel(), "j": j.ravel(),
                                    "x": i.ravel()*snap.spacing, "y": j.ravel()*snap.spacing,
                                    "u": snap.u.ravel(), "v": snap.v.ravel(), "p": snap.p.ravel()}))
    return pd.concat(frames, ignore_index=True)


# ---------------------------------------------------------------------- inverse problem

class FlowObservations(object):
    """
    Observed velocities ``u[k, i, j]``, ``v[k, i, j]`` on the full grid at every saved level.
    """
    def __init__(self, u, v, spacing, time_step):
        self.u         = np.asarray(u, dtype=np.float64)
        self.v         = np.asarray(v, dtype=np.float64)
        self.spacing   = float(spacing)
        self.time_step = float(time_step)
        if self.u.shape != self.v.shape or self.u.ndim != 3:
            raise InputError("Observations need matching (K, n, n) arrays, got %s and %s" % (str(self.u.shape), str(self.v.shape)))

    @staticmethod
    def from_snapshots(snapshots):
        h_t = snapshots[1].time - snapshots[0].time if len(snapshots) > 1 else 1.0
        return FlowObservations(np.stack([s.u for s in snapshots]), np.stack([s.v for s in snapshots]),
                                snapshots[0].spacing, h_t)

    @property
    def num_snapshots(self):
        return self.u.shape[0]

    @property
    def n(self):
        return self.u.shape[1]


def inject_noise(observations, fraction, seed):
    """
    Adds zero-mean Gaussian noise of standard deviation ``fraction * std(component)`` to u and v,
    from independent streams spawned from *seed*.
    """
    if fraction < 0:
        raise InputError("Noise fraction must be nonnegative, got %g" % fraction)
    if fraction == 0:
        return FlowObservations(observations.u.copy(), observations.v.copy(), observations.spacing, observations.time_step)
    stream_u, stream_v = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2)]
    u = observations.u + stream_u.normal(0.0, fraction*np.std(observations.u), size=observations.u.shape)
    v = observations.v + stream_v.normal(0.0, fraction*np.std(observations.v), size=observations.v.shape)
    PinnLabLogger.info("Injected %.2f%% noise into %d observations per component (seed %d)" % (100.0*fraction, u.size, seed))
    return FlowObservations(u, v, observations.spacing, observations.time_step)


def velocities_from_streamfunction(psi, h):
    """
    ``u = Dy psi``, ``v = -Dx psi`` on the one-cell trimmed grid, shape (K, n-2, n-2).
    """
    u = (psi[:, 1:-1, 2:] - psi[:, 1:-1, :-2])/(2.0*h)
    v = -(psi[:, 2:, 1:-1] - psi[:, :-2, 1:-1])/(2.0*h)
    return u, v


def _core_dx(f, h):
    return (f[:, 2:, 1:-1] - f[:, :-2, 1:-1])/(2.0*h)


def _core_dy(f, h):
    return (f[:, 1:-1, 2:] - f[:, 1:-1, :-2])/(2.0*h)


def _core_laplacian(f, h):
    return (f[:, 2:, 1:-1] + f[:, :-2, 1:-1] + f[:, 1:-1, 2:] + f[:, 1:-1, :-2] - 4.0*f[:, 1:-1, 1:-1])/(h*h)


def ns_residuals_fd(psi, p, lambda1, lambda2, h, h_t):
    """
    Momentum residuals f, g on the two-cell core grid for every level with a successor.

    :param psi: streamfunction on the full grid, (K, n, n) array or Variable
    :param p:   pressure on the full grid, (K, n, n)
    :returns:   (f, g), each (K-1, n-4, n-4)
    """
    u, v   = velocities_from_streamfunction(psi, h)
    u_c    = u[:, 1:-1, 1:-1]
    v_c    = v[:, 1:-1, 1:-1]
    p_x    = (p[:, 3:-1, 2:-2] - p[:, 1:-3, 2:-2])/(2.0*h)
    p_y    = (p[:, 2:-2, 3:-1] - p[:, 2:-2, 1:-3])/(2.0*h)

    u_t    = (u_c[1:] - u_c[:-1])/h_t
    v_t    = (v_c[1:] - v_c[:-1])/h_t
    u_k, v_k = u_c[:-1], v_c[:-1]
    f = (u_t + lambda1*(u_k*_core_dx(u, h)[:-1] + v_k*_core_dy(u, h)[:-1]) + p_x[:-1]
         - lambda2*_core_laplacian(u, h)[:-1])
    g = (v_t + lambda1*(u_k*_core_dx(v, h)[:-1] + v_k*_core_dy(v, h)[:-1]) + p_y[:-1]
         - lambda2*_core_laplacian(v, h)[:-1])
    return f, g


def core_divergence(psi, h):
    """
    ``Dx u + Dy v`` on the two-cell core grid at every level.
    """
    u, v = velocities_from_streamfunction(psi, h)
    return _core_dx(u, h) + _core_dy(v, h)


def ns_inverse_loss(psi, p, observations, lambda1, lambda2, w_div=DEFAULT_W_DIV):
    """
    Inverse-problem loss: mean squared velocity misfit on the one-cell trimmed grid at all levels, mean of
    ``f^2 + g^2`` on the core grid at levels with a successor, and ``w_div`` times the mean squared core divergence.
    """
    if w_div < 0:
        raise InputError("w_div must be nonnegative, got %g" % w_div)
    core_subgrids(build_periodic_grid(observations.n, 2.0*np.pi), observations.num_snapshots)
    h      = observations.spacing
    u, v   = velocities_from_streamfunction(psi, h)
    du     = u - observations.u[:, 1:-1, 1:-1]
    dv     = v - observations.v[:, 1:-1, 1:-1]
    data   = (du*du + dv*dv).mean()
    f, g   = ns_residuals_fd(psi, p, lambda1, lambda2, h, observations.time_step)
    pde    = (f*f + g*g).mean()
    div    = core_divergence(psi, h)
    return LossBreakdown(pde_term=pde, data_term=data, divergence_term=w_div*(div*div).mean())


def space_time_points(n, times):
    """
    (K n n, 3) array of (t, x, y) over the periodic grid at each time, t slowest then x then y.
    """
    h       = 2.0*np.pi/n
    tt, ii, jj = np.meshgrid(np.asarray(times, dtype=np.float64), np.arange(n)*h, np.arange(n)*h, indexing="ij")
    return np.stack([tt.ravel(), ii.ravel(), jj.ravel()], axis=1)


def ns_inverse_objective(observations, times, w_div=DEFAULT_W_DIV):
    """
    Objective for a (t, x, y) -> (psi, p) network with (lambda1, lambda2) as the two trainable extras.
    """
    points = space_time_points(observations.n, times)
    shape  = (observations.num_snapshots, observations.n, observations.n, 2)

    def objective(view):
        out = view.eval(points).reshape(shape)
        return ns_inverse_loss(out[:, :, :, 0], out[:, :, :, 1], observations,
                               view.extra[0], view.extra[1], w_div)
    return objective


class NavierStokesResidualFD(DiscreteResidual):
    """
    Momentum residuals with fixed (lambda1, lambda2) as a stencil residual on space-time grid values (psi, p),
    so the generic FD losses apply.  Rows are the core nodes at levels with a successor, (f, g) per row.
    """
    def __init__(self, n, times, lambda1, lambda2):
        self.times   = np.asarray(times, dtype=np.float64)
        self.n       = int(n)
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.h       = 2.0*np.pi/n
        self.h_t     = float(self.times[1] - self.times[0])
        self.colloc  = ns_collocation(n, self.times)
        DiscreteResidual.__init__(self, space_time_points(n, self.times), self.colloc, 2)

    def residuals(self, u):
        values = u.reshape(len(self.times), self.n, self.n, 2)
        f, g   = ns_residuals_fd(values[:, :, :, 0], values[:, :, :, 1], self.lambda1, self.lambda2, self.h, self.h_t)
        return concatenate([f.reshape(-1, 1), g.reshape(-1, 1)], axis=1), None


def ns_collocation(n, times):
    """
    Interior points (t_k, x_i, y_j) of the core grid at levels with a successor; no boundary points.
    """
    grid = build_periodic_grid(n, 2.0*np.pi)
    core_subgrids(grid, len(times))
    h    = grid.spacing[0]
    tt, ii, jj = np.meshgrid(np.asarray(times, dtype=np.float64)[:-1], np.arange(2, n - 2)*h, np.arange(2, n - 2)*h, indexing="ij")
    return CollocationSet(np.stack([tt.ravel(), ii.ravel(), jj.ravel()], axis=1), [])


def remove_level_means(p):
    """
    Pressure with the mean of every time level removed, (K, n, n) or (n, n).
    """
    p = np.asarray(p, dtype=np.float64)
    return p - p.mean(axis=(-2, -1), keepdims=True)
