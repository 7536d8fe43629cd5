"""
Nonlinear Schroedinger equation ``i psi_t + 0.5 psi_xx + |psi|^2 psi = 0`` on [0, 2 pi] x [-5, 5] with
periodic boundary and ``psi(0, x) = 2 sech(x)``.

Complex values are carried as two real channels (real part, imaginary part).  The implicit Euler / central
difference residual is evaluated at the new time level with the ghost node ``x_{-1} = x_{N-1}``; the reference
solver solves it level by level and is the discrete ground truth for the FD-PINN.
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
import scipy.sparse
import scipy.sparse.linalg

from .AutoDiff    import concatenate
from .Collocation import CollocationSet, build_interval_grid
from .Error       import FixedPointDiverged, InputError
from .Logger      import PinnLabLogger
from .Losses      import DiscreteResidual, ResidualForm
from .Network     import AdditiveAnchor


class ComplexField(object):
    """
    Real and imaginary parts of psi on one time level (or any grid of matching shapes).
    """
    def __init__(self, real, imag):
        self.real = np.asarray(real, dtype=np.float64)
        self.imag = np.asarray(imag, dtype=np.float64)
        if self.real.shape != self.imag.shape:
            raise InputError("ComplexField parts have shapes %s and %s" % (str(self.real.shape), str(self.imag.shape)))

    def __repr__(self):
        return "ComplexField(shape=%s)" % str(self.real.shape)

    @staticmethod
    def from_complex(values):
        values = np.asarray(values)
        return ComplexField(values.real, values.imag)

    def to_complex(self):
        return self.real + 1j*self.imag

    def modulus(self):
        return np.hypot(self.real, self.imag)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.real)) and np.all(np.isfinite(self.imag)))


def initial_profile(x):
    """
    ``2 sech(x)``.
    """
    return 2.0/np.cosh(x)


def _neighbors(N):
    """
    Index arrays of x_{j-1} and x_{j+1} for j = 0..N-1 on the N+1 stored nodes, with x_{-1} = x_{N-1}.
    """
    j = np.arange(N)
    return np.where(j == 0, N - 1, j - 1), j + 1


def _columns(values, index):
    """
    Selects spatial nodes on the last axis of a 1D or 2D array / Variable.
    """
    if len(values.shape) == 1:
        return values[index]
    return values[:, index]


def schrodinger_residual_rows(a_k, b_k, a_next, b_next, h_t, h_x):
    """
    Real and imaginary parts of the residual at j = 0..N-1 for every level pair.

    Arguments hold the N+1 spatial nodes on their last axis (1D for one level pair, 2D for a stack of levels)
    and may be numpy arrays or Variables; level k enters only through the time difference.
    """
    N           = a_next.shape[-1] - 1
    left, right = _neighbors(N)
    inner       = slice(0, N)
    a           = _columns(a_next, inner)
    b           = _columns(b_next, inner)
    lap_a       = (_columns(a_next, right) - 2.0*a + _columns(a_next, left))/(h_x*h_x)
    lap_b       = (_columns(b_next, right) - 2.0*b + _columns(b_next, left))/(h_x*h_x)
    modulus2    = a*a + b*b
    real = -(b - _columns(b_k, inner))/h_t + 0.5*lap_a + modulus2*a
    imag =  (a - _columns(a_k, inner))/h_t + 0.5*lap_b + modulus2*b
    return real, imag


def schrodinger_residual_fd(field_k, field_next, j, h_t, h_x):
    """
    Residual f(t_k, x_j) between two levels as (real part, imaginary part).

    :param field_k:    :py:class:`ComplexField` at t_k over x_0..x_N
    :param field_next: :py:class:`ComplexField` at t_{k+1}
    :param j:          spatial index 0..N-1
    """
    N = len(field_next.real) - 1
    if j < 0 or j >= N:
        raise InputError("Residual index j=%d outside 0..%d" % (j, N - 1))
    real, imag = schrodinger_residual_rows(field_k.real, field_k.imag, field_next.real, field_next.imag, h_t, h_x)
    return float(real[j]), float(imag[j])


def _periodic_second_difference(N, h_x):
    """
    (N, N) periodic second difference over x_0..x_{N-1}.
    """
    main = np.full(N, -2.0/(h_x*h_x))
    off  = np.full(N - 1, 1.0/(h_x*h_x))
    lap  = scipy.sparse.diags([off, main, off], [-1, 0, 1], shape=(N, N), format="lil")
    lap[0, N - 1] += 1.0/(h_x*h_x)
    lap[N - 1, 0] += 1.0/(h_x*h_x)
    return lap.tocsr()


def _step_residual(psi, psi_k, lap, h_t):
    return 1j*(psi - psi_k)/h_t + 0.5*lap.dot(psi) + np.abs(psi)**2*psi


class SchrodingerSolver(object):
    """
    Level-by-level solver of the implicit Euler system with periodic identification ``psi_N = psi_0``.

    ``method = "picard"`` (the default) lags the nonlinearity and solves the linear implicit system; it contracts
    only for small enough time steps.  ``method = "newton"`` linearizes the cubic term (sparse Jacobian, direct
    solve) and also converges on coarse time grids.
    """
    #: Accepted per-step residual, max |f|
    TOLERANCE       = 1e-10
    #: Iterations per step before giving up
    MAX_ITERATIONS  = 50
    #: Supported methods
    METHODS         = ["picard", "newton"]

    def __init__(self, N, T, method="picard", tolerance=TOLERANCE, max_iterations=MAX_ITERATIONS):
        if N < 2 or T < 2:
            raise InputError("Schroedinger solver needs N, T >= 2, got N=%d T=%d" % (N, T))
        if method not in SchrodingerSolver.METHODS:
            raise InputError("Unknown Schroedinger solver method %s; expected one of %s" % (method, str(SchrodingerSolver.METHODS)))
        self.grid           = build_interval_grid(N, T)
        self.N              = int(N)
        self.T              = int(T)
        self.h_t, self.h_x  = self.grid.spacing
        self.method         = method
        self.tolerance      = tolerance
        self.max_iterations = max_iterations
        self.lap            = _periodic_second_difference(self.N, self.h_x)
        self.eye            = scipy.sparse.identity(self.N, format="csr")
        if method == "picard":
            self.picard_lu  = scipy.sparse.linalg.splu(((1j/self.h_t)*self.eye + 0.5*self.lap).tocsc())
        #: iterations used per step
        self.step_iterations = []

    def _newton_update(self, psi, psi_k, f):
        a, b = psi.real, psi.imag
        jac = scipy.sparse.bmat([[0.5*self.lap + scipy.sparse.diags(3.0*a*a + b*b), -self.eye/self.h_t + scipy.sparse.diags(2.0*a*b)],
                                 [self.eye/self.h_t + scipy.sparse.diags(2.0*a*b),  0.5*self.lap + scipy.sparse.diags(a*a + 3.0*b*b)]],
                                format="csc")
        delta = scipy.sparse.linalg.spsolve(jac, -np.concatenate([f.real, f.imag]))
        return psi + delta[:self.N] + 1j*delta[self.N:]

    def _picard_update(self, psi, psi_k):
        return self.picard_lu.solve((1j/self.h_t)*psi_k - np.abs(psi)**2*psi)

    def step(self, psi_k, step_index):
        """
        Solves for level k+1 from level k (both over x_0..x_{N-1}).
        """
        psi = psi_k.copy()
        for iteration in range(self.max_iterations + 1):
            f        = _step_residual(psi, psi_k, self.lap, self.h_t)
            residual = np.max(np.abs(f))
            if not np.isfinite(residual):
                break
            if residual <= self.tolerance:
                self.step_iterations.append(iteration)
                return psi
            if iteration == self.max_iterations:
                break
            if self.method == "newton":
                psi = self._newton_update(psi, psi_k, f)
            else:
                psi = self._picard_update(psi, psi_k)
        raise FixedPointDiverged(step_index, "Schroedinger %s iteration did not reach max|f| <= %.1e in step %d (last %.3e)" %
                                 (self.method, self.tolerance, step_index, residual))

    def solve(self):
        x      = self.grid.coordinates(1)
        psi    = initial_profile(x[:self.N]).astype(np.complex128)
        levels = [ComplexField.from_complex(np.append(psi, psi[0]))]
        for k in range(self.T):
            psi = self.step(psi, k)
            levels.append(ComplexField.from_complex(np.append(psi, psi[0])))
        PinnLabLogger.info("Schroedinger reference N=%d T=%d (%s): %d steps, %d iterations total, max |psi| %.4f at t=2pi" %
                           (self.N, self.T, self.method, self.T, sum(self.step_iterations), np.max(levels[-1].modulus())))
        return levels


def solve_schrodinger_fdm(N, T, method="picard"):
    """
    Reference trajectory: one :py:class:`ComplexField` over x_0..x_N per level t_0..t_T.

    :raises: :py:class:`pinnlab.Error.FixedPointDiverged` with the failing step
    """
    return SchrodingerSolver(N, T, method).solve()


def trajectory_values(levels):
    """
    Levels stacked into grid values (num_nodes, 2) in lattice order (t slowest).
    """
    real = np.stack([level.real for level in levels])
    imag = np.stack([level.imag for level in levels])
    return np.stack([real.ravel(), imag.ravel()], axis=1)


def trajectory_residual(levels, h_t, h_x):
    """
    Max |f| over all rows of a trajectory.
    """
    values     = np.array([level.to_complex() for level in levels])
    real, imag = schrodinger_residual_rows(values[:-1].real, values[:-1].imag, values[1:].real, values[1:].imag, h_t, h_x)
    return float(np.max(np.hypot(real, imag)))


class SchrodingerResidualFD(DiscreteResidual):
    """
    Stencil residual on lattice values: one interior row (real, imag) per (t_{k+1}, x_j), k < T, j < N,
    and the initial condition ``psi(0, x_j) - 2 sech(x_j)`` on the boundary rows.
    """
    def __init__(self, grid, colloc):
        DiscreteResidual.__init__(self, grid.node_coordinates(), colloc, 2)
        self.shape          = grid.shape
        self.h_t, self.h_x  = grid.spacing
        self.initial        = initial_profile(grid.coordinates(1))

    def residuals(self, u):
        levels, nodes = self.shape
        values = u.reshape(levels, nodes, 2)
        a      = values[:, :, 0]
        b      = values[:, :, 1]
        real, imag = schrodinger_residual_rows(a[:-1], b[:-1], a[1:], b[1:], self.h_t, self.h_x)
        interior = concatenate([real.reshape(-1, 1), imag.reshape(-1, 1)], axis=1)
        boundary = concatenate([(a[0] - self.initial).reshape(-1, 1), b[0].reshape(-1, 1)], axis=1)
        return interior, boundary


def schrodinger_residual_ad(z, jet):
    """
    Continuous residual at (t, x): real part ``-b_t + 0.5 a_xx + |psi|^2 a``, imaginary part
    ``a_t + 0.5 b_xx + |psi|^2 b`` for psi = a + i b; batched jets give (P, 2).
    """
    if len(jet.value.shape) == 1:
        real, imag = _ad_parts(jet.value[0:1], jet.value[1:2], jet.grad[0:1, 0], jet.grad[1:2, 0],
                               jet.hess[0:1, 1, 1], jet.hess[1:2, 1, 1])
        return concatenate([real, imag], axis=0)
    real, imag = _ad_parts(jet.value[:, 0:1], jet.value[:, 1:2], jet.grad[:, 0:1, 0], jet.grad[:, 1:2, 0],
                           jet.hess[:, 0:1, 1, 1], jet.hess[:, 1:2, 1, 1])
    return concatenate([real, imag], axis=1)


def _ad_parts(a, b, a_t, b_t, a_xx, b_xx):
    modulus2 = a*a + b*b
    return -b_t + 0.5*a_xx + modulus2*a, a_t + 0.5*b_xx + modulus2*b


def _periodic_partner(points):
    partner        = np.array(points, copy=True)
    partner[:, 1]  = -partner[:, 1]
    return partner


def schrodinger_periodic_residual(z, jet, partner_jet):
    """
    Periodic boundary residual between (t, -5) and (t, 5): value and x-derivative differences of both channels.
    """
    values = jet.value - partner_jet.value
    slopes = jet.grad[:, :, 1] - partner_jet.grad[:, :, 1]
    return concatenate([values, slopes], axis=1)

#: AD-PINN interior residual
SCHRODINGER_RESIDUAL  = ResidualForm(schrodinger_residual_ad, order=2, name="schrodinger")
#: AD-PINN periodic boundary residual, evaluated at x = -5 against x = 5
SCHRODINGER_PERIODIC  = ResidualForm(schrodinger_periodic_residual, order=1, name="periodic", partner=_periodic_partner)


def schrodinger_ad_collocation(grid):
    """
    AD-PINN points on the lattice: interior (t_k, x_j) for k = 1..T, j = 1..N-1 and boundary (t_k, -5), k = 1..T.
    The initial line is left to the hard initial condition.
    """
    t      = grid.coordinates(0)[1:]
    x      = grid.coordinates(1)
    tt, xx = np.meshgrid(t, x[1:-1], indexing="ij")
    interior = np.stack([tt.ravel(), xx.ravel()], axis=1)
    boundary = np.stack([t, np.full(len(t), x[0])], axis=1)
    return CollocationSet(interior, boundary)


def _initial_offset_jet(points, order):
    x          = points[:, 1]
    num_points = len(x)
    sech       = 1.0/np.cosh(x)
    tanh       = np.tanh(x)
    value      = np.zeros((num_points, 2), dtype=points.dtype)
    value[:, 0] = 2.0*sech
    if order == 0:
        return value, None, None
    grad       = np.zeros((num_points, 2, 2), dtype=points.dtype)
    grad[:, 0, 1] = -2.0*sech*tanh
    if order == 1:
        return value, grad, None
    hess       = np.zeros((num_points, 2, 2, 2), dtype=points.dtype)
    hess[:, 0, 1, 1] = 2.0*sech*(tanh*tanh - sech*sech)
    return value, grad, hess


def _time_scale_jet(points, order):
    num_points = len(points)
    grad       = np.zeros((num_points, 2), dtype=points.dtype)
    grad[:, 0] = 1.0
    return points[:, 0], grad, np.zeros((num_points, 2, 2), dtype=points.dtype)


def schrodinger_hard_constraint():
    """
    Additive anchor ``psi(t, x) = 2 sech(x) + t N(t, x)`` (real channel anchored, imaginary channel starts at 0).
    """
    return AdditiveAnchor(_initial_offset_jet, _time_scale_jet, "sech_anchor")


#: Snapshot times compared in reports
SNAPSHOT_TIMES = [0.393, 0.785, 0.982]


def snapshot_table(grid, reference, predicted, times=SNAPSHOT_TIMES):
    """
    |psi| profiles of reference and prediction at the lattice levels nearest to *times*.

    :param reference: grid values (num_nodes, 2)
    :param predicted: grid values (num_nodes, 2)
    :returns:         DataFrame with columns ``t_requested``, ``t``, ``x``, ``abs_reference``, ``abs_predicted``
    """
    levels, nodes = grid.shape
    t   = grid.coordinates(0)
    x   = grid.coordinates(1)
    ref = np.hypot(reference[:, 0], reference[:, 1]).reshape(levels, nodes)
    pre = np.hypot(predicted[:, 0], predicted[:, 1]).reshape(levels, nodes)
    frames = []
    for requested in times:
        k = int(np.argmin(np.abs(t - requested)))
        frames.append(pd.DataFrame({"t_requested":   requested,
                                    "t":             t[k],
                                    "x":             x,
                                    "abs_reference": ref[k],
                                    "abs_predicted": pre[k]}))
    return pd.concat(frames, ignore_index=True)
