"""
Poisson problem ``-Laplace(u) = 1`` on the slit square with homogeneous Dirichlet data: the 5-point
finite difference system, its conjugate gradient solve, the continuous and the stencil residual forms,
and the hard boundary mask.
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

from .AutoDiff import sparse_dot
from .Error    import InputError, NoConvergence
from .Logger   import PinnLabLogger
from .Losses   import DIRICHLET, DiscreteResidual, ResidualForm
from .Network  import MultiplicativeMask


class DiscreteSystem(object):
    """
    Sparse linear system ``A u = b`` over the interior unknowns of a grid, after Dirichlet elimination.

    ``node_map[eq]`` is the flat grid node of equation *eq*.  :py:attr:`operator` keeps the same rows
    before elimination, acting on all grid nodes, which is what stencil residuals of full grid vectors need.
    """
    #: Relative residual accepted by :py:func:`solve_poisson_fdm`
    SOLVE_TOLERANCE     = 1e-10

    def __init__(self, matrix, rhs, node_map, operator, num_nodes, boundary_nodes=None):
        #: (n_eq, n_eq) scipy CSR matrix
        self.matrix         = matrix
        #: (n_eq,) right hand side
        self.rhs            = np.asarray(rhs, dtype=np.float64)
        #: equation index -> flat grid node
        self.node_map       = np.asarray(node_map, dtype=np.int64)
        #: (n_eq, num_nodes) scipy CSR matrix, rows before elimination
        self.operator       = operator
        self.num_nodes      = int(num_nodes)
        #: flat grid nodes carrying Dirichlet values
        self.boundary_nodes = np.zeros(0, dtype=np.int64) if boundary_nodes is None else np.asarray(boundary_nodes, dtype=np.int64)
        self._equation_of   = None

    def __repr__(self):
        return "DiscreteSystem(equations=%d, nodes=%d, nnz=%d)" % (self.num_equations, self.num_nodes, self.matrix.nnz)

    @property
    def num_equations(self):
        return len(self.rhs)

    def equation_index(self, node):
        """
        Equation index of a flat grid node, or None for Dirichlet nodes.
        """
        if self._equation_of is None:
            self._equation_of = dict((int(n), eq) for eq, n in enumerate(self.node_map))
        return self._equation_of.get(int(node))

    def row(self, eq):
        """
        Equation *eq* as a list of (flat grid node, coefficient) before elimination, and its rhs entry.
        """
        start, end = self.operator.indptr[eq], self.operator.indptr[eq + 1]
        return list(zip(self.operator.indices[start:end].tolist(), self.operator.data[start:end].tolist())), float(self.rhs[eq])

    def to_dataframe(self):
        """
        Rows as a long table with columns ``equation``, ``node``, ``coefficient``, ``rhs``.
        """
        coo = self.operator.tocoo()
        return pd.DataFrame({"equation":    coo.row,
                             "node":        coo.col,
                             "coefficient": coo.data,
                             "rhs":         self.rhs[coo.row]}).sort_values(["equation", "node"]).reset_index(drop=True)


def assemble_dirichlet_laplacian(grid, interior_index, rhs_value=1.0):
    """
    Standard ``2 ndim + 1`` point discretization of ``-Laplace(u) = rhs_value`` at the *interior_index* nodes
    of a non-periodic grid; every other node holds homogeneous Dirichlet data and is eliminated.
    """
    interior_index = np.asarray(interior_index, dtype=np.int64)
    num_eq         = len(interior_index)
    multi          = np.array(np.unravel_index(interior_index, grid.shape))

    rows = [np.arange(num_eq)]
    cols = [interior_index]
    vals = [np.full(num_eq, sum(2.0/(h*h) for h in grid.spacing))]
    for axis in range(grid.ndim):
        h = grid.spacing[axis]
        for step in (-1, 1):
            shifted        = multi.copy()
            shifted[axis] += step
            if np.any(shifted[axis] < 0) or np.any(shifted[axis] >= grid.shape[axis]):
                raise InputError("Interior node without a neighbor along axis %d; the grid frame must be Dirichlet" % axis)
            rows.append(np.arange(num_eq))
            cols.append(np.ravel_multi_index(tuple(shifted), grid.shape))
            vals.append(np.full(num_eq, -1.0/(h*h)))

    operator = scipy.sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                       shape=(num_eq, grid.num_nodes))
    operator.sort_indices()
    matrix   = operator[:, interior_index].tocsr()
    boundary = np.setdiff1d(np.arange(grid.num_nodes), interior_index)
    rhs      = np.full(num_eq, float(rhs_value))
    return DiscreteSystem(matrix, rhs, interior_index, operator, grid.num_nodes, boundary)


def assemble_poisson_slit(grid, colloc):
    """
    Poisson system on the slit domain from :py:func:`pinnlab.Collocation.build_slit_domain`.
    Couplings to outer and slit boundary nodes are eliminated into the (zero) Dirichlet data, rhs = 1.
    """
    system = assemble_dirichlet_laplacian(grid, colloc.interior_index, 1.0)
    PinnLabLogger.debug("Assembled %s" % str(system))
    return system


def solve_poisson_fdm(system, tolerance=DiscreteSystem.SOLVE_TOLERANCE, maxiter=None):
    """
    Conjugate gradient solve of the eliminated system.

    :returns: grid values at all nodes (num_nodes,), zero at Dirichlet nodes
    :raises:  :py:class:`pinnlab.Error.NoConvergence` if the relative residual exceeds *tolerance*
    """
    u = np.zeros(system.num_nodes)
    rhs_norm = np.linalg.norm(system.rhs)
    if rhs_norm == 0.0:
        return u

    iterations = [0]

    def count(xk):
        iterations[0] += 1

    if maxiter is None:
        maxiter = 10*system.num_equations
    # cg stops on the recursive residual; aim below the tolerance so the true residual passes too
    interior, info = scipy.sparse.linalg.cg(system.matrix, system.rhs, rtol=0.01*tolerance, atol=0.0,
                                            maxiter=maxiter, callback=count)
    relative = np.linalg.norm(system.matrix.dot(interior) - system.rhs)/rhs_norm
    if info != 0 or relative > tolerance:
        raise NoConvergence(iterations[0], "CG stopped with info %d and relative residual %.3e > %.1e" % (info, relative, tolerance))

    PinnLabLogger.debug("CG converged in %d iterations, relative residual %.3e" % (iterations[0], relative))
    u[system.node_map] = interior
    return u


def poisson_residual_ad(z, jet):
    """
    ``-(u_xx + u_yy) - 1`` from a jet; batched jets give (P, 1), single-point jets (1,).
    """
    hess = jet.hess
    if len(hess.shape) == 3:
        return -(hess[0:1, 0, 0] + hess[0:1, 1, 1]) - 1.0
    return -(hess[:, 0:1, 0, 0] + hess[:, 0:1, 1, 1]) - 1.0

#: AD-PINN interior residual
POISSON_RESIDUAL  = ResidualForm(poisson_residual_ad, order=2, name="poisson")
#: AD-PINN boundary residual
POISSON_BOUNDARY  = DIRICHLET


class PoissonResidualFD(DiscreteResidual):
    """
    Stencil residual ``(A u - b)`` at interior nodes and ``u`` at boundary nodes of full grid vectors.
    """
    def __init__(self, grid, colloc, system):
        DiscreteResidual.__init__(self, grid.node_coordinates(), colloc, 1)
        self.system         = system
        self.boundary_index = colloc.boundary_index
        if colloc.interior_index is None or not np.array_equal(colloc.interior_index, system.node_map):
            raise InputError("Collocation interior does not match the equations of %s" % str(system))

    def residuals(self, u):
        interior = sparse_dot(self.system.operator, u) - self.system.rhs.reshape(-1, 1)
        boundary = u[self.boundary_index]
        return interior, boundary


def _segment_distance_jet(x, y):
    """
    Distance to the segment [0, 1] x {0} with gradient and Hessian; both are zero on the segment.
    The middle branch covers 0 <= x <= 1.
    """
    num_points = len(x)
    dx    = np.where(x < 0.0, x, np.where(x > 1.0, x - 1.0, 0.0))
    r     = np.sqrt(dx*dx + y*y)
    safe  = np.where(r > 0.0, r, 1.0)
    nx    = np.where(r > 0.0, dx/safe, 0.0)
    ny    = np.where(r > 0.0, y/safe, 0.0)

    grad  = np.stack([nx, ny], axis=1)
    hess  = np.zeros((num_points, 2, 2), dtype=x.dtype)
    inv_r = np.where(r > 0.0, 1.0/safe, 0.0)
    hess[:, 0, 0] = (1.0 - nx*nx)*inv_r
    hess[:, 0, 1] = -nx*ny*inv_r
    hess[:, 1, 0] = hess[:, 0, 1]
    hess[:, 1, 1] = (1.0 - ny*ny)*inv_r

    middle = (x >= 0.0) & (x <= 1.0)
    grad[middle, 0] = 0.0
    grad[middle, 1] = np.sign(y[middle])
    hess[middle]    = 0.0
    return r, grad, hess


def slit_mask_jet(points, order=2):
    """
    ``m(x, y) = (1 - x^2)(1 - y^2) rho(x, y)`` with rho the distance to the slit, and its first two derivatives.
    m vanishes on the square frame and on the slit.
    """
    points = np.atleast_2d(points)
    x, y   = points[:, 0], points[:, 1]
    px, py = 1.0 - x*x, 1.0 - y*y
    p      = px*py
    rho, rho_grad, rho_hess = _segment_distance_jet(x, y)
    m      = p*rho
    if order == 0:
        return m, None, None

    p_grad = np.stack([-2.0*x*py, -2.0*y*px], axis=1)
    m_grad = p[:, None]*rho_grad + rho[:, None]*p_grad
    if order == 1:
        return m, m_grad, None

    p_hess = np.zeros_like(rho_hess)
    p_hess[:, 0, 0] = -2.0*py
    p_hess[:, 1, 1] = -2.0*px
    p_hess[:, 0, 1] = 4.0*x*y
    p_hess[:, 1, 0] = p_hess[:, 0, 1]
    m_hess = (p[:, None, None]*rho_hess + rho[:, None, None]*p_hess
              + p_grad[:, :, None]*rho_grad[:, None, :] + rho_grad[:, :, None]*p_grad[:, None, :])
    return m, m_grad, m_hess


def poisson_hard_constraint():
    """
    Multiplicative mask realizing the homogeneous Dirichlet condition on the slit domain.
    """
    return MultiplicativeMask(slit_mask_jet, "slit_mask")


def evaluation_points(resolution):
    """
    ``resolution x resolution`` uniform points on [-1, 1]^2, x varying slowest, for field output.
    """
    axis   = np.linspace(-1.0, 1.0, int(resolution))
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=1)
