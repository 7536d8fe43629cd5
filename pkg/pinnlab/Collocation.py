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

from .Error  import DuplicateAbscissa, GridTooSmall, InputError, MeshTooCoarse, NonIntegralMesh
from .Logger import PinnLabLogger


class StructuredGrid(object):
    """
    Tensor-product grid.  Node coordinates along axis *a* are ``origin[a] + index*spacing[a]``, computed
    with one multiplication per node so classification by coordinate is reproducible.

    Flat node indices follow C order (the first axis varies slowest).
    """
    def __init__(self, shape, spacing, origin, periodic, axis_names=None, ghost=None):
        """
        :param shape:      nodes per axis
        :param spacing:    h per axis
        :param origin:     coordinate of index 0 per axis
        :param periodic:   wrap-around flag per axis
        :param axis_names: coordinate names used in CSV export
        :param ghost:      dict axis -> {ghost index: stored index} identifications
        """
        self.shape      = tuple(int(n) for n in shape)
        self.spacing    = tuple(float(h) for h in spacing)
        self.origin     = tuple(float(o) for o in origin)
        self.periodic   = tuple(bool(p) for p in periodic)
        self.axis_names = tuple(axis_names) if axis_names else tuple("x%d" % a for a in range(len(self.shape)))
        self.ghost      = dict(ghost) if ghost else {}

        if not (len(self.shape) == len(self.spacing) == len(self.origin) == len(self.periodic) == len(self.axis_names)):
            raise InputError("StructuredGrid axis descriptions have different lengths")

    def __repr__(self):
        return "StructuredGrid(shape=%s, spacing=%s, periodic=%s)" % (str(self.shape), str(self.spacing), str(self.periodic))

    @property
    def ndim(self):
        return len(self.shape)

    @property
    def num_nodes(self):
        return int(np.prod(self.shape))

    def coordinates(self, axis):
        """
        Coordinates of the nodes along *axis*.
        """
        return self.origin[axis] + np.arange(self.shape[axis])*self.spacing[axis]

    def node_coordinates(self):
        """
        (num_nodes, ndim) array of node coordinates in flat index order.
        """
        mesh = np.meshgrid(*[self.coordinates(a) for a in range(self.ndim)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def resolve(self, axis, index):
        """
        Maps a possibly out-of-range index on *axis* to a stored index: wrap-around on periodic axes,
        recorded ghost identifications otherwise.  Returns None when the index has no counterpart.
        """
        n = self.shape[axis]
        if self.periodic[axis]:
            return index % n
        if index in self.ghost.get(axis, {}):
            return self.ghost[axis][index]
        if 0 <= index < n:
            return index
        return None

    def flat_index(self, multi_index):
        """
        Flat node index of a multi-index (after :py:meth:`StructuredGrid.resolve` on each axis).
        """
        resolved = []
        for axis, index in enumerate(multi_index):
            r = self.resolve(axis, int(index))
            if r is None:
                raise InputError("Index %d is outside axis %d of %s" % (index, axis, str(self)))
            resolved.append(r)
        return int(np.ravel_multi_index(tuple(resolved), self.shape))

    def multi_index(self, flat):
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def neighbor(self, flat, axis, step):
        """
        Flat index of the node *step* positions away along *axis*, or None when there is none.
        """
        multi        = list(self.multi_index(flat))
        r            = self.resolve(axis, multi[axis] + step)
        if r is None:
            return None
        multi[axis]  = r
        return int(np.ravel_multi_index(tuple(multi), self.shape))


class CollocationSet(object):
    """
    Interior points, boundary points and data points with quadrature weights.

    Points are stored as (N, d) arrays.  Weights default to uniform ``1/N`` per set.
    When the points come from a :py:class:`StructuredGrid`, ``interior_index`` and ``boundary_index`` hold
    the corresponding flat node indices.
    """
    #: Point classes used in CSV export
    CLASS_INTERIOR  = "interior"
    CLASS_BOUNDARY  = "boundary"
    CLASS_DATA      = "data"

    def __init__(self, interior, boundary, data_points=None, data_targets=None,
                 interior_weights=None, boundary_weights=None, data_weights=None,
                 interior_index=None, boundary_index=None, boundary_class=None):
        self.interior = np.atleast_2d(np.asarray(interior, dtype=np.float64)) if len(interior) else np.zeros((0, 0))
        self.boundary = np.atleast_2d(np.asarray(boundary, dtype=np.float64)) if len(boundary) else np.zeros((0, self.interior.shape[1]))
        if self.interior.shape[0] == 0:
            self.interior = np.zeros((0, self.boundary.shape[1]))
        self.dim = self.interior.shape[1] if self.interior.shape[0] else self.boundary.shape[1]

        if data_points is None or len(data_points) == 0:
            self.data_points  = np.zeros((0, self.dim))
            self.data_targets = np.zeros((0, 1))
        else:
            self.data_points  = np.atleast_2d(np.asarray(data_points, dtype=np.float64))
            self.data_targets = np.asarray(data_targets, dtype=np.float64).reshape(len(self.data_points), -1)

        self.interior_weights = self._weights(interior_weights, len(self.interior), "interior")
        self.boundary_weights = self._weights(boundary_weights, len(self.boundary), "boundary")
        self.data_weights     = self._weights(data_weights, len(self.data_points), "data")

        self.interior_index   = None if interior_index is None else np.asarray(interior_index, dtype=np.int64)
        self.boundary_index   = None if boundary_index is None else np.asarray(boundary_index, dtype=np.int64)
        #: optional finer label per boundary point, e.g. "outer" / "slit"
        self.boundary_class   = None if boundary_class is None else list(boundary_class)

        self._check_distinct()

    @staticmethod
    def _weights(weights, count, label):
        if weights is None:
            return np.full(count, 1.0/count) if count > 0 else np.zeros(0)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.size != count:
            raise InputError("%s weights have length %d for %d points" % (label, weights.size, count))
        if count and np.min(weights) <= 0.0:
            raise InputError("%s weights must be positive" % label)
        return weights

    def _check_distinct(self):
        interior = set(map(tuple, self.interior.tolist()))
        boundary = set(map(tuple, self.boundary.tolist()))
        if len(interior) != len(self.interior):
            raise DuplicateAbscissa("Interior collocation points are not pairwise distinct")
        if len(boundary) != len(self.boundary):
            raise DuplicateAbscissa("Boundary collocation points are not pairwise distinct")
        if len(set(map(tuple, self.data_points.tolist()))) != len(self.data_points):
            raise DuplicateAbscissa("Data points are not pairwise distinct")
        if interior & boundary:
            raise DuplicateAbscissa("Interior and boundary collocation sets intersect")

    @property
    def num_interior(self):
        return len(self.interior)

    @property
    def num_boundary(self):
        return len(self.boundary)

    @property
    def num_data(self):
        return len(self.data_points)

    def all_points(self):
        """
        Interior then boundary points, (N_F + N_B, d).
        """
        return np.vstack([self.interior, self.boundary])

    def to_dataframe(self, axis_names=None):
        """
        Point table with one column per coordinate plus ``class``, for plotting and external checks.
        """
        if axis_names is None:
            axis_names = ["x", "y", "z", "w"][:self.dim] if self.dim <= 4 else ["x%d" % a for a in range(self.dim)]
        frames = []
        boundary_labels = self.boundary_class if self.boundary_class else [CollocationSet.CLASS_BOUNDARY]*self.num_boundary
        for points, labels in [(self.interior,    [CollocationSet.CLASS_INTERIOR]*self.num_interior),
                               (self.boundary,    boundary_labels),
                               (self.data_points, [CollocationSet.CLASS_DATA]*self.num_data)]:
            if len(points) == 0:
                continue
            df = pd.DataFrame(points, columns=list(axis_names))
            df["class"] = labels
            frames.append(df)
        return pd.concat(frames, ignore_index=True)


def build_slit_domain(h):
    """
    Grid of mesh size *h* on [-1, 1]^2 with the slit [0, 1) x {0} removed.

    Nodes on the square frame are outer boundary; nodes with y = 0 and 0 <= x < 1 are slit boundary;
    all others are interior.  The point (1, 0) is outer boundary.

    :returns: (StructuredGrid, CollocationSet)
    """
    h = float(h)
    if h <= 0.0:
        raise NonIntegralMesh("Mesh size must be positive, got %g" % h)
    cells = int(round(2.0/h))
    if cells < 1 or abs(cells*h - 2.0) > 1e-12:
        raise NonIntegralMesh("2/h must be an integer, got h=%r" % h)

    grid   = StructuredGrid((cells + 1, cells + 1), (h, h), (-1.0, -1.0), (False, False), ("x", "y"))
    x      = grid.coordinates(0)
    y      = grid.coordinates(1)
    coords = grid.node_coordinates()

    interior_index = []
    boundary_index = []
    boundary_class = []
    for i in range(cells + 1):
        for j in range(cells + 1):
            flat = i*(cells + 1) + j
            if i == 0 or j == 0 or i == cells or j == cells:
                boundary_index.append(flat)
                boundary_class.append("outer")
            elif y[j] == 0.0 and 0.0 <= x[i] < 1.0:
                boundary_index.append(flat)
                boundary_class.append("slit")
            else:
                interior_index.append(flat)

    if len(interior_index) == 0:
        raise MeshTooCoarse("Slit domain with h=%g has no interior nodes" % h)

    colloc = CollocationSet(coords[interior_index], coords[boundary_index],
                            interior_index=interior_index, boundary_index=boundary_index,
                            boundary_class=boundary_class)
    PinnLabLogger.info("Slit domain h=%g: %d nodes, %d interior, %d boundary (%d slit, %d outer)" %
                       (h, grid.num_nodes, colloc.num_interior, colloc.num_boundary,
                        boundary_class.count("slit"), boundary_class.count("outer")))
    return grid, colloc


def build_periodic_grid(n, length):
    """
    Periodic grid with nodes ``i*(length/n)`` per axis.

    :param n:      nodes per axis; an int, or a sequence giving the number of axes
    :param length: period per axis; a float or a sequence
    """
    n_list = list(n) if np.ndim(n) else [int(n), int(n)]
    if np.ndim(length):
        length_list = [float(l) for l in length]
    else:
        length_list = [float(length)]*len(n_list)
    if len(length_list) != len(n_list):
        raise InputError("build_periodic_grid got %d node counts and %d lengths" % (len(n_list), len(length_list)))
    if min(n_list) < 3:
        raise GridTooSmall("Periodic grids need at least 3 nodes per axis, got %s" % str(n_list))

    names = ("x", "y", "z")[:len(n_list)] if len(n_list) <= 3 else None
    return StructuredGrid(n_list, [l/k for l, k in zip(length_list, n_list)], [0.0]*len(n_list),
                          [True]*len(n_list), names)


def build_interval_grid(N, T):
    """
    Space-time lattice ``t_k = k*h_t`` (k = 0..T, h_t = 2 pi/T) by ``x_j = -5 + j*h_x`` (j = 0..N, h_x = 10/N).
    Axis 0 is time, axis 1 is space; the spatial ghost node ``x_{-1}`` is identified with ``x_{N-1}``.
    """
    N = int(N)
    T = int(T)
    if N < 1 or T < 1:
        raise InputError("build_interval_grid needs N, T >= 1, got N=%d T=%d" % (N, T))
    return StructuredGrid((T + 1, N + 1), (2.0*np.pi/T, 10.0/N), (0.0, -5.0), (False, False),
                          ("t", "x"), ghost={1: {-1: N - 1}})


def interval_collocation(grid):
    """
    Collocation set on a lattice from :py:func:`build_interval_grid`: one interior point per residual row,
    anchored at the new time level ``(t_{k+1}, x_j)`` for k < T and j < N, and the initial line
    ``(0, x_j)``, j = 0..N, as boundary.
    """
    T      = grid.shape[0] - 1
    N      = grid.shape[1] - 1
    t      = grid.coordinates(0)
    x      = grid.coordinates(1)
    tt, xx = np.meshgrid(t[1:], x[:N], indexing="ij")
    interior       = np.stack([tt.ravel(), xx.ravel()], axis=1)
    interior_index = [(k + 1)*(N + 1) + j for k in range(T) for j in range(N)]
    boundary       = np.stack([np.zeros(N + 1), x], axis=1)
    boundary_index = list(range(N + 1))
    return CollocationSet(interior, boundary, interior_index=interior_index, boundary_index=boundary_index)


class CoreSubgrids(object):
    """
    Index sets of a 2D periodic grid trimmed by one and by two cells at each side, plus the time levels
    that admit a forward difference.
    """
    def __init__(self, shape, num_snapshots):
        nx, ny = shape
        #: slices selecting the one-cell trimmed block of an (..., nx, ny) array
        self.trim1  = (slice(1, nx - 1), slice(1, ny - 1))
        #: slices selecting the two-cell trimmed block
        self.trim2  = (slice(2, nx - 2), slice(2, ny - 2))
        i1, j1      = np.meshgrid(np.arange(1, nx - 1), np.arange(1, ny - 1), indexing="ij")
        i2, j2      = np.meshgrid(np.arange(2, nx - 2), np.arange(2, ny - 2), indexing="ij")
        #: flat node indices of the one-cell trimmed grid
        self.omega1 = (i1*ny + j1).ravel()
        #: flat node indices of the two-cell trimmed grid
        self.omega2 = (i2*ny + j2).ravel()
        #: snapshot indices k with a k+1 successor
        self.t_core = np.arange(num_snapshots - 1)


def core_subgrids(grid, num_snapshots):
    """
    One- and two-cell trimmed node sets of a 2D grid and the time indices with a successor snapshot.
    """
    if grid.ndim != 2:
        raise InputError("core_subgrids needs a 2D spatial grid")
    if min(grid.shape) < 5:
        raise GridTooSmall("core_subgrids needs at least 5 nodes per axis, got %s" % str(grid.shape))
    if num_snapshots < 2:
        raise GridTooSmall("core_subgrids needs at least 2 snapshots, got %d" % num_snapshots)
    return CoreSubgrids(grid.shape, num_snapshots)
