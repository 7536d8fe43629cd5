"""
Constructions of networks that vanish on a collocation set but not elsewhere, and the numerical
certification that adding them to any network leaves the PINN losses unchanged.

The smooth construction lifts a one dimensional Hermite interpolant along a ridge direction; the ReLU
construction is a tent supported in a small ball away from every collocation point.
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
import itertools
import math

import numpy as np
import scipy.linalg

from .Activation  import Activation, ReLU
from .Collocation import CollocationSet
from .Error       import BallIntersectsCollocation, DimensionMismatch, DuplicateAbscissa, ExhaustedRetries
from .Error       import IllConditioned, InputError, InvalidArchitecture, InvalidRegime, WrongActivation
from .Logger      import PinnLabLogger
from .Losses      import LossWeights, ResidualForm, adpinn_loss
from .Network     import ConstrainedNetwork, Network, deepen_relu_identity, linear_combine

#: A projection direction is admissible if all projected gaps exceed this fraction of the point cloud diameter
GAP_FACTOR                    = 1e-9
#: Random directions drawn before giving up
MAX_DIRECTION_DRAWS           = 1000
#: Admissible directions compared by :py:func:`interpolate_values`, which keeps the one with the largest gap
INTERPOLATION_DIRECTION_DRAWS = 16
#: Largest condition number accepted for the (row-equilibrated) interpolation systems
MAX_CONDITION                 = 1e12
#: Largest residual of the equilibrated Hermite system
HERMITE_SOLVE_TOLERANCE       = 1e-8
#: Hermite attempts with fresh inner weights after the first
HERMITE_RETRIES               = 20
#: Hermite attempts using inner weights in [0.1, 1] centered on the abscissae mean; later attempts place units locally
CENTERED_ATTEMPTS             = 3
#: Activation shifts tried in order; the first with all needed derivatives away from zero is used
SHIFT_CANDIDATES              = [0.5, 0.3, 0.7, 1.0]
#: Smallest accepted ``|sigma^(k)(a)|`` at the chosen shift
SHIFT_DERIVATIVE_FLOOR        = 1e-3
#: Tolerance for jet certification of smooth witnesses
SMOOTH_TOLERANCE              = 1e-6
#: Per-point residual accepted by :py:func:`interpolate_values`, relative to max(1, max |target|)
INTERPOLATION_TOLERANCE       = 1e-8
#: Steepness of smooth interpolation steps, in units of the local gap
STEP_SHARPNESS                = 4.0


class HyperplaneFamily(object):
    """
    Affine hyperplanes ``{z : v_j . z = b_j}`` with monomial directions ``v_j = (1, t_j, ..., t_j^(d-1))``.

    Any *d* of the directions form a Vandermonde matrix, so every *d* hyperplanes meet in exactly one point.
    ``block_map`` maps a point index to the indices of the hyperplanes passing through it.
    """
    #: Families up to this size have every d-subset determinant checked
    EXHAUSTIVE_LIMIT    = 12
    #: d-subsets sampled for larger families
    SAMPLED_SUBSETS     = 500

    def __init__(self, abscissae, directions, offsets=None, block_map=None):
        self.abscissae       = np.asarray(abscissae, dtype=np.float64)
        self.directions      = np.asarray(directions, dtype=np.float64)
        self.offsets         = np.zeros(len(self.abscissae)) if offsets is None else np.asarray(offsets, dtype=np.float64)
        self.block_map       = {} if block_map is None else block_map
        #: smallest |det| over the checked d-subsets
        self.min_abs_det     = None
        self.subsets_checked = 0

    def __repr__(self):
        return "HyperplaneFamily(count=%d, d=%d, min_abs_det=%s)" % (self.count, self.dim, str(self.min_abs_det))

    @property
    def count(self):
        return self.directions.shape[0]

    @property
    def dim(self):
        return self.directions.shape[1]

    def certify(self, seed=0):
        """
        Checks d-subset determinants, all of them for small families and a sample otherwise.

        :returns: the smallest |det| found
        :raises:  :py:class:`pinnlab.Error.DuplicateAbscissa` if a subset is singular
        """
        d = self.dim
        if self.count < d:
            self.min_abs_det     = float("inf")
            self.subsets_checked = 0
            return self.min_abs_det

        if self.count <= HyperplaneFamily.EXHAUSTIVE_LIMIT:
            subsets = list(itertools.combinations(range(self.count), d))
        else:
            rng     = np.random.default_rng(seed)
            subsets = [tuple(np.sort(rng.choice(self.count, size=d, replace=False)))
                       for _ in range(HyperplaneFamily.SAMPLED_SUBSETS)]

        dets = [abs(np.linalg.det(self.directions[list(subset)])) for subset in subsets]
        self.min_abs_det     = float(min(dets))
        self.subsets_checked = len(dets)
        if self.min_abs_det == 0.0:
            raise DuplicateAbscissa("Singular %d-subset in %s" % (d, str(self)))
        PinnLabLogger.debug("%s: checked %d subsets" % (str(self), self.subsets_checked))
        return self.min_abs_det

    def intersection(self, indices):
        """
        The unique point where the hyperplanes *indices* (exactly d of them) meet.
        """
        indices = list(indices)
        if len(indices) != self.dim:
            raise InputError("Need %d hyperplanes to intersect, got %d" % (self.dim, len(indices)))
        return np.linalg.solve(self.directions[indices], self.offsets[indices])


def vandermonde_directions(count, d, abscissae=None, seed=0):
    """
    Monomial directions for *count* hyperplanes in R^d, certified admissible.

    :param abscissae: pairwise distinct t_j; ``0, 1, ..., count-1`` if None
    :returns:         :py:class:`HyperplaneFamily` with zero offsets
    :raises:          :py:class:`pinnlab.Error.DuplicateAbscissa`
    """
    if abscissae is None:
        abscissae = np.arange(count, dtype=np.float64)
    t = np.asarray(abscissae, dtype=np.float64).reshape(-1)
    if t.size != count:
        raise InputError("Expected %d abscissae, got %d" % (count, t.size))
    if np.unique(t).size != t.size:
        raise DuplicateAbscissa("Hyperplane abscissae are not pairwise distinct")

    family = HyperplaneFamily(t, np.vander(t, d, increasing=True))
    family.certify(seed)
    return family


def hyperplane_family(points, r, seed=0):
    """
    Admissible family with ``d + r`` hyperplanes through each of the given points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    num_points, d = points.shape
    per_point = d + r
    family    = vandermonde_directions(num_points*per_point, d, seed=seed)

    block_map = {}
    offsets   = np.zeros(family.count)
    for i in range(num_points):
        block        = list(range(i*per_point, (i + 1)*per_point))
        block_map[i] = block
        offsets[block] = family.directions[block].dot(points[i])
    family.offsets   = offsets
    family.block_map = block_map
    return family


def projection_gap(points, direction):
    """
    Smallest distance between sorted projections of *points* onto *direction*; inf for fewer than two points.
    """
    proj = np.atleast_2d(points).dot(direction)
    if proj.size < 2:
        return float("inf")
    return float(np.min(np.diff(np.sort(proj))))


def _diameter(points):
    # bounding box diagonal, an upper bound of the diameter
    if len(points) == 0:
        return 0.0
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def is_admissible_direction(points, direction):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return projection_gap(points, direction) > GAP_FACTOR*_diameter(points)


def choose_projection_direction(points, seed=0):
    """
    Random unit direction along which all *points* project to distinct abscissae.

    :returns: (direction, minimum gap)
    :raises:  :py:class:`pinnlab.Error.ExhaustedRetries` if no admissible direction turns up
    """
    points    = np.atleast_2d(np.asarray(points, dtype=np.float64))
    d         = points.shape[1]
    threshold = GAP_FACTOR*_diameter(points)

    if d == 1:
        direction = np.ones(1)
        gap       = projection_gap(points, direction)
        if gap <= threshold:
            raise ExhaustedRetries("One dimensional points are not pairwise distinct")
        return direction, gap

    rng = np.random.default_rng(seed)
    for draw in range(MAX_DIRECTION_DRAWS):
        direction = rng.standard_normal(d)
        norm      = np.linalg.norm(direction)
        if norm == 0.0:
            continue
        direction /= norm
        gap = projection_gap(points, direction)
        if gap > threshold:
            PinnLabLogger.debug("Projection direction found after %d draws, gap %.3e" % (draw + 1, gap))
            return direction, gap

    raise ExhaustedRetries("No admissible projection direction for %d points in %d draws" %
                           (len(points), MAX_DIRECTION_DRAWS))


class HermiteSpec(object):
    """
    One dimensional Hermite null-interpolation problem: ``psi^(k)(t_i) = 0`` for k <= r_F at interior abscissae,
    ``psi^(k)(s_j) = 0`` for k <= r_B at boundary abscissae, ``psi(q_m) = 0`` at data abscissae and
    ``psi(t_0) = anchor_value``.
    """
    def __init__(self, interior, boundary, r_F, r_B, anchor, anchor_value=1.0, data=None):
        if r_F < 0 or r_B < 0:
            raise InputError("Derivative orders must be nonnegative, got r_F=%d r_B=%d" % (r_F, r_B))
        self.interior     = np.asarray(interior, dtype=np.float64).reshape(-1)
        self.boundary     = np.asarray(boundary, dtype=np.float64).reshape(-1)
        self.data         = np.zeros(0) if data is None else np.asarray(data, dtype=np.float64).reshape(-1)
        self.r_F          = int(r_F)
        self.r_B          = int(r_B)
        self.anchor       = float(anchor)
        self.anchor_value = float(anchor_value)

        abscissae = self.abscissae
        if np.unique(abscissae).size != abscissae.size:
            raise DuplicateAbscissa("Projected abscissae (anchor included) are not pairwise distinct")

    @property
    def abscissae(self):
        return np.concatenate([self.interior, self.boundary, self.data, [self.anchor]])

    @property
    def groups(self):
        """
        (abscissa, number of conditions) for every abscissa, the anchor last.
        """
        return ([(t, self.r_F + 1) for t in self.interior] + [(s, self.r_B + 1) for s in self.boundary] +
                [(q, 1) for q in self.data] + [(self.anchor, 1)])

    @property
    def conditions(self):
        """
        (abscissa, derivative order) of every vanishing condition.
        """
        conditions = []
        for t in self.interior:
            conditions.extend((t, k) for k in range(self.r_F + 1))
        for s in self.boundary:
            conditions.extend((s, k) for k in range(self.r_B + 1))
        conditions.extend((q, 0) for q in self.data)
        return conditions

    @property
    def num_conditions(self):
        """l, the number of vanishing conditions."""
        return len(self.interior)*(self.r_F + 1) + len(self.boundary)*(self.r_B + 1) + len(self.data)

    @property
    def num_units(self):
        return self.num_conditions + 1

    @property
    def max_order(self):
        orders = [0]
        if len(self.interior):
            orders.append(self.r_F)
        if len(self.boundary):
            orders.append(self.r_B)
        return max(orders)


def choose_shift(activation, max_order, candidates=SHIFT_CANDIDATES):
    """
    First candidate shift *a* with ``|sigma^(k)(a)| >= SHIFT_DERIVATIVE_FLOOR`` for all k <= *max_order*.
    """
    for a in candidates:
        values = [abs(float(activation.derivative(np.array([a]), k)[0])) for k in range(max_order + 1)]
        if min(values) >= SHIFT_DERIVATIVE_FLOOR:
            return a
    raise WrongActivation("%s has a vanishing derivative of order <= %d at every shift in %s" %
                          (activation.name, max_order, str(candidates)))


def _centered_units(spec, shift, rng):
    w = np.sort(rng.uniform(0.1, 1.0, spec.num_units))
    return w, shift - w*np.mean(spec.abscissae)


def _local_units(spec, shift, rng):
    # each abscissa gets as many units as it has conditions, steep on the scale of its nearest neighbor
    abscissae = spec.abscissae
    w         = []
    centers   = []
    for tau, count in spec.groups:
        distance = np.abs(abscissae - tau)
        distance = distance[distance > 0.0]
        gap      = float(distance.min()) if distance.size else 1.0
        for unit in range(count):
            centers.append(tau + gap*rng.uniform(-0.25, 0.25))
            w.append(rng.uniform(0.5, 1.5)/gap)
    w = np.array(w)
    return w, shift - w*np.array(centers)


def _hermite_system(spec, activation, w, beta):
    rows = [w**k*activation.derivative(w*tau + beta, k) for tau, k in spec.conditions]
    rows.append(activation.derivative(w*spec.anchor + beta, 0))
    rhs      = np.zeros(len(rows))
    rhs[-1]  = spec.anchor_value
    return np.array(rows), rhs


def build_hermite_1d(spec, activation, shift=None, seed=0):
    """
    One hidden layer network ``psi(t) = sum_j c_j sigma(w_j t + beta_j)`` with ``l + 1`` units solving *spec*.

    Inner weights are sampled, the output coefficients come from the square linear system of the conditions.
    The first attempts keep all arguments near *shift*; later ones give every abscissa its own steep units.

    :param shift: activation argument with nonvanishing derivatives; searched with :py:func:`choose_shift` if None
    :raises:      :py:class:`pinnlab.Error.IllConditioned` when no attempt gives an acceptable system
    """
    if not isinstance(activation, Activation):
        activation = Activation.from_tag(activation)
    if shift is None:
        shift = choose_shift(activation, spec.max_order)
    rng = np.random.default_rng(seed)
    m   = spec.num_units

    for attempt in range(HERMITE_RETRIES + 1):
        sampler = _centered_units if attempt < CENTERED_ATTEMPTS else _local_units
        w, beta = sampler(spec, shift, rng)
        A, rhs  = _hermite_system(spec, activation, w, beta)

        scale   = np.max(np.abs(A), axis=1)
        scale[scale == 0.0] = 1.0
        A_s     = A/scale[:, None]
        rhs_s   = rhs/scale
        cond    = np.linalg.cond(A_s)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            PinnLabLogger.debug("Hermite attempt %d (%s): condition %.3e rejected" % (attempt, sampler.__name__, cond))
            continue

        try:
            coef  = scipy.linalg.solve(A_s, rhs_s)
            coef += scipy.linalg.solve(A_s, rhs_s - A_s.dot(coef))
        except (scipy.linalg.LinAlgError, ValueError) as e:
            PinnLabLogger.debug("Hermite attempt %d: %s" % (attempt, str(e)))
            continue
        residual = float(np.max(np.abs(A_s.dot(coef) - rhs_s)))
        if residual > HERMITE_SOLVE_TOLERANCE:
            PinnLabLogger.debug("Hermite attempt %d: residual %.3e rejected" % (attempt, residual))
            continue

        PinnLabLogger.debug("Hermite interpolant with %d units, shift %g, condition %.3e, residual %.3e (attempt %d)" %
                            (m, shift, cond, residual, attempt))
        return Network((1, m, 1), [w.reshape(-1, 1), coef.reshape(1, -1)], [beta, np.zeros(1)], activation, seed)

    raise IllConditioned("Hermite system with %d conditions stayed ill-conditioned after %d retries" %
                         (spec.num_conditions, HERMITE_RETRIES))


def hermite_derivative(psi, t, order):
    """
    ``psi^(order)`` of a one hidden layer, one dimensional network, evaluated directly at the abscissae *t*.
    """
    w    = psi.weights[0][:, 0]
    beta = psi.biases[0]
    coef = psi.weights[1][0]
    t    = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out  = (w**order*psi.activation.derivative(np.outer(t, w) + beta, order)).dot(coef)
    if order == 0:
        out = out + psi.biases[1][0]
    return out


def hermite_residuals(psi, spec):
    """
    (abscissa, order, |psi^(order)(abscissa)|) for every condition of *spec*, and the anchor value reached.
    """
    residuals = [(float(tau), k, float(abs(hermite_derivative(psi, tau, k)[0]))) for tau, k in spec.conditions]
    return residuals, float(hermite_derivative(psi, spec.anchor, 0)[0])


class WitnessNetwork(object):
    """
    A network Phi with the certificate of the conditions it was built for.

    ``certified_conditions`` holds one dict per (point, derivative order) with the largest absolute
    derivative entry of that order; ``anchor`` holds the point z_0, the requested value v and ``Phi(z_0)``.
    """
    def __init__(self, net, certified_conditions, anchor, tolerance, kind, domain_points=None, details=None):
        self.net                  = net
        self.certified_conditions = certified_conditions
        self.anchor               = anchor
        self.tolerance            = tolerance
        #: "smooth" or "relu"
        self.kind                 = kind
        #: the points the witness vanishes on, used to place off-collocation samples
        self.domain_points        = domain_points
        self.details              = {} if details is None else details

    def __repr__(self):
        return "WitnessNetwork(%s, %s, conditions=%d, max_residual=%.3e)" % (self.kind, str(self.net),
                                                                             len(self.certified_conditions), self.max_residual)

    def eval(self, z):
        return self.net.eval(z)

    @property
    def max_residual(self):
        if len(self.certified_conditions) == 0:
            return 0.0
        return max(c["residual"] for c in self.certified_conditions)

    @property
    def anchor_error(self):
        return float(np.max(np.abs(np.asarray(self.anchor["achieved"]) - np.asarray(self.anchor["value"]))))

    @property
    def certified(self):
        scale = 1.0 + float(np.max(np.abs(self.anchor["value"])))
        return self.max_residual <= self.tolerance and self.anchor_error <= self.tolerance*scale

    def to_report(self, include_conditions=True):
        report = {"kind":            self.kind,
                  "widths":          list(self.net.widths),
                  "depth":           self.net.depth,
                  "num_parameters":  self.net.num_parameters,
                  "activation":      self.net.activation.name,
                  "tolerance":       self.tolerance,
                  "num_conditions":  len(self.certified_conditions),
                  "max_residual":    self.max_residual,
                  "anchor":          {"point":    list(self.anchor["point"]),
                                      "value":    list(self.anchor["value"]),
                                      "achieved": list(self.anchor["achieved"])},
                  "anchor_error":    self.anchor_error,
                  "certified":       self.certified}
        report.update(self.details)
        if include_conditions:
            report["conditions"] = self.certified_conditions
        return report


def _collocation_groups(colloc, r_F, r_B):
    return [(CollocationSet.CLASS_INTERIOR, colloc.interior,    r_F),
            (CollocationSet.CLASS_BOUNDARY, colloc.boundary,    r_B),
            (CollocationSet.CLASS_DATA,     colloc.data_points, 0)]


def _certify_conditions(net, colloc, r_F, r_B):
    """
    Jets of *net* at the collocation points; one entry per point and derivative order.
    """
    conditions = []
    for label, points, order in _collocation_groups(colloc, r_F, r_B):
        if len(points) == 0:
            continue
        jet    = net.forward(points, order=order).numpy()
        fields = [jet.value, jet.grad, jet.hess][:order + 1]
        for k, field in enumerate(fields):
            residual = np.max(np.abs(field.reshape(len(points), -1)), axis=1)
            for i in range(len(points)):
                conditions.append({"set":      label,
                                   "point":    points[i].tolist(),
                                   "order":    k,
                                   "residual": float(residual[i])})
    return conditions


def _anchor_inputs(colloc, z0, v):
    z0 = np.asarray(z0, dtype=np.float64).reshape(-1)
    v  = np.atleast_1d(np.asarray(v, dtype=np.float64)).reshape(-1)
    if z0.size != colloc.dim:
        raise DimensionMismatch("Anchor has %d coordinates for %d dimensional collocation points" % (z0.size, colloc.dim))
    if not np.any(v):
        raise InputError("Witness anchor value must be nonzero")
    return z0, v


def _all_points(colloc):
    return np.vstack([colloc.interior, colloc.boundary, colloc.data_points])


def witness_parameter_count(d, d1, L, c):
    """
    Parameter count of the smooth witness architecture with first layer width *d1*:
    ``d1 (d + 1 + c) + c`` for L = 2 and ``d1 (d + 3) + 6 L + 3 c - 18`` for L >= 3.
    """
    if L < 2:
        raise InvalidArchitecture("Witness depth must be at least 2, got %d" % L)
    if L == 2:
        return d1*(d + 1 + c) + c
    return d1*(d + 3) + 6*L + 3*c - 18


def _lift_ridge(psi, direction, v, L):
    """
    ``z -> lambda v g^(L-2)(psi(direction . z))`` with ``g(t) = sigma(t) - sigma(0)`` as a depth L network.
    The inner scale of g is fixed at 1, i.e. each extra layer is a width-1 unit with weight 1, so lambda is
    ``1/g^(L-2)(1)``.  The ``-sigma(0)`` of each g is folded into the following bias.
    """
    act  = psi.activation
    w    = psi.weights[0][:, 0]
    beta = psi.biases[0]
    coef = psi.weights[1][0]
    d    = direction.size
    c    = v.size
    m    = w.size
    W1   = np.outer(w, direction)

    if L == 2:
        return Network((d, m, c), [W1, np.outer(v, coef)], [beta, v*psi.biases[1][0]], act), 1.0

    s0     = float(act(np.zeros(1))[0])
    anchor = 1.0
    for _ in range(L - 2):
        anchor = float(act(np.array([anchor]))[0]) - s0
    if anchor == 0.0:
        raise WrongActivation("g composed %d times vanishes at 1 for %s" % (L - 2, act.name))
    lam = 1.0/anchor

    weights = [W1, coef.reshape(1, -1)]
    biases  = [beta, psi.biases[1].copy()]
    for _ in range(L - 3):
        weights.append(np.ones((1, 1)))
        biases.append(np.full(1, -s0))
    weights.append(lam*v.reshape(-1, 1))
    biases.append(-lam*s0*v)

    widths = [d, m] + [1]*(L - 2) + [c]
    return Network(widths, weights, biases, act), lam


def build_null_witness_smooth(colloc, r_F, r_B, z0, v, L, activation, seed=0):
    """
    Smooth witness of depth *L*: Phi and its input derivatives up to r_F (interior), r_B (boundary) and 0 (data)
    vanish at the collocation points, and ``Phi(z0) = v``.

    :raises: :py:class:`pinnlab.Error.WrongActivation` for L > 2 with an activation that isn't strictly monotone
    """
    if not isinstance(activation, Activation):
        activation = Activation.from_tag(activation)
    if L < 2:
        raise InvalidArchitecture("Witness depth must be at least 2, got %d" % L)
    if L > 2 and not activation.strictly_monotone:
        raise WrongActivation("Depth %d witnesses need a strictly monotone activation, got %s" % (L, activation.name))
    if max(r_F, r_B) > 2:
        raise InputError("Jet certification covers derivative orders up to 2, requested r_F=%d r_B=%d" % (r_F, r_B))
    z0, v = _anchor_inputs(colloc, z0, v)

    points = _all_points(colloc)
    if len(points) and np.any(np.all(points == z0, axis=1)):
        raise DuplicateAbscissa("Witness anchor %s is a collocation point" % str(z0))

    direction, gap = choose_projection_direction(np.vstack([points, z0]), seed)
    spec = HermiteSpec(colloc.interior.dot(direction), colloc.boundary.dot(direction), r_F, r_B,
                       z0.dot(direction), 1.0, colloc.data_points.dot(direction))
    shift = choose_shift(activation, spec.max_order)
    psi   = build_hermite_1d(spec, activation, shift, seed)
    net, lam = _lift_ridge(psi, direction, v, L)

    conditions = _certify_conditions(net, colloc, r_F, r_B)
    achieved   = net.eval(z0)
    witness    = WitnessNetwork(net, conditions,
                                {"point": z0.tolist(), "value": v.tolist(), "achieved": achieved.tolist()},
                                SMOOTH_TOLERANCE, "smooth", points,
                                {"direction":            direction.tolist(),
                                 "projection_gap":       gap,
                                 "shift":                shift,
                                 "normalization":        lam,
                                 "hermite_units":        spec.num_units,
                                 "formula_parameters":   witness_parameter_count(colloc.dim, spec.num_units, L, v.size)})
    PinnLabLogger.info("Built %s" % str(witness))
    return witness


def _tent_argument(z0, epsilon, norm):
    """
    ReLU network with linear output ``s(z) = 1 - |z - z0|/epsilon``, the norm being linf (pairwise max tree) or l1.
    """
    d  = z0.size
    W1 = np.zeros((2*d, d))
    b1 = np.zeros(2*d)
    for i in range(d):
        W1[2*i,     i] =  1.0
        W1[2*i + 1, i] = -1.0
        b1[2*i]        = -z0[i]
        b1[2*i + 1]    =  z0[i]
    widths  = [d, 2*d]
    weights = [W1]
    biases  = [b1]

    # rows: current values as linear maps of the last hidden layer; |t_i| = ReLU(t_i) + ReLU(-t_i)
    combo = np.zeros((d, 2*d))
    for i in range(d):
        combo[i, 2*i:2*i + 2] = 1.0

    if norm == "l1":
        combo = combo.sum(axis=0, keepdims=True)
    elif norm != "linf":
        raise InputError("Unknown tent norm [%s], expected linf or l1" % norm)

    # max(a, b) = b + ReLU(a - b) for a, b >= 0, where b = ReLU(b)
    while combo.shape[0] > 1:
        units   = []
        members = []
        for p in range(0, combo.shape[0] - 1, 2):
            units.append(combo[p] - combo[p + 1])
            units.append(combo[p + 1])
            members.append([len(units) - 2, len(units) - 1])
        if combo.shape[0] % 2:
            units.append(combo[-1])
            members.append([len(units) - 1])
        weights.append(np.array(units))
        biases.append(np.zeros(len(units)))
        widths.append(len(units))
        combo = np.zeros((len(members), len(units)))
        for row, idx in enumerate(members):
            combo[row, idx] = 1.0

    weights.append(-combo/epsilon)
    biases.append(np.ones(1))
    widths.append(1)
    return Network(widths, weights, biases, ReLU())


def tent_depth_bound(d):
    """Depth bound ``ceil(log2(d + 1)) + 1`` for ReLU networks supported in a ball."""
    return int(math.ceil(math.log2(d + 1))) + 1


def build_null_witness_relu(colloc, z0, v, epsilon, L_target=None, norm="linf"):
    """
    ReLU witness ``Phi(z) = v ReLU(1 - |z - z0|/epsilon)``, zero outside the epsilon ball around z0 and deepened
    to *L_target* with identity layers.  Every collocation point lies outside the closed ball, so Phi vanishes
    on a neighborhood of each one and all of its jets there are exactly zero.

    :raises: :py:class:`pinnlab.Error.BallIntersectsCollocation`
    """
    if epsilon <= 0.0:
        raise InputError("Tent radius must be positive, got %g" % epsilon)
    z0, v  = _anchor_inputs(colloc, z0, v)
    points = _all_points(colloc)
    if len(points):
        offsets  = np.abs(points - z0)
        distance = offsets.max(axis=1) if norm == "linf" else offsets.sum(axis=1)
        closest  = int(np.argmin(distance))
        if distance[closest] <= epsilon:
            raise BallIntersectsCollocation("Collocation point %s is within %g of the tent center %s" %
                                            (str(points[closest]), epsilon, str(z0)))

    s_net     = _tent_argument(z0, epsilon, norm)
    min_depth = s_net.depth + 1
    if L_target is None:
        L_target = min_depth
    if L_target < min_depth:
        raise InvalidArchitecture("Tent network needs depth %d, requested %d" % (min_depth, L_target))

    # the linear output s becomes the hidden unit ReLU(s); Phi is exactly 0 wherever s < 0
    deep = deepen_relu_identity(s_net, L_target - 1)
    net  = Network(list(deep.widths) + [v.size], deep.weights + [v.reshape(-1, 1)], deep.biases + [np.zeros(v.size)], ReLU())

    conditions = _certify_conditions(net, colloc, 2, 2)
    achieved   = net.eval(z0)
    witness  = WitnessNetwork(net, conditions,
                              {"point": z0.tolist(), "value": v.tolist(), "achieved": achieved.tolist()},
                              0.0, "relu", points,
                              {"epsilon":          float(epsilon),
                               "norm":             norm,
                               "tent_depth":       min_depth,
                               "depth_bound":      tent_depth_bound(colloc.dim)})
    PinnLabLogger.info("Built %s" % str(witness))
    return witness


def _ridge_relu(tau, targets):
    # units ReLU(t - kappa_j): kappa_1 below every abscissa, then midpoints; the system is lower triangular
    knots    = np.empty(tau.size)
    knots[0] = tau[0] - 1.0
    knots[1:] = 0.5*(tau[1:] + tau[:-1])
    A    = np.maximum(tau[:, None] - knots[None, :], 0.0)
    coef = scipy.linalg.solve_triangular(A, targets, lower=True)
    return np.ones(tau.size), knots, coef, 1.0


def _ridge_smooth(tau, targets, activation):
    # steep steps sigma(w_j (t - kappa_j)) at the midpoints, the first one below every abscissa
    gaps      = np.diff(tau)
    first_gap = gaps[0] if gaps.size else 1.0
    knots     = np.empty(tau.size)
    knots[0]  = tau[0] - first_gap
    knots[1:] = 0.5*(tau[1:] + tau[:-1])
    slopes    = STEP_SHARPNESS/np.concatenate([[first_gap], gaps])
    A    = activation(slopes[None, :]*(tau[:, None] - knots[None, :]))
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        return None
    coef = scipy.linalg.solve(A, targets)
    return slopes, knots, coef, cond


def interpolate_values(points, targets, activation, seed=0):
    """
    One hidden layer network with one unit per point reproducing *targets* at *points*.

    All units share a ridge direction from :py:func:`choose_projection_direction` and the output weights come
    from a linear solve: lower triangular for ReLU, a steep step basis for smooth activations.

    :param targets: (P,) or (P, c)
    :raises:        :py:class:`pinnlab.Error.IllConditioned` if no direction reaches the residual tolerance
    """
    if not isinstance(activation, Activation):
        activation = Activation.from_tag(activation)
    points  = np.atleast_2d(np.asarray(points, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64).reshape(len(points), -1)
    num_points, d = points.shape
    if len(set(map(tuple, points.tolist()))) != num_points:
        raise DuplicateAbscissa("Interpolation points are not pairwise distinct")

    draws      = 1 if d == 1 else INTERPOLATION_DIRECTION_DRAWS
    candidates = sorted([choose_projection_direction(points, seed + draw) for draw in range(draws)],
                        key=lambda candidate: -candidate[1])
    tolerance  = INTERPOLATION_TOLERANCE*max(1.0, float(np.max(np.abs(targets))))

    for direction, gap in candidates:
        tau   = points.dot(direction)
        order = np.argsort(tau)
        tau   = tau[order]
        if isinstance(activation, ReLU):
            built = _ridge_relu(tau, targets[order])
        else:
            built = _ridge_smooth(tau, targets[order], activation)
        if built is None:
            PinnLabLogger.debug("Interpolation along gap %.3e rejected on conditioning" % gap)
            continue
        slopes, knots, coef, cond = built

        net = Network((d, num_points, targets.shape[1]),
                      [np.outer(slopes, direction), coef.T],
                      [-slopes*knots, np.zeros(targets.shape[1])], activation)
        residual = float(np.max(np.abs(net.eval(points) - targets)))
        if residual <= tolerance:
            PinnLabLogger.debug("Interpolated %d points, gap %.3e, condition %.3e, residual %.3e" %
                                (num_points, gap, cond, residual))
            return net
        PinnLabLogger.debug("Interpolation along gap %.3e rejected, residual %.3e" % (gap, residual))

    raise IllConditioned("No ridge direction interpolates %d points to %.1e" % (num_points, tolerance))


def _loss_total(out):
    return float(getattr(out, "total", out))


def _combine(u_hat, witness, lam):
    if isinstance(u_hat, ConstrainedNetwork):
        return ConstrainedNetwork(linear_combine(u_hat.base, witness, 1.0, lam), u_hat.constraint)
    return linear_combine(u_hat, witness, 1.0, lam)


def sample_points(Phi, num_samples=1000, seed=0):
    """
    Uniform samples in the bounding box of the witness' collocation points and anchor, plus the anchor itself.
    """
    anchor = np.asarray(Phi.anchor["point"], dtype=np.float64)
    cloud  = np.vstack([Phi.domain_points, anchor]) if Phi.domain_points is not None and len(Phi.domain_points) else anchor[None, :]
    rng    = np.random.default_rng(seed)
    samples = rng.uniform(cloud.min(axis=0), cloud.max(axis=0), size=(num_samples, anchor.size))
    return np.vstack([samples, anchor])


def certify_nonuniqueness(u_hat, Phi, loss_evaluator, lambdas, samples=None, nu=2):
    """
    Loss of ``u_hat + lambda Phi`` for every lambda against the lambda = 0 member of the same family, and the
    size of ``lambda Phi`` away from the collocation points.

    The reference is ``linear_combine(u_hat, Phi, 1, 0)`` rather than *u_hat* itself so both sides go through
    identical floating point operations; the loss of *u_hat* is reported beside it.

    :param loss_evaluator: callable taking a network and returning a float or a loss breakdown
    :param samples:        off-collocation points; :py:func:`sample_points` of *Phi* if None
    :returns:              report dict
    """
    witness = getattr(Phi, "net", Phi)
    if samples is None:
        if not isinstance(Phi, WitnessNetwork):
            raise InputError("Off-collocation samples are needed for a plain witness network")
        samples = sample_points(Phi)
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))

    reference        = _combine(u_hat, witness, 0.0)
    base_loss        = _loss_total(loss_evaluator(reference))
    unextended_loss  = _loss_total(loss_evaluator(u_hat))
    reference_values = reference.eval(samples)
    unit_sup         = float(np.max(np.abs(witness.eval(samples))))

    sweep = []
    for lam in lambdas:
        net   = _combine(u_hat, witness, float(lam))
        loss  = _loss_total(loss_evaluator(net))
        diff  = abs(loss - base_loss)
        if base_loss != 0.0:
            rel = diff/abs(base_loss)
        else:
            rel = 0.0 if diff == 0.0 else float("inf")
        delta = net.eval(samples) - reference_values
        sup   = float(np.max(np.abs(delta)))
        sweep.append({"lambda":          float(lam),
                      "loss":            loss,
                      "abs_difference":  diff,
                      "rel_difference":  rel,
                      "sup_norm":        sup,
                      "lnu_norm":        float(np.mean(np.sum(np.abs(delta)**nu, axis=1))**(1.0/nu)),
                      "growth":          sup/unit_sup if unit_sup > 0.0 else float("nan")})
        PinnLabLogger.debug("lambda %g: loss %.17g, difference %.3e, sup %.6e" % (lam, loss, diff, sup))

    report = {"base_loss":          base_loss,
              "unextended_loss":    unextended_loss,
              "witness_sup":        unit_sup,
              "num_samples":        len(samples),
              "nu":                 nu,
              "sweep":              sweep,
              "max_abs_difference": max([row["abs_difference"] for row in sweep] + [0.0]),
              "max_rel_difference": max([row["rel_difference"] for row in sweep] + [0.0])}
    PinnLabLogger.info("Non-uniqueness sweep over %d lambdas: max abs difference %.3e, max rel difference %.3e" %
                       (len(sweep), report["max_abs_difference"], report["max_rel_difference"]))
    return report


class Example32Minimizers(object):
    """
    Two distinct one hidden layer ReLU minimizers ``sigma(w1 z + u0) + sigma(w2 z - b)`` of the AD-PINN loss of
    ``u' = a`` on (0, T), ``u(0) = u0``, differing only in the offset b.
    """
    def __init__(self, a, u0, points, offsets, networks, losses):
        self.a        = a
        self.u0       = u0
        self.points   = points
        self.offsets  = offsets
        self.networks = networks
        self.losses   = losses

    def difference(self, z):
        """Absolute difference of the two minimizers at *z*."""
        z = np.asarray(z, dtype=np.float64).reshape(-1, 1)
        return np.abs(self.networks[0].eval(z) - self.networks[1].eval(z)).reshape(-1)

    def to_report(self):
        midpoint = float(self.points[len(self.points)//2])
        return {"a":          self.a,
                "u0":         self.u0,
                "points":     self.points.tolist(),
                "offsets":    list(self.offsets),
                "losses":     [loss.values() for loss in self.losses],
                "probe":      midpoint,
                "values":     [float(net.eval(np.array([midpoint]))[0]) for net in self.networks],
                "difference": float(self.difference(midpoint)[0])}


def example32_minimizers(a, u0, z):
    """
    Builds the two minimizers with ``w1 = w2 = a/2`` and offsets ``b = 0`` and ``b = z_1 w2 / 2`` and evaluates
    their AD-PINN losses.

    :raises: :py:class:`pinnlab.Error.InvalidRegime` unless a > 0, u0 >= 0 and z is increasing and positive
    """
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if a <= 0.0 or u0 < 0.0:
        raise InvalidRegime("Needs a > 0 and u0 >= 0, got a=%g u0=%g" % (a, u0))
    if z.size == 0 or z[0] <= 0.0 or np.any(np.diff(z) <= 0.0):
        raise InvalidRegime("Collocation points must be positive and strictly increasing")

    w1 = w2 = 0.5*a
    offsets = [0.0, 0.5*z[0]*w2]

    slope    = ResidualForm(lambda points, jet: jet.grad[:, :, 0] - a, order=1, name="slope")
    initial  = ResidualForm(lambda points, jet: jet.value - u0, order=0, name="initial_value")
    colloc   = CollocationSet(z.reshape(-1, 1), np.zeros((1, 1)))
    weights  = LossWeights()

    networks = []
    losses   = []
    for b in offsets:
        net = Network((1, 2, 1), [[[w1], [w2]], [[1.0, 1.0]]], [[u0, -b], [0.0]], ReLU())
        networks.append(net)
        losses.append(adpinn_loss(net, colloc, slope, initial, weights))
        PinnLabLogger.debug("Offset %g: %s" % (b, str(losses[-1])))
    return Example32Minimizers(a, u0, z, offsets, networks, losses)
