"""
Loss functionals: the AD-PINN loss with exact input derivatives, the FD-PINN loss built on stencil
residuals of network values, the plain finite-difference loss on grid vectors, and the ridge penalty.

Each loss comes in two forms: ``*_loss`` evaluates a model and returns a :py:class:`LossBreakdown`
of floats, ``*_objective`` returns a callable for :py:func:`pinnlab.AutoDiff.parameter_gradient`
and :py:func:`pinnlab.Optimize.train`.
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

from .AutoDiff import Jet2, ModelView, Variable, value_of
from .Error    import DimensionMismatch, InputError, StencilOutOfRange, UnsupportedExponent


class LossWeights(object):
    """
    Weights of the loss terms, the norm exponent nu and the ridge parameters.
    """
    #: Supported norm exponents
    NU_OPTIONS  = [1, 2]
    #: Supported ridge exponents
    Q_OPTIONS   = [1, 2]

    def __init__(self, alpha_F=1.0, alpha_B=1.0, alpha_D=1.0, nu=2, alpha_theta=0.0, q=2):
        for label, val in [("alpha_F", alpha_F), ("alpha_B", alpha_B), ("alpha_D", alpha_D), ("alpha_theta", alpha_theta)]:
            if val < 0:
                raise InputError("Loss weight %s must be nonnegative, got %g" % (label, val))
        if nu not in LossWeights.NU_OPTIONS:
            raise UnsupportedExponent("Norm exponent nu must be one of %s, got %s" % (str(LossWeights.NU_OPTIONS), str(nu)))
        self.alpha_F     = float(alpha_F)
        self.alpha_B     = float(alpha_B)
        self.alpha_D     = float(alpha_D)
        self.nu          = int(nu)
        self.alpha_theta = float(alpha_theta)
        self.q           = q

    def __repr__(self):
        return "LossWeights(alpha_F=%g, alpha_B=%g, alpha_D=%g, nu=%d, alpha_theta=%g, q=%s)" % \
            (self.alpha_F, self.alpha_B, self.alpha_D, self.nu, self.alpha_theta, str(self.q))


class LossBreakdown(object):
    """
    A loss value and its terms.  Terms are floats, or Variables while differentiating.
    ``total`` is always the plain sum of the terms.
    """
    #: Term names, in summation order
    TERMS = ["pde_term", "boundary_term", "data_term", "divergence_term", "ridge_term"]

    def __init__(self, pde_term=0.0, boundary_term=0.0, data_term=0.0, ridge_term=0.0, divergence_term=0.0):
        self.pde_term        = pde_term
        self.boundary_term   = boundary_term
        self.data_term       = data_term
        self.divergence_term = divergence_term
        self.ridge_term      = ridge_term
        total = 0.0
        for term in LossBreakdown.TERMS:
            total = total + getattr(self, term)
        self.total           = total

    def values(self):
        """
        Dictionary of term name -> float, including ``total``.
        """
        vals = dict((term, float(value_of(getattr(self, term)))) for term in LossBreakdown.TERMS)
        vals["total"] = float(value_of(self.total))
        return vals

    def to_row(self, iteration):
        """
        Row for the training log / JSON output.
        """
        row = {"iteration": int(iteration)}
        row.update(self.values())
        return row

    def __repr__(self):
        vals = self.values()
        return "LossBreakdown(total=%.6e, %s)" % (vals["total"], ", ".join("%s=%.6e" % (t, vals[t]) for t in LossBreakdown.TERMS))


class ResidualForm(object):
    """
    Pointwise residual operator for the AD-PINN loss.

    :param func:  callable ``(points, jet) -> (P, c)`` residual; *jet* is batched over the points
    :param order:   jet order the residual needs (0: values only, so it never trips on ReLU kinks)
    :param name:    label for logs and reports
    :param partner: optional callable mapping the points to partner points (e.g. across a periodic boundary);
                    *func* then receives the partner jet as a third argument
    """
    def __init__(self, func, order=2, name=None, partner=None):
        self.func    = func
        self.order   = order
        self.name    = name if name else getattr(func, "__name__", "residual")
        self.partner = partner

    def __call__(self, points, jet, partner_jet=None):
        if self.partner is None:
            return self.func(points, jet)
        return self.func(points, jet, partner_jet)

    def __repr__(self):
        return "ResidualForm(%s, order=%d)" % (self.name, self.order)


def dirichlet_residual(points, jet):
    """
    ``u(z)``: residual of a homogeneous Dirichlet condition.
    """
    return jet.value

#: Homogeneous Dirichlet boundary residual, values only
DIRICHLET = ResidualForm(dirichlet_residual, order=0, name="dirichlet")


def _pointwise_power(residual, nu):
    """
    Per point sum over components of ``|r|^nu``.
    """
    if nu == 2:
        return (residual*residual).sum(axis=1)
    return abs(residual).sum(axis=1)


def _weighted_term(alpha, weights, residual, nu):
    return alpha*(weights*_pointwise_power(residual, nu)).sum()


def _model_jet(view, points, order):
    if order == 0:
        return Jet2(view.eval(points), order=0)
    return view.jet(points, order)


def _residual_values(view, points, form):
    jet = _model_jet(view, points, form.order)
    if form.partner is None:
        return form(points, jet)
    return form(points, jet, _model_jet(view, form.partner(points), form.order))


def adpinn_terms(view, colloc, F_res, B_res, w):
    """
    AD-PINN loss of the model behind *view* as a :py:class:`LossBreakdown` (Variables if *view* holds them).
    """
    pde_term      = 0.0
    boundary_term = 0.0
    data_term     = 0.0
    if w.alpha_F > 0 and colloc.num_interior > 0 and F_res is not None:
        residual = _residual_values(view, colloc.interior, F_res)
        pde_term = _weighted_term(w.alpha_F, colloc.interior_weights, residual, w.nu)
    if w.alpha_B > 0 and colloc.num_boundary > 0 and B_res is not None:
        residual = _residual_values(view, colloc.boundary, B_res)
        boundary_term = _weighted_term(w.alpha_B, colloc.boundary_weights, residual, w.nu)
    if w.alpha_D > 0 and colloc.num_data > 0:
        residual  = view.eval(colloc.data_points) - colloc.data_targets
        data_term = _weighted_term(w.alpha_D, colloc.data_weights, residual, w.nu)
    return LossBreakdown(pde_term, boundary_term, data_term)


def adpinn_objective(colloc, F_res, B_res, w):
    """
    Objective callable for the AD-PINN loss.
    """
    def objective(view):
        return adpinn_terms(view, colloc, F_res, B_res, w)
    return objective


def adpinn_loss(net, colloc, F_res, B_res, w):
    """
    AD-PINN loss: weighted sums of ``|F(u)(z)|^nu`` over interior points, ``|B(u)(z)|^nu`` over boundary
    points and ``|u(z) - u*(z)|^nu`` over data points, with input derivatives from exact jets.

    :param net:   network or constrained network
    :param F_res: :py:class:`ResidualForm` for interior points
    :param B_res: :py:class:`ResidualForm` for boundary points, or None
    :raises:      :py:class:`pinnlab.Error.KinkAtPoint` when a needed jet hits a ReLU kink
    """
    return _to_floats(adpinn_terms(ModelView(net), colloc, F_res, B_res, w))


def _to_floats(breakdown):
    vals = breakdown.values()
    return LossBreakdown(vals["pde_term"], vals["boundary_term"], vals["data_term"],
                         vals["ridge_term"], vals["divergence_term"])


class GridData(object):
    """
    Observations of grid values: node indices, targets (N_D, c) and weights (default uniform).
    """
    def __init__(self, indices, targets, weights=None):
        self.indices = np.asarray(indices, dtype=np.int64)
        self.targets = np.asarray(targets, dtype=np.float64).reshape(len(self.indices), -1)
        if weights is None:
            weights = np.full(len(self.indices), 1.0/len(self.indices)) if len(self.indices) else np.zeros(0)
        self.weights = np.asarray(weights, dtype=np.float64)


class DiscreteResidual(object):
    """
    Finite-difference residual operator on grid values.

    Subclasses hold the stencil node coordinates in :py:attr:`points` (one row per grid value, in the order
    the value vector uses) and implement :py:meth:`residuals`.  The residual rows correspond one to one with the
    collocation set the operator was built for, which supplies the quadrature weights.
    """
    def __init__(self, points, colloc, output_dim):
        #: stencil node coordinates, (num_nodes, d)
        self.points           = np.asarray(points, dtype=np.float64)
        #: number of channels of the grid values
        self.output_dim       = int(output_dim)
        self.interior_weights = colloc.interior_weights
        self.boundary_weights = colloc.boundary_weights
        self.num_interior     = colloc.num_interior
        self.num_boundary     = colloc.num_boundary
        self._node_lookup     = None

    @property
    def num_nodes(self):
        return len(self.points)

    def residuals(self, u):
        """
        :param u: grid values (num_nodes, output_dim), array or Variable
        :returns: (interior residuals (N_F, c_F), boundary residuals (N_B, c_B)); either may be None
        """
        raise NotImplementedError

    def check_collocation(self, colloc):
        """
        Raises :py:class:`pinnlab.Error.StencilOutOfRange` unless *colloc* is the set this operator's rows refer to.
        """
        if colloc.num_interior != self.num_interior or colloc.num_boundary != self.num_boundary:
            raise StencilOutOfRange("Discrete residual has %d interior / %d boundary rows, collocation set has %d / %d" %
                                    (self.num_interior, self.num_boundary, colloc.num_interior, colloc.num_boundary))

    def node_index(self, point):
        """
        Index of the stencil node with exactly these coordinates.
        """
        if self._node_lookup is None:
            self._node_lookup = dict((tuple(p), idx) for idx, p in enumerate(self.points.tolist()))
        key = tuple(float(c) for c in point)
        if key not in self._node_lookup:
            raise StencilOutOfRange("Point %s is not a stencil node" % str(key))
        return self._node_lookup[key]

    def data_from_collocation(self, colloc):
        """
        :py:class:`GridData` for the data points of *colloc*, or None if it has none.
        """
        if colloc.num_data == 0:
            return None
        indices = [self.node_index(p) for p in colloc.data_points]
        return GridData(indices, colloc.data_targets, colloc.data_weights)


def fd_terms(u, D_res, data, w):
    """
    Finite-difference loss terms on grid values *u* (array or Variable).
    """
    shape = value_of(u).shape
    if len(shape) != 2 or shape[0] != D_res.num_nodes or shape[1] != D_res.output_dim:
        raise DimensionMismatch("Grid values have shape %s, the stencil set needs (%d, %d)" %
                                (str(shape), D_res.num_nodes, D_res.output_dim))
    interior, boundary = D_res.residuals(u)
    pde_term      = 0.0
    boundary_term = 0.0
    data_term     = 0.0
    if w.alpha_F > 0 and interior is not None and D_res.num_interior > 0:
        pde_term = _weighted_term(w.alpha_F, D_res.interior_weights, interior, w.nu)
    if w.alpha_B > 0 and boundary is not None and D_res.num_boundary > 0:
        boundary_term = _weighted_term(w.alpha_B, D_res.boundary_weights, boundary, w.nu)
    if data is not None and w.alpha_D > 0 and len(data.indices) > 0:
        residual  = u[data.indices] - data.targets
        data_term = _weighted_term(w.alpha_D, data.weights, residual, w.nu)
    return LossBreakdown(pde_term, boundary_term, data_term)


def fd_loss(u, D_res, data, w):
    """
    Finite-difference loss of a raw grid vector (no network).

    :param u:     grid values, (num_nodes,) or (num_nodes, c)
    :param D_res: :py:class:`DiscreteResidual`
    :param data:  :py:class:`GridData` or None
    :raises:      :py:class:`pinnlab.Error.DimensionMismatch` if *u* does not match the stencil nodes
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim == 1:
        u = u.reshape(-1, 1)
    return _to_floats(fd_terms(u, D_res, data, w))


def fdpinn_objective(colloc, D_res, w):
    """
    Objective callable for the FD-PINN loss.
    """
    D_res.check_collocation(colloc)
    data = D_res.data_from_collocation(colloc)

    def objective(view):
        return fd_terms(view.eval(D_res.points), D_res, data, w)
    return objective


def fdpinn_loss(net, colloc, D_res, w):
    """
    FD-PINN loss: the finite-difference loss of the network sampled at the stencil nodes.
    Only network values enter, so ReLU networks are accepted anywhere.
    """
    return _to_floats(fdpinn_objective(colloc, D_res, w)(ModelView(net)))


def ridge_penalty(theta, w):
    """
    ``alpha_theta * |theta|_q`` for q in {1, 2}.

    :param theta: parameter vector, or a list of arrays / Variables
    """
    if w.q not in LossWeights.Q_OPTIONS:
        raise UnsupportedExponent("Ridge exponent q must be one of %s, got %s" % (str(LossWeights.Q_OPTIONS), str(w.q)))
    pieces = theta if isinstance(theta, (list, tuple)) else [np.asarray(theta, dtype=np.float64)]
    total  = 0.0
    if w.q == 2:
        for piece in pieces:
            total = total + (piece*piece).sum()
        norm = total**0.5
    else:
        for piece in pieces:
            total = total + abs(piece).sum()
        norm = total
    if isinstance(norm, Variable):
        return w.alpha_theta*norm
    return float(w.alpha_theta*norm)


def with_ridge(objective, w):
    """
    Wraps *objective* so its breakdown carries ``ridge_penalty`` of the network parameters.
    """
    if w.alpha_theta == 0:
        return objective

    def ridged(view):
        base = objective(view)
        if not isinstance(base, LossBreakdown):
            base = LossBreakdown(pde_term=base)
        return LossBreakdown(base.pde_term, base.boundary_term, base.data_term,
                             ridge_penalty(list(view.parameters()), w), base.divergence_term)
    return ridged


def evaluate_in_precision(net, objective, dtype, extra=None):
    """
    Evaluates *objective* with network parameters, points and extras cast to *dtype*
    (e.g. ``numpy.float32``), for reporting single-precision loss magnitudes.
    """
    params = [np.asarray(p).astype(dtype) for p in net.parameter_arrays()]
    extra  = None if extra is None else np.asarray(extra).astype(dtype)
    return _to_floats(objective(_CastView(net, params, extra, dtype)))


class _CastView(ModelView):

    def __init__(self, model, params, extra, dtype):
        ModelView.__init__(self, model, params, extra)
        self.dtype = dtype

    def eval(self, points):
        return ModelView.eval(self, np.asarray(points).astype(self.dtype))

    def jet(self, points, order=2):
        return ModelView.jet(self, np.asarray(points).astype(self.dtype), order)
