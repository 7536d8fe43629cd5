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
import scipy.linalg

from .Activation import Activation, ReLU
from .AutoDiff   import Jet2, activate, dense, eval_jet2, value_of
from .Error      import IncompatibleNetworks, InputError, InvalidArchitecture, KinkAtPoint, WrongActivation
from .Logger     import PinnLabLogger


class Network(object):
    """
    Fully connected feedforward network with an affine output layer.

    ``phi_0 = z``, ``phi_i = act(W_i phi_{i-1} + b_i)`` for hidden layers and ``W_L phi_{L-1} + b_L`` at the output.
    Instances are treated as immutable values; training produces new networks via
    :py:meth:`Network.with_parameters`.
    """
    #: Version number written into checkpoint files
    CHECKPOINT_VERSION  = 1

    def __init__(self, widths, weights, biases, activation, seed=None):
        """
        :param widths:     (d_0, ..., d_L)
        :param weights:    list of L arrays, ``W_i`` of shape (d_i, d_{i-1})
        :param biases:     list of L arrays, ``b_i`` of shape (d_i,)
        :param activation: an :py:class:`pinnlab.Activation.Activation` or its tag
        :param seed:       the initialization seed, if any; kept for checkpoints
        """
        widths = tuple(int(w) for w in widths)
        if len(widths) < 2:
            raise InvalidArchitecture("A network needs at least input and output widths, got %s" % str(widths))
        if min(widths) < 1:
            raise InvalidArchitecture("All widths must be at least 1, got %s" % str(widths))
        if len(weights) != len(widths) - 1 or len(biases) != len(widths) - 1:
            raise InvalidArchitecture("Expected %d weight matrices and bias vectors, got %d and %d" %
                                      (len(widths) - 1, len(weights), len(biases)))

        self.weights = []
        self.biases  = []
        for layer in range(1, len(widths)):
            W = np.array(weights[layer-1], dtype=np.float64)
            b = np.array(biases[layer-1],  dtype=np.float64).reshape(-1)
            if W.shape != (widths[layer], widths[layer-1]) or b.shape != (widths[layer],):
                raise InvalidArchitecture("Layer %d has W %s and b %s, expected (%d, %d) and (%d,)" %
                                          (layer, str(W.shape), str(b.shape), widths[layer], widths[layer-1], widths[layer]))
            self.weights.append(W)
            self.biases.append(b)

        if not isinstance(activation, Activation):
            activation = Activation.from_tag(activation)

        #: (d_0, ..., d_L)
        self.widths     = widths
        #: elementwise activation of the hidden layers
        self.activation = activation
        #: initialization seed, None if unknown
        self.seed       = seed

    def __repr__(self):
        return "Network(widths=%s, activation=%s, M=%d)" % (str(self.widths), self.activation.name, self.num_parameters)

    @property
    def depth(self):
        """Number of affine maps L."""
        return len(self.widths) - 1

    @property
    def input_dim(self):
        return self.widths[0]

    @property
    def output_dim(self):
        return self.widths[-1]

    @property
    def num_parameters(self):
        """M = sum over layers of d_i (d_{i-1} + 1)."""
        return sum(self.widths[i]*(self.widths[i-1] + 1) for i in range(1, len(self.widths)))

    @property
    def base(self):
        return self

    def parameter_arrays(self):
        """
        Parameters in flatten order: ``[W_1, b_1, ..., W_L, b_L]``.
        """
        arrays = []
        for W, b in zip(self.weights, self.biases):
            arrays.append(W)
            arrays.append(b)
        return arrays

    def flatten(self):
        """
        theta as one vector, layer-major, each weight matrix row-major before its bias.
        """
        return np.concatenate([p.ravel() for p in self.parameter_arrays()])

    def with_parameters(self, theta):
        """
        Returns a network of the same architecture holding the flattened parameters *theta*.
        """
        theta = np.asarray(theta, dtype=np.float64)
        if theta.size != self.num_parameters:
            raise InputError("Expected %d parameters, got %d" % (self.num_parameters, theta.size))
        weights = []
        biases  = []
        offset  = 0
        for layer in range(1, len(self.widths)):
            rows, cols = self.widths[layer], self.widths[layer-1]
            weights.append(theta[offset:offset + rows*cols].reshape(rows, cols))
            offset += rows*cols
            biases.append(theta[offset:offset + rows])
            offset += rows
        return Network(self.widths, weights, biases, self.activation, self.seed)

    def forward(self, points, order=0, params=None):
        """
        Propagates a batch of points, with input derivatives up to *order*.

        :param points: (P, d_0) array
        :param order:  0 for values only, 1 adds gradients, 2 adds Hessians
        :param params: parameter list in flatten order (arrays or Variables); this network's own if None
        :returns:      batched :py:class:`pinnlab.AutoDiff.Jet2`
        :raises:       :py:class:`pinnlab.Error.KinkAtPoint` if *order* >= 1 and a ReLU pre-activation is exactly 0
                       and that unit reaches the output, see :py:meth:`_raise_on_live_kinks`
        """
        points = np.atleast_2d(np.asarray(points))
        if points.dtype.kind != 'f':
            points = points.astype(np.float64)
        if points.shape[1] != self.input_dim:
            raise InputError("Network expects %d inputs, got points of shape %s" % (self.input_dim, str(points.shape)))
        if params is None:
            params = self.parameter_arrays()

        num_points = points.shape[0]
        d          = self.input_dim
        act        = self.activation

        value = points
        grad  = None
        hess  = None
        if order >= 1:
            # d(z)/dz with the direction axis before the neuron axis
            grad = np.broadcast_to(np.eye(d, dtype=points.dtype), (num_points, d, d))

        track_kinks = order >= 1 and act.has_kinks
        hidden_pre  = []
        kink_found  = False

        for layer in range(self.depth):
            W, b  = params[2*layer], params[2*layer + 1]
            pre_v = dense(value, W, b)
            pre_g = dense(grad, W) if grad is not None else None
            pre_h = dense(hess, W) if hess is not None else None

            if layer == self.depth - 1:
                value, grad, hess = pre_v, pre_g, pre_h
                break

            width = self.widths[layer + 1]
            if track_kinks:
                hidden_pre.append(value_of(pre_v))
                kink_found = kink_found or bool(np.any(hidden_pre[-1] == 0.0))

            value = activate(pre_v, act, 0)
            if order >= 1:
                s1   = activate(pre_v, act, 1)
                new_grad = s1.reshape(num_points, 1, width)*pre_g
                if order >= 2:
                    s2 = activate(pre_v, act, 2).reshape(num_points, 1, 1, width)
                    new_hess = s2*pre_g.reshape(num_points, d, 1, width)*pre_g.reshape(num_points, 1, d, width)
                    if pre_h is not None:
                        new_hess = new_hess + s1.reshape(num_points, 1, 1, width)*pre_h
                    hess = new_hess
                grad = new_grad

        if kink_found:
            self._raise_on_live_kinks(points, params, hidden_pre)

        c = self.output_dim
        if order == 0:
            return Jet2(value, order=0)
        out_grad = grad.transpose(0, 2, 1)
        out_hess = None
        if order >= 2:
            out_hess = np.zeros((num_points, c, d, d)) if hess is None else hess.transpose(0, 3, 1, 2)
        return Jet2(value, out_grad, out_hess, order=order)

    def _raise_on_live_kinks(self, points, params, hidden_pre):
        """
        Raises :py:class:`pinnlab.Error.KinkAtPoint` for the first point where a ReLU pre-activation is exactly 0
        and that unit feeds the output through units that are not locally constant.

        A unit is locally constant at a point if its pre-activation is strictly negative there, or if every
        input reaching it with a nonzero weight is locally constant.  A kink behind such a unit changes neither
        the value nor any derivative of the output, so its jet is exact whatever one-sided slope was used.
        """
        num_points = points.shape[0]
        flat       = np.zeros((num_points, self.input_dim), dtype=bool)
        live       = np.zeros((num_points, self.input_dim), dtype=bool)
        origin     = np.zeros(num_points, dtype=int)

        for layer in range(self.depth):
            support  = (value_of(params[2*layer]) != 0.0).T.astype(np.float64)
            pre_flat = (~flat).astype(np.float64).dot(support) == 0.0
            pre_live = live.astype(np.float64).dot(support) > 0.0
            if layer == self.depth - 1:
                bad = np.flatnonzero(pre_live.any(axis=1))
                if len(bad):
                    raise KinkAtPoint(int(origin[bad[0]]), points[bad[0]])
                return

            pre    = hidden_pre[layer]
            zero   = (pre == 0.0) & ~pre_flat
            flat   = pre_flat | (pre < 0.0)
            origin[(origin == 0) & (zero & ~flat).any(axis=1)] = layer + 1
            live   = (pre_live | zero) & ~flat

    def eval(self, z):
        """
        Forward pass value at *z*: shape (d_L,) for a single point, (P, d_L) for a batch.
        """
        z   = np.asarray(z, dtype=np.float64)
        out = self.forward(np.atleast_2d(z), order=0).value
        return out[0] if z.ndim == 1 else out

    def jet(self, z):
        """
        Same as :py:func:`pinnlab.AutoDiff.eval_jet2`.
        """
        return eval_jet2(self, z)

    def preactivations(self, points):
        """
        Hidden-layer pre-activations at a batch of points, one (P, d_i) array per hidden layer.
        """
        value = np.atleast_2d(np.asarray(points, dtype=np.float64))
        pre   = []
        for layer in range(self.depth - 1):
            pre_v = value.dot(self.weights[layer].T) + self.biases[layer]
            pre.append(pre_v)
            value = self.activation.derivative(pre_v, 0)
        return pre

    def min_abs_preactivation(self, points):
        """
        Smallest |pre-activation| over all hidden units and points; inf for networks with no hidden layer.
        """
        pre = self.preactivations(points)
        if len(pre) == 0:
            return np.inf
        return float(min(np.min(np.abs(p)) for p in pre))

    def save(self, filename, extra=None):
        """
        Writes a checkpoint: widths, activation tag, flattened theta, seed and optional extra trainable scalars.
        Round trips are bit-exact.
        """
        if self.activation.TAG is None:
            raise InputError("Cannot checkpoint a network with custom activation %s" % self.activation.name)
        np.savez(filename,
                 version    = np.array(Network.CHECKPOINT_VERSION),
                 widths     = np.array(self.widths, dtype=np.int64),
                 activation = np.array(self.activation.TAG),
                 theta      = self.flatten(),
                 seed       = np.array(-1 if self.seed is None else self.seed, dtype=np.int64),
                 extra      = np.zeros(0) if extra is None else np.asarray(extra, dtype=np.float64))
        PinnLabLogger.debug("Wrote checkpoint %s" % filename)

    @staticmethod
    def load(filename, with_extra=False):
        """
        Reads a checkpoint written by :py:meth:`Network.save`.

        :returns: the network, or (network, extra) if *with_extra*
        """
        with np.load(filename, allow_pickle=False) as archive:
            widths     = tuple(int(w) for w in archive["widths"])
            activation = str(archive["activation"])
            theta      = np.array(archive["theta"], dtype=np.float64)
            seed       = int(archive["seed"])
            extra      = np.array(archive["extra"], dtype=np.float64)

        template = Network(widths,
                           [np.zeros((widths[i], widths[i-1])) for i in range(1, len(widths))],
                           [np.zeros(widths[i]) for i in range(1, len(widths))],
                           activation, None if seed < 0 else seed)
        net = template.with_parameters(theta)
        if with_extra:
            return net, (extra if extra.size > 0 else None)
        return net


def init_network(widths, activation, seed):
    """
    Glorot-uniform weights (bound sqrt(6/(d_{i-1}+d_i))) and zero biases, reproducible from *seed*.
    """
    widths = tuple(int(w) for w in widths)
    if len(widths) < 2:
        raise InvalidArchitecture("A network needs at least input and output widths, got %s" % str(widths))
    if min(widths) < 1:
        raise InvalidArchitecture("All widths must be at least 1, got %s" % str(widths))

    rng     = np.random.default_rng(seed)
    weights = []
    biases  = []
    for layer in range(1, len(widths)):
        bound = np.sqrt(6.0/(widths[layer-1] + widths[layer]))
        weights.append(rng.uniform(-bound, bound, size=(widths[layer], widths[layer-1])))
        biases.append(np.zeros(widths[layer]))
    net = Network(widths, weights, biases, activation, seed)
    PinnLabLogger.debug("Initialized %s with seed %d" % (str(net), seed))
    return net


def linear_combine(f, g, c1, c2):
    """
    Network realizing ``c1*f + c2*g`` exactly: hidden layers stacked block-diagonally, the output layer
    concatenated with scaled weights.
    """
    if not isinstance(f, Network) or not isinstance(g, Network):
        raise IncompatibleNetworks("linear_combine needs two plain networks")
    if f.activation != g.activation:
        raise IncompatibleNetworks("Activations differ: %s vs %s" % (f.activation.name, g.activation.name))
    if f.depth != g.depth:
        raise IncompatibleNetworks("Depths differ: %d vs %d" % (f.depth, g.depth))
    if f.input_dim != g.input_dim or f.output_dim != g.output_dim:
        raise IncompatibleNetworks("Input/output dimensions differ: %s vs %s" % (str(f.widths), str(g.widths)))

    L = f.depth
    if L == 1:
        return Network(f.widths, [c1*f.weights[0] + c2*g.weights[0]], [c1*f.biases[0] + c2*g.biases[0]], f.activation)

    weights = [np.vstack([f.weights[0], g.weights[0]])]
    biases  = [np.concatenate([f.biases[0], g.biases[0]])]
    for layer in range(1, L - 1):
        weights.append(scipy.linalg.block_diag(f.weights[layer], g.weights[layer]))
        biases.append(np.concatenate([f.biases[layer], g.biases[layer]]))
    weights.append(np.hstack([c1*f.weights[-1], c2*g.weights[-1]]))
    biases.append(c1*f.biases[-1] + c2*g.biases[-1])

    widths = [f.input_dim] + [f.widths[i] + g.widths[i] for i in range(1, L)] + [f.output_dim]
    return Network(widths, weights, biases, f.activation)


def deepen_relu_identity(net, target_depth, offset=0.0):
    """
    Deepens a ReLU network to *target_depth* without changing the function, using ``x = ReLU(x) - ReLU(-x)``.

    The output layer becomes a hidden layer of paired units ``(y + offset, -(y + offset))``, followed by
    identity pairs and a final layer subtracting the pair and the offset.  With the default offset 0 the
    identity is exact in floating point; a positive offset moves the new kink away from ``y = 0``, which
    matters for networks that are exactly zero on the points where their jets are evaluated.
    """
    if not isinstance(net.activation, ReLU):
        raise WrongActivation("deepen_relu_identity needs a ReLU network, got %s" % net.activation.name)
    if target_depth < net.depth:
        raise InvalidArchitecture("Target depth %d is below current depth %d" % (target_depth, net.depth))
    if target_depth == net.depth:
        return net

    c     = net.output_dim
    eye   = np.eye(c)
    W_L   = net.weights[-1]
    b_L   = net.biases[-1]

    weights = list(net.weights[:-1]) + [np.vstack([W_L, -W_L])]
    biases  = list(net.biases[:-1])  + [np.concatenate([b_L + offset, -(b_L + offset)])]
    for extra in range(target_depth - net.depth - 1):
        weights.append(np.block([[eye, -eye], [-eye, eye]]))
        biases.append(np.zeros(2*c))
    weights.append(np.hstack([eye, -eye]))
    biases.append(np.full(c, -float(offset)))

    widths = list(net.widths[:-1]) + [2*c]*(target_depth - net.depth) + [c]
    return Network(widths, weights, biases, net.activation, net.seed)


# ---------------------------------------------------------------------- hard constraints

def _product_jet(s, s_grad, s_hess, jet, order):
    """
    Jet of ``s(z)*N(z)`` from a scalar numpy jet (s, s_grad, s_hess) and a batched network jet.
    """
    num_points = s.shape[0]
    c          = jet.value.shape[1]
    value = jet.value*s[:, None]
    if order == 0:
        return Jet2(value, order=0)

    d    = s_grad.shape[1]
    grad = jet.grad*s[:, None, None] + jet.value.reshape(num_points, c, 1)*s_grad[:, None, :]
    if order == 1:
        return Jet2(value, grad, order=1)

    hess = (jet.hess*s[:, None, None, None]
            + jet.value.reshape(num_points, c, 1, 1)*s_hess[:, None, :, :]
            + jet.grad.reshape(num_points, c, d, 1)*s_grad[:, None, None, :]
            + s_grad[:, None, :, None]*jet.grad.reshape(num_points, c, 1, d))
    return Jet2(value, grad, hess, order=2)


class MultiplicativeMask(object):
    """
    Constraint ``u = m(z) * N(z)``.

    :param mask_jet: callable ``(points, order) -> (m, m_grad, m_hess)`` of numpy arrays with shapes
                     (P,), (P, d), (P, d, d); gradient and Hessian may be None below the requested order
    :param name:     label for logs
    """
    def __init__(self, mask_jet, name="mask"):
        self.mask_jet = mask_jet
        self.name     = name

    def apply(self, points, jet, order):
        m, m_grad, m_hess = self.mask_jet(points, order)
        return _product_jet(m, m_grad, m_hess, jet, order)


class AdditiveAnchor(object):
    """
    Constraint ``u = g0(z) + s(z) * N(z)``.

    :param offset_jet: callable ``(points, order) -> (g0, g0_grad, g0_hess)`` with shapes (P, c), (P, c, d), (P, c, d, d)
    :param scale_jet:  callable ``(points, order) -> (s, s_grad, s_hess)`` with shapes (P,), (P, d), (P, d, d)
    :param name:       label for logs
    """
    def __init__(self, offset_jet, scale_jet, name="anchor"):
        self.offset_jet = offset_jet
        self.scale_jet  = scale_jet
        self.name       = name

    def apply(self, points, jet, order):
        s, s_grad, s_hess    = self.scale_jet(points, order)
        g0, g0_grad, g0_hess = self.offset_jet(points, order)
        scaled = _product_jet(s, s_grad, s_hess, jet, order)
        value  = scaled.value + g0
        if order == 0:
            return Jet2(value, order=0)
        grad = scaled.grad + g0_grad
        if order == 1:
            return Jet2(value, grad, order=1)
        return Jet2(value, grad, scaled.hess + g0_hess, order=2)


class ConstrainedNetwork(object):
    """
    A :py:class:`Network` composed with a hard constraint (:py:class:`MultiplicativeMask` or
    :py:class:`AdditiveAnchor`).  Exposes the same evaluation and parameter interface as the base network,
    so losses, gradients and training treat both alike.
    """
    def __init__(self, base, constraint):
        self.base       = base
        self.constraint = constraint

    def __repr__(self):
        return "ConstrainedNetwork(%s, %s)" % (str(self.base), self.constraint.name)

    @property
    def widths(self):
        return self.base.widths

    @property
    def depth(self):
        return self.base.depth

    @property
    def input_dim(self):
        return self.base.input_dim

    @property
    def output_dim(self):
        return self.base.output_dim

    @property
    def activation(self):
        return self.base.activation

    @property
    def num_parameters(self):
        return self.base.num_parameters

    @property
    def seed(self):
        return self.base.seed

    def parameter_arrays(self):
        return self.base.parameter_arrays()

    def flatten(self):
        return self.base.flatten()

    def with_parameters(self, theta):
        return ConstrainedNetwork(self.base.with_parameters(theta), self.constraint)

    def forward(self, points, order=0, params=None):
        points = np.atleast_2d(np.asarray(points))
        if points.dtype.kind != 'f':
            points = points.astype(np.float64)
        jet    = self.base.forward(points, order=order, params=params)
        return self.constraint.apply(points, jet, order)

    def eval(self, z):
        z   = np.asarray(z, dtype=np.float64)
        out = value_of(self.forward(np.atleast_2d(z), order=0).value)
        return out[0] if z.ndim == 1 else out

    def jet(self, z):
        return eval_jet2(self, z)

    def min_abs_preactivation(self, points):
        return self.base.min_abs_preactivation(points)

    def save(self, filename, extra=None):
        """
        Checkpoints the base network; the constraint is rebuilt by the experiment that created it.
        """
        self.base.save(filename, extra)


def wrap_hard_constraint(net, constraint):
    """
    Returns the :py:class:`ConstrainedNetwork` realizing *constraint* on *net*.
    """
    return ConstrainedNetwork(net, constraint)
