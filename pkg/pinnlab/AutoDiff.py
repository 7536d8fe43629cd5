"""
Derivatives of network outputs.

Input derivatives (value, gradient, Hessian) are propagated forward through the layers as
second order jets; parameter derivatives are obtained by reverse accumulation over whatever
computation produced the objective, jets included.  Both are checkable against the central
difference oracles at the bottom of this module.
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

from .Error  import InputError, NonFiniteGradient
from .Logger import PinnLabLogger


def _unbroadcast(grad, shape):
    """
    Sums *grad* down to *shape*, undoing numpy broadcasting.
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _is_basic_index(idx):
    if not isinstance(idx, tuple):
        idx = (idx,)
    for item in idx:
        if not (isinstance(item, (slice, int, np.integer)) or item is Ellipsis):
            return False
    return True


class Variable(object):
    """
    Array-valued node of a reverse-mode computation graph.

    Each node keeps its value in :py:attr:`Variable.data`, the nodes it was computed from, and a closure
    that pushes the gradient of the final scalar back to those nodes.  Nodes created from plain arrays are
    constants unless ``requires_grad`` is set.  Mixed arithmetic with numpy arrays and python scalars works
    in either operand order.
    """
    # make numpy hand mixed expressions to our reflected operators
    __array_ufunc__ = None

    def __init__(self, data, requires_grad=False, children=(), op=""):
        data = np.asarray(data)
        if data.dtype.kind != 'f':
            data = data.astype(np.float64)
        #: the value
        self.data           = data
        #: accumulated gradient of the final scalar with respect to this node (after :py:meth:`backward`)
        self.grad           = None
        self.requires_grad  = requires_grad
        self._children      = children
        self._backward      = None
        self._op            = op

    def __repr__(self):
        return "Variable(shape=%s, op=%s, requires_grad=%s)" % (str(self.data.shape), self._op, self.requires_grad)

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __len__(self):
        return len(self.data)

    @staticmethod
    def lift(value):
        return value if isinstance(value, Variable) else Variable(value)

    @staticmethod
    def _result(data, children, op):
        children = tuple(c for c in children if isinstance(c, Variable))
        return Variable(data, requires_grad=any(c.requires_grad for c in children), children=children, op=op)

    def _accumulate(self, grad):
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True).reshape(self.data.shape)
        else:
            self.grad = self.grad + grad

    def backward(self, grad=None):
        """
        Reverse sweep from this node.  With no *grad*, this node must hold a single value.
        """
        if grad is None:
            if self.data.size != 1:
                raise InputError("backward() without a seed gradient needs a scalar, got shape %s" % str(self.data.shape))
            grad = np.ones_like(self.data)

        # iterative post-order so deep graphs don't hit the recursion limit
        topo    = []
        visited = set()
        stack   = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for child in node._children:
                if child.requires_grad and id(child) not in visited:
                    stack.append((child, False))

        for node in topo:
            node.grad = None
        self.grad = np.asarray(grad, dtype=self.data.dtype)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # ------------------------------------------------------------------ arithmetic
    def __add__(self, other):
        other = Variable.lift(other)
        out   = Variable._result(self.data + other.data, (self, other), "add")

        def _backward(g):
            self._accumulate(_unbroadcast(g, self.data.shape))
            other._accumulate(_unbroadcast(g, other.data.shape))
        out._backward = _backward
        return out

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        out = Variable._result(-self.data, (self,), "neg")

        def _backward(g):
            self._accumulate(-g)
        out._backward = _backward
        return out

    def __sub__(self, other):
        other = Variable.lift(other)
        out   = Variable._result(self.data - other.data, (self, other), "sub")

        def _backward(g):
            self._accumulate(_unbroadcast(g, self.data.shape))
            other._accumulate(_unbroadcast(-g, other.data.shape))
        out._backward = _backward
        return out

    def __rsub__(self, other):
        return Variable.lift(other).__sub__(self)

    def __mul__(self, other):
        other = Variable.lift(other)
        out   = Variable._result(self.data*other.data, (self, other), "mul")

        def _backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g*other.data, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g*self.data, other.data.shape))
        out._backward = _backward
        return out

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = Variable.lift(other)
        out   = Variable._result(self.data/other.data, (self, other), "div")

        def _backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g/other.data, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(-g*self.data/(other.data*other.data), other.data.shape))
        out._backward = _backward
        return out

    def __rtruediv__(self, other):
        return Variable.lift(other).__truediv__(self)

    def __pow__(self, exponent):
        if isinstance(exponent, Variable):
            raise InputError("Variable exponents are not supported")
        out = Variable._result(self.data**exponent, (self,), "pow")

        def _backward(g):
            if exponent == 2:
                self._accumulate(2.0*g*self.data)
            else:
                self._accumulate(g*exponent*self.data**(exponent - 1))
        out._backward = _backward
        return out

    def __abs__(self):
        out = Variable._result(np.abs(self.data), (self,), "abs")

        def _backward(g):
            self._accumulate(g*np.sign(self.data))
        out._backward = _backward
        return out

    # ------------------------------------------------------------------ shape
    def __getitem__(self, idx):
        out   = Variable._result(self.data[idx], (self,), "getitem")
        basic = _is_basic_index(idx)

        def _backward(g):
            full = np.zeros_like(self.data)
            if basic:
                full[idx] += g
            else:
                np.add.at(full, idx, g)
            self._accumulate(full)
        out._backward = _backward
        return out

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = Variable._result(self.data.reshape(shape), (self,), "reshape")

        def _backward(g):
            self._accumulate(g.reshape(self.data.shape))
        out._backward = _backward
        return out

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if len(axes) == 0:
            axes = tuple(reversed(range(self.data.ndim)))
        inverse = tuple(np.argsort(axes))
        out     = Variable._result(self.data.transpose(axes), (self,), "transpose")

        def _backward(g):
            self._accumulate(g.transpose(inverse))
        out._backward = _backward
        return out

    @property
    def T(self):
        return self.transpose()

    def ravel(self):
        return self.reshape(-1)

    # ------------------------------------------------------------------ reductions
    def sum(self, axis=None, keepdims=False):
        out = Variable._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), "sum")

        def _backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.data.shape))
        out._backward = _backward
        return out

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else np.prod([self.data.shape[a] for a in np.atleast_1d(axis)])
        return self.sum(axis=axis, keepdims=keepdims)/float(count)


# ---------------------------------------------------------------------- dispatching helpers
#
# These accept plain numpy arrays or Variables.  With numpy only they stay in numpy, so value
# evaluation without gradients never builds a graph.

def _any_variable(*values):
    for value in values:
        if isinstance(value, Variable):
            return True
    return False


def dense(x, W, b=None):
    """
    Affine map over the last axis: ``x @ W.T + b`` for x of shape (..., k) and W of shape (n, k).
    """
    if not _any_variable(x, W, b):
        out = np.matmul(x, W.T)
        return out if b is None else out + b

    x   = Variable.lift(x)
    W   = Variable.lift(W)
    b   = None if b is None else Variable.lift(b)
    data = np.matmul(x.data, W.data.T)
    if b is not None:
        data = data + b.data
    out = Variable._result(data, (x, W, b), "dense")
    k   = W.data.shape[1]
    n   = W.data.shape[0]

    def _backward(g):
        if x.requires_grad:
            x._accumulate(np.matmul(g, W.data))
        if W.requires_grad:
            W._accumulate(np.matmul(g.reshape(-1, n).T, x.data.reshape(-1, k)))
        if b is not None and b.requires_grad:
            b._accumulate(g.reshape(-1, n).sum(axis=0))
    out._backward = _backward
    return out


def activate(x, activation, order=0):
    """
    Elementwise ``activation^(order)(x)``; the reverse sweep uses ``activation^(order+1)``.
    """
    if not isinstance(x, Variable):
        return activation.derivative(x, order)
    out = Variable._result(activation.derivative(x.data, order), (x,), "act%d" % order)

    def _backward(g):
        x._accumulate(g*activation.derivative(x.data, order + 1))
    out._backward = _backward
    return out


def sparse_dot(K, x):
    """
    ``K @ x`` for a scipy sparse matrix K acting on the first axis of x.
    """
    if not isinstance(x, Variable):
        return K.dot(x)
    out = Variable._result(K.dot(x.data), (x,), "sparse_dot")
    KT  = K.T.tocsr()

    def _backward(g):
        x._accumulate(KT.dot(g))
    out._backward = _backward
    return out


def concatenate(values, axis=0):
    """
    Concatenates arrays and/or Variables along *axis*.
    """
    if not _any_variable(*values):
        return np.concatenate(values, axis=axis)
    values = [Variable.lift(v) for v in values]
    out    = Variable._result(np.concatenate([v.data for v in values], axis=axis), tuple(values), "concat")
    sizes  = [v.data.shape[axis] for v in values]
    splits = np.cumsum(sizes)[:-1]

    def _backward(g):
        for value, piece in zip(values, np.split(g, splits, axis=axis)):
            value._accumulate(piece)
    out._backward = _backward
    return out


def value_of(x):
    """
    Returns the numpy data of a Variable, or the argument itself.
    """
    return x.data if isinstance(x, Variable) else np.asarray(x)


# ---------------------------------------------------------------------- jets

class Jet2(object):
    """
    Value, input gradient and input Hessian of a vector-valued function.

    For a single point the shapes are ``value (c,)``, ``grad (c, d)``, ``hess (c, d, d)``; batched jets carry a
    leading point axis.  Fields may be numpy arrays or :py:class:`Variable` instances, and *grad*/*hess* are
    None when the jet was computed to a lower order.
    """
    def __init__(self, value, grad=None, hess=None, order=2):
        self.value  = value
        self.grad   = grad
        self.hess   = hess
        self.order  = order

    def numpy(self):
        """
        Returns a copy of this jet holding plain numpy arrays.
        """
        return Jet2(value_of(self.value),
                    None if self.grad is None else value_of(self.grad),
                    None if self.hess is None else value_of(self.hess),
                    self.order)

    def point(self, index):
        """
        Returns the single-point jet at *index* of a batched jet.
        """
        return Jet2(self.value[index],
                    None if self.grad is None else self.grad[index],
                    None if self.hess is None else self.hess[index],
                    self.order)

    def __repr__(self):
        return "Jet2(value=%s, grad=%s, hess=%s)" % (str(value_of(self.value)),
                                                     str(None if self.grad is None else value_of(self.grad)),
                                                     str(None if self.hess is None else value_of(self.hess)))


class ParameterGradient(object):
    """
    Objective value and gradient with respect to the flattened parameters
    (layer-major, weights before biases, then any extra trainable scalars).
    """
    def __init__(self, objective_value, grad, breakdown=None):
        self.objective_value = objective_value
        self.grad            = grad
        #: the objective's term breakdown as floats, when the objective returned one
        self.breakdown       = breakdown


class ModelView(object):
    """
    What an objective sees: a model whose parameters may be Variables.

    :param model:  a :py:class:`pinnlab.Network.Network` or :py:class:`pinnlab.Network.ConstrainedNetwork`
    :param params: list of parameter arrays or Variables in flatten order; the model's own arrays if None
    :param extra:  optional vector (array or Variable) of additional trainable scalars
    """
    def __init__(self, model, params=None, extra=None):
        self.model  = model
        self.params = model.parameter_arrays() if params is None else params
        self.extra  = extra

    def eval(self, points):
        """
        Values at a (P, d) array of points, shape (P, c).
        """
        return self.model.forward(np.atleast_2d(points), order=0, params=self.params).value

    def jet(self, points, order=2):
        """
        Batched jet at a (P, d) array of points.
        """
        return self.model.forward(np.atleast_2d(points), order=order, params=self.params)

    def parameters(self):
        """
        The network parameters (not the extras), in flatten order.
        """
        return self.params


def _objective_total(out):
    return getattr(out, "total", out)


def eval_jet2(net, z):
    """
    Exact value, gradient and Hessian of *net* at *z*.

    :param net: a network or constrained network
    :param z:   a point of shape (d,), or a batch of shape (P, d)
    :returns:   :py:class:`Jet2` of numpy arrays, single-point or batched to match *z*
    :raises:    :py:class:`pinnlab.Error.KinkAtPoint` if a ReLU pre-activation is exactly zero
                and the kink reaches the output, see :py:meth:`pinnlab.Network.Network.forward`
    """
    z      = np.asarray(z, dtype=np.float64)
    single = (z.ndim == 1)
    jet    = net.forward(np.atleast_2d(z), order=2).numpy()
    return jet.point(0) if single else jet


def parameter_gradient(net, objective, extra=None):
    """
    Objective value and exact parameter gradient by reverse accumulation.

    :param net:       the network (or constrained network) whose parameters are differentiated
    :param objective: callable taking a :py:class:`ModelView` and returning a scalar Variable or a
                      loss breakdown with a ``total`` Variable
    :param extra:     optional vector of additional trainable scalars exposed as ``view.extra``
    :returns:         :py:class:`ParameterGradient`; the gradient has length M (+ len(extra))
    """
    params = [Variable(np.array(p, dtype=np.float64), requires_grad=True) for p in net.parameter_arrays()]
    extra_var = None
    if extra is not None:
        extra_var = Variable(np.array(extra, dtype=np.float64), requires_grad=True)

    out   = objective(ModelView(net, params, extra_var))
    total = _objective_total(out)
    if not isinstance(total, Variable):
        # objective does not depend on the parameters
        grad_size = sum(p.data.size for p in params) + (0 if extra is None else np.size(extra))
        return ParameterGradient(float(total), np.zeros(grad_size), _breakdown_values(out))

    total.backward()
    pieces = [np.zeros(p.data.size) if p.grad is None else p.grad.ravel() for p in params]
    if extra_var is not None:
        pieces.append(np.zeros(extra_var.data.size) if extra_var.grad is None else extra_var.grad.ravel())
    grad = np.concatenate(pieces)

    if not np.all(np.isfinite(grad)):
        bad = np.flatnonzero(~np.isfinite(grad))
        raise NonFiniteGradient("Non-finite gradient in %d of %d components (first at %d)" % (len(bad), len(grad), bad[0]))

    return ParameterGradient(float(total.data), grad, _breakdown_values(out))


def _breakdown_values(out):
    if hasattr(out, "values"):
        return out.values()
    return None


def _objective_value(net, objective, extra):
    out = objective(ModelView(net, None, None if extra is None else np.array(extra, dtype=np.float64)))
    return float(value_of(_objective_total(out)))


def fd_gradient_oracle(net, objective, step, extra=None):
    """
    Central-difference gradient of *objective* with respect to the flattened parameters.

    :param step: difference step, > 0
    :returns:    numpy vector of length M (+ len(extra))
    """
    if step <= 0:
        raise InputError("fd_gradient_oracle step must be positive, got %g" % step)

    theta     = net.flatten()
    extra     = None if extra is None else np.array(extra, dtype=np.float64)
    num_extra = 0 if extra is None else extra.size
    grad      = np.zeros(theta.size + num_extra)

    for idx in range(theta.size + num_extra):
        values = []
        for sign in (1.0, -1.0):
            if idx < theta.size:
                shifted       = theta.copy()
                shifted[idx] += sign*step
                values.append(_objective_value(net.with_parameters(shifted), objective, extra))
            else:
                shifted                   = extra.copy()
                shifted[idx - theta.size] += sign*step
                values.append(_objective_value(net, objective, shifted))
        grad[idx] = (values[0] - values[1])/(2.0*step)

    PinnLabLogger.debug("fd_gradient_oracle evaluated %d parameter pairs with step %g" % (grad.size, step))
    return grad


def jet_fd_oracle(net, z, step_grad=1e-4, step_hess=1e-3):
    """
    Finite-difference reference for :py:func:`eval_jet2`: the gradient from central differences of values,
    the Hessian from central differences of the exact gradient.

    :param z: a single point of shape (d,)
    :returns: :py:class:`Jet2` of numpy arrays
    """
    z     = np.asarray(z, dtype=np.float64)
    d     = z.size
    value = net.eval(z)
    c     = value.size
    grad  = np.zeros((c, d))
    hess  = np.zeros((c, d, d))
    for j in range(d):
        e        = np.zeros(d)
        e[j]     = 1.0
        grad[:, j]    = (net.eval(z + step_grad*e) - net.eval(z - step_grad*e))/(2.0*step_grad)
        hess[:, :, j] = (eval_jet2(net, z + step_hess*e).grad - eval_jet2(net, z - step_hess*e).grad)/(2.0*step_hess)
    return Jet2(value, grad, hess)
