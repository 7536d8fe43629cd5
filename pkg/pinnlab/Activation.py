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
from numpy.polynomial import polynomial as P

from .Error import InputError


class Activation(object):
    """
    Elementwise activation function with derivative evaluators.

    Subclasses implement :py:meth:`Activation.derivative` for orders up to :py:attr:`Activation.max_order`.
    Instances are stateless apart from caches and may be shared.
    """
    #: Tag stored in checkpoints.  None for activations that can't be rebuilt from a tag.
    TAG             = None

    def __init__(self):
        #: Highest derivative order available
        self.max_order          = 3
        #: True if the activation has points of non-differentiability (checked in jets)
        self.has_kinks          = False
        #: True if strictly monotone (needed for deep smooth witnesses)
        self.strictly_monotone  = False

    @property
    def name(self):
        return self.TAG

    def __call__(self, x):
        return self.derivative(x, 0)

    def derivative(self, x, order):
        """
        Returns the *order*-th derivative evaluated elementwise at *x*.
        """
        raise NotImplementedError

    def _check_order(self, order):
        if order < 0 or order > self.max_order:
            raise InputError("%s derivatives available up to order %d, requested %d" %
                             (self.name, self.max_order, order))

    def __eq__(self, other):
        if not isinstance(other, Activation):
            return False
        if self.TAG is not None:
            return self.TAG == other.TAG
        return self is other

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self.TAG) if self.TAG is not None else id(self)

    def __repr__(self):
        return "%s()" % self.__class__.__name__

    @staticmethod
    def from_tag(tag):
        """
        Returns the activation registered under *tag* (``relu``, ``tanh`` or ``sigmoid``).
        """
        tag = tag.strip().lower()
        for cls in [ReLU, Tanh, Sigmoid]:
            if cls.TAG == tag:
                return cls()
        raise InputError("Unknown activation [%s]. Expected one of %s" % (tag, str(Activation.TAGS)))

Activation.TAGS = ["relu", "tanh", "sigmoid"]


class ReLU(Activation):
    """
    max(0, x).  The derivative at 0 is reported as 0 here; callers that need
    derivatives check for exact zeros first and raise :py:class:`pinnlab.Error.KinkAtPoint` unless the unit
    is behind a locally constant one.
    """
    TAG = "relu"

    def __init__(self):
        Activation.__init__(self)
        self.max_order  = 64
        self.has_kinks  = True

    def derivative(self, x, order):
        self._check_order(order)
        x = np.asarray(x)
        if order == 0:
            return np.maximum(x, 0.0)
        if order == 1:
            return (x > 0.0).astype(x.dtype if x.dtype.kind == 'f' else np.float64)
        return np.zeros(x.shape, dtype=x.dtype if x.dtype.kind == 'f' else np.float64)


class _PolynomialActivation(Activation):
    """
    Activations whose derivatives are polynomials in the activation value itself:
    if ``s' = q(s)`` then ``d/dx p(s) = p'(s) q(s)``.  Lets us evaluate any derivative order.
    """
    #: coefficients (increasing degree) of q
    CHAIN = None

    def __init__(self):
        Activation.__init__(self)
        self.max_order          = 48
        self.strictly_monotone  = True
        self._polys             = [np.array([0.0, 1.0])]

    def _value(self, x):
        raise NotImplementedError

    def _poly(self, order):
        while len(self._polys) <= order:
            last = self._polys[-1]
            self._polys.append(P.polymul(P.polyder(last), self.CHAIN))
        return self._polys[order]

    def derivative(self, x, order):
        self._check_order(order)
        s = self._value(np.asarray(x))
        if order == 0:
            return s
        return P.polyval(s, self._poly(order))


class Tanh(_PolynomialActivation):
    """
    Hyperbolic tangent; ``tanh' = 1 - tanh^2``.
    """
    TAG   = "tanh"
    CHAIN = np.array([1.0, 0.0, -1.0])

    def _value(self, x):
        return np.tanh(x)

    def derivative(self, x, order):
        # closed forms for the orders used in every jet pass
        self._check_order(order)
        t = np.tanh(np.asarray(x))
        if order == 0:
            return t
        s1 = 1.0 - t*t
        if order == 1:
            return s1
        if order == 2:
            return -2.0*t*s1
        if order == 3:
            return -2.0*s1*(1.0 - 3.0*t*t)
        return P.polyval(t, self._poly(order))


class Sigmoid(_PolynomialActivation):
    """
    Logistic function; ``s' = s (1 - s)``.
    """
    TAG   = "sigmoid"
    CHAIN = np.array([0.0, 1.0, -1.0])

    def _value(self, x):
        x = np.asarray(x)
        return 0.5*(1.0 + np.tanh(0.5*x))


class SmoothActivation(Activation):
    """
    User supplied smooth activation.

    :param name:        label used in logs
    :param derivatives: list of callables; entry *k* evaluates the *k*-th derivative elementwise.
                        The declared order is ``len(derivatives) - 1``.
    :param strictly_monotone: declare strict monotonicity
    """
    def __init__(self, name, derivatives, strictly_monotone=False):
        Activation.__init__(self)
        if len(derivatives) < 1:
            raise InputError("SmoothActivation %s needs at least a value evaluator" % name)
        self._name              = name
        self._derivatives       = list(derivatives)
        self.max_order          = len(derivatives) - 1
        self.strictly_monotone  = strictly_monotone

    @property
    def name(self):
        return self._name

    def derivative(self, x, order):
        self._check_order(order)
        return np.asarray(self._derivatives[order](np.asarray(x)))

    def __repr__(self):
        return "SmoothActivation(%s)" % self._name
