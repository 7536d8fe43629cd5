"""
This file will define the various exceptions that can be raised in the course of running pinnlab.

Exceptions fall into three families which map onto command line exit codes:

* :py:class:`ConfigurationError` and :py:class:`InputError` -- exit code 1
* :py:class:`NumericalError` -- exit code 2
* :py:class:`CertificationError` -- exit code 3
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

class Error(Exception):
    """
    Base class for exceptions in pinnlab.
    """
    #: Process exit code used by :py:func:`pinnlab.Run.main` for this family
    EXIT_CODE = 1

    def __init__(self, msg):
        Exception.__init__(self, msg)
        self.msg      = msg

    def __str__(self):
        return str(self.msg)

class ConfigurationError(Error):
    """
    Exception raised for errors in configuration.

    Attributes:
       expr  -- the input file in which the error occurred
       msg   -- explanation of the error
    """

    def __init__(self, filename, msg):
        Error.__init__(self, msg)
        self.expr     = filename

    def __str__(self):
        return "%s: %s" % (self.expr, self.msg)

class InputError(Error):
    """
    Exception raised when an operation receives arguments outside its contract.

    Attributes:
       msg   -- explanation of the error
    """
    EXIT_CODE = 1

class NumericalError(Error):
    """
    Exception raised when a computation fails numerically.

    Attributes:
       msg   -- explanation of the error
    """
    EXIT_CODE = 2

class CertificationError(Error):
    """
    Exception raised when a certification or gradient check does not pass.

    Attributes:
       msg    -- explanation of the error
       report -- the report dictionary that failed, if any
    """
    EXIT_CODE = 3

    def __init__(self, msg, report=None):
        Error.__init__(self, msg)
        self.report   = report

# ------------------------------------------------------------------ input errors

class InvalidArchitecture(InputError):
    """
    Exception raised for network widths that do not describe a network.
    """
    pass

class IncompatibleNetworks(InputError):
    """
    Exception raised when two networks cannot be combined.
    """
    pass

class WrongActivation(InputError):
    """
    Exception raised when a construction requires a different activation.
    """
    pass

class NonIntegralMesh(InputError):
    """
    Exception raised when a mesh size does not divide the domain length.
    """
    pass

class MeshTooCoarse(InputError):
    """
    Exception raised when a mesh has no interior nodes.
    """
    pass

class GridTooSmall(InputError):
    """
    Exception raised when a grid is too small to trim.
    """
    pass

class StencilOutOfRange(InputError):
    """
    Exception raised when a stencil references points outside the collocation set.
    """
    pass

class DimensionMismatch(InputError):
    """
    Exception raised for arrays whose shapes disagree.
    """
    pass

class UnsupportedExponent(InputError):
    """
    Exception raised for norm or ridge exponents outside {1, 2}.
    """
    pass

class DuplicateAbscissa(InputError):
    """
    Exception raised when abscissae or points that must be distinct coincide.
    """
    pass

class BallIntersectsCollocation(InputError):
    """
    Exception raised when a tent support contains a collocation point.
    """
    pass

class InvalidRegime(InputError):
    """
    Exception raised when construction hypotheses are violated.
    """
    pass

class ZeroReference(InputError):
    """
    Exception raised when a relative error is requested against a zero reference.
    """
    pass

# ------------------------------------------------------------------ numerical errors

class KinkAtPoint(NumericalError):
    """
    Exception raised when a ReLU pre-activation is exactly zero where derivatives are needed.

    Attributes:
       layer  -- the 1-based hidden layer index
       point  -- the offending input point
       msg    -- explanation of the error
    """
    def __init__(self, layer, point, msg=None):
        if msg is None:
            msg = "ReLU pre-activation exactly zero in hidden layer %d at point %s" % (layer, str(point))
        NumericalError.__init__(self, msg)
        self.layer    = layer
        self.point    = point

class NonFiniteGradient(NumericalError):
    """
    Exception raised when a gradient has NaN or Inf components.
    """
    pass

class NonFiniteLoss(NumericalError):
    """
    Exception raised when the training loss becomes NaN or Inf.

    Attributes:
       iteration -- the training iteration
       msg       -- explanation of the error
    """
    def __init__(self, iteration, msg=None):
        if msg is None:
            msg = "Non-finite loss at iteration %d" % iteration
        NumericalError.__init__(self, msg)
        self.iteration = iteration

class NoConvergence(NumericalError):
    """
    Exception raised when an iterative linear solve stops before reaching its tolerance.

    Attributes:
       iterations -- iterations spent
       msg        -- explanation of the error
    """
    def __init__(self, iterations, msg=None):
        if msg is None:
            msg = "Linear solve did not converge after %d iterations" % iterations
        NumericalError.__init__(self, msg)
        self.iterations = iterations

class FixedPointDiverged(NumericalError):
    """
    Exception raised when a time step's fixed-point iteration fails.

    Attributes:
       step  -- the time step index
       msg   -- explanation of the error
    """
    def __init__(self, step, msg=None):
        if msg is None:
            msg = "Fixed-point iteration failed at time step %d" % step
        NumericalError.__init__(self, msg)
        self.step     = step

class IllConditioned(NumericalError):
    """
    Exception raised when an interpolation system stays ill-conditioned after all retries.
    """
    pass

class ExhaustedRetries(NumericalError):
    """
    Exception raised when random resampling never produces an admissible draw.
    """
    pass
