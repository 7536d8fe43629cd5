"""
Full-batch Adam training with best-iterate tracking.
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
import os

import numpy as np
import pandas as pd

from .AutoDiff import parameter_gradient
from .Error    import DimensionMismatch, InputError, KinkAtPoint, NonFiniteGradient, NonFiniteLoss
from .Logger   import PinnLabLogger
from .Losses   import LossBreakdown, with_ridge
from .Util     import Util


class TrainConfig(object):
    """
    Training settings.

    :param ridge:            :py:class:`pinnlab.Losses.LossWeights` carrying ``alpha_theta`` and ``q``, or None
    :param checkpoint_every: write the best iterate every this many iterations (0: never)
    :param loss_log:         CSV file the loss log is appended to, or None
    """
    #: Loss log rows held in memory before they are appended to the CSV
    LOG_CHUNK_ROWS          = 100
    #: Checkpoint file name within the output directory
    CHECKPOINT_FILE         = "checkpoint_%s.npz"

    def __init__(self, iterations, learning_rate=1e-3, adam_beta1=0.9, adam_beta2=0.999, adam_eps=1e-8,
                 seed=0, log_every=1000, ridge=None, checkpoint_every=0, output_dir=None, loss_log=None,
                 run_label="train"):
        if int(iterations) < 1:
            raise InputError("Training needs at least one iteration, got %s" % str(iterations))
        if learning_rate <= 0.0:
            raise InputError("Learning rate must be positive, got %g" % learning_rate)
        self.iterations       = int(iterations)
        self.learning_rate    = float(learning_rate)
        self.adam_beta1       = float(adam_beta1)
        self.adam_beta2       = float(adam_beta2)
        self.adam_eps         = float(adam_eps)
        self.seed             = int(seed)
        self.log_every        = int(log_every)
        self.ridge            = ridge
        self.checkpoint_every = int(checkpoint_every)
        self.output_dir       = output_dir
        self.loss_log         = loss_log
        self.run_label        = run_label

    def __repr__(self):
        return "TrainConfig(iterations=%d, lr=%g, betas=(%g, %g), eps=%g, seed=%d)" % \
               (self.iterations, self.learning_rate, self.adam_beta1, self.adam_beta2, self.adam_eps, self.seed)


class AdamState(object):
    """
    First and second moment estimates and the number of steps taken.
    """
    def __init__(self, size, m=None, v=None, step=0):
        self.m    = np.zeros(size) if m is None else m
        self.v    = np.zeros(size) if v is None else v
        self.step = step


class TrainResult(object):
    """
    Outcome of :py:func:`train`.  ``loss_history[i]`` is the best loss seen up to iteration i,
    ``raw_loss_history[i]`` the loss of iterate i itself.
    """
    def __init__(self, best_network, best_loss, loss_history, raw_loss_history, best_extra=None,
                 best_iteration=0, best_breakdown=None, final_network=None):
        self.best_network     = best_network
        self.best_loss        = best_loss
        self.loss_history     = np.asarray(loss_history)
        self.raw_loss_history = np.asarray(raw_loss_history)
        self.best_extra       = best_extra
        self.best_iteration   = best_iteration
        self.best_breakdown   = best_breakdown
        self.final_network    = final_network

    def __repr__(self):
        return "TrainResult(best_loss=%.6e at iteration %d of %d)" % (self.best_loss, self.best_iteration,
                                                                      len(self.raw_loss_history) - 1)


def adam_step(theta, grad, state, config):
    """
    One bias-corrected Adam update.

    :returns: (new theta, new :py:class:`AdamState`)
    :raises:  :py:class:`pinnlab.Error.NonFiniteGradient`
    """
    theta = np.asarray(theta, dtype=np.float64)
    grad  = np.asarray(grad, dtype=np.float64)
    if theta.shape != grad.shape or state.m.shape != theta.shape:
        raise DimensionMismatch("Adam step with theta %s, gradient %s and state %s" %
                                (str(theta.shape), str(grad.shape), str(state.m.shape)))
    if not np.all(np.isfinite(grad)):
        raise NonFiniteGradient("Non-finite gradient entering Adam step %d" % (state.step + 1))

    step  = state.step + 1
    b1    = config.adam_beta1
    b2    = config.adam_beta2
    m     = b1*state.m + (1.0 - b1)*grad
    v     = b2*state.v + (1.0 - b2)*grad*grad
    m_hat = m/(1.0 - b1**step)
    v_hat = v/(1.0 - b2**step)
    theta = theta - config.learning_rate*m_hat/(np.sqrt(v_hat) + config.adam_eps)
    return theta, AdamState(theta.size, m, v, step)


def _flush_log(rows, config):
    if config.loss_log and rows:
        Util.write_dataframe(pd.DataFrame(rows), "loss_log", config.loss_log, append=True)
    del rows[:]


def train(net, objective, config, extra=None):
    """
    Runs ``config.iterations`` Adam steps on the parameters of *net* (and *extra*), evaluating the objective
    before every step and once after the last.  The stored best iterate changes only on a strictly smaller loss.

    :param objective: callable taking a :py:class:`pinnlab.AutoDiff.ModelView`, see
                      :py:func:`pinnlab.AutoDiff.parameter_gradient`
    :param extra:     initial values of extra trainable scalars (e.g. PDE coefficients), or None
    :raises:          :py:class:`pinnlab.Error.NonFiniteLoss`, :py:class:`pinnlab.Error.KinkAtPoint`
    """
    if config.ridge is not None:
        objective = with_ridge(objective, config.ridge)

    num_params = net.num_parameters
    extra      = None if extra is None else np.array(extra, dtype=np.float64).reshape(-1)
    state      = AdamState(num_params + (0 if extra is None else extra.size))

    current        = net
    best_network   = net
    best_extra     = None if extra is None else extra.copy()
    best_loss      = float("inf")
    best_iteration = 0
    best_breakdown = None
    history        = []
    raw_history    = []
    rows           = []

    PinnLabLogger.info("Training %s, %d parameters%s, %s" % (str(net), num_params,
                       "" if extra is None else " + %d extra" % extra.size, str(config)))

    for iteration in range(config.iterations + 1):
        try:
            result = parameter_gradient(current, objective, extra)
        except KinkAtPoint as e:
            PinnLabLogger.fatal("Iteration %d: %s" % (iteration, str(e)))
            raise

        loss = result.objective_value
        if not np.isfinite(loss):
            PinnLabLogger.fatal("Iteration %d: loss is %s" % (iteration, str(loss)))
            raise NonFiniteLoss(iteration)

        raw_history.append(loss)
        if loss < best_loss:
            best_loss      = loss
            best_network   = current
            best_extra     = None if extra is None else extra.copy()
            best_iteration = iteration
            best_breakdown = result.breakdown
        history.append(best_loss)

        last = (iteration == config.iterations)
        if config.log_every > 0 and (iteration % config.log_every == 0 or last):
            row = {"run": config.run_label, "iteration": iteration, "raw_loss": loss, "best_loss": best_loss}
            breakdown = result.breakdown if result.breakdown is not None else LossBreakdown(pde_term=loss).values()
            for term in LossBreakdown.TERMS:
                row[term] = breakdown[term]
            if extra is not None:
                for idx, value in enumerate(extra):
                    row["extra_%d" % idx] = value
            rows.append(row)
            PinnLabLogger.info("%s iteration %7d: loss %.6e  best %.6e" % (config.run_label, iteration, loss, best_loss))
            if len(rows) >= TrainConfig.LOG_CHUNK_ROWS or last:
                _flush_log(rows, config)

        if config.checkpoint_every > 0 and config.output_dir and iteration > 0 and iteration % config.checkpoint_every == 0:
            best_network.save(os.path.join(config.output_dir, TrainConfig.CHECKPOINT_FILE % config.run_label), best_extra)

        if last:
            break

        vector = current.flatten() if extra is None else np.concatenate([current.flatten(), extra])
        vector, state = adam_step(vector, result.grad, state, config)
        current = current.with_parameters(vector[:num_params])
        if extra is not None:
            extra = vector[num_params:]

    _flush_log(rows, config)
    result = TrainResult(best_network, best_loss, history, raw_history, best_extra, best_iteration, best_breakdown, current)
    PinnLabLogger.info("Finished %s: %s" % (config.run_label, str(result)))
    return result
