import os

import numpy as np
import pandas as pd
import pytest

from pinnlab.Activation import Tanh
from pinnlab.Collocation import CollocationSet
from pinnlab.Error import DimensionMismatch, InputError, NonFiniteGradient, NonFiniteLoss
from pinnlab.Losses import LossBreakdown, LossWeights, adpinn_objective
from pinnlab.Network import Network, init_network
from pinnlab.Optimize import AdamState, TrainConfig, adam_step, train

DATA_POINTS  = np.array([[-0.8], [-0.3], [0.1], [0.6], [0.9]])
DATA_TARGETS = np.sin(2.0*DATA_POINTS)


def data_objective():
    colloc = CollocationSet([[0.0]], [], DATA_POINTS, DATA_TARGETS)
    return adpinn_objective(colloc, None, None, LossWeights())


@pytest.mark.travis
def test_adam_first_step_is_signed():
    config = TrainConfig(1, learning_rate=0.01)
    theta  = np.array([1.0, -2.0, 0.5])
    grad   = np.array([3.0, -0.25, 0.0])
    new, state = adam_step(theta, grad, AdamState(3), config)
    assert state.step == 1
    assert np.allclose(new, [0.99, -1.99, 0.5], atol=1e-8)

    with pytest.raises(NonFiniteGradient):
        adam_step(theta, np.array([np.nan, 0.0, 0.0]), AdamState(3), config)
    with pytest.raises(DimensionMismatch):
        adam_step(theta, grad[:2], AdamState(3), config)


@pytest.mark.travis
@pytest.mark.parametrize("iterations,learning_rate", [(0, 1e-3), (10, 0.0), (10, -1.0)])
def test_train_config_errors(iterations, learning_rate):
    with pytest.raises(InputError):
        TrainConfig(iterations, learning_rate)


@pytest.mark.travis
def test_train_tracks_best_iterate(tmp_path):
    output_dir = str(tmp_path)
    loss_log   = os.path.join(output_dir, "loss.csv")
    net        = init_network((1, 8, 1), Tanh(), 3)
    config     = TrainConfig(200, learning_rate=1e-2, log_every=50, checkpoint_every=100,
                             output_dir=output_dir, loss_log=loss_log, run_label="fit")
    result     = train(net, data_objective(), config)
    print(result)

    assert len(result.loss_history) == 201
    assert len(result.raw_loss_history) == 201
    assert np.all(np.diff(result.loss_history) <= 0.0)
    assert result.best_loss == np.min(result.raw_loss_history)
    assert result.best_loss == result.raw_loss_history[result.best_iteration]
    assert result.best_loss < 0.5*result.raw_loss_history[0]
    assert result.best_breakdown["data_term"] == pytest.approx(result.best_loss)

    log = pd.read_csv(loss_log)
    assert list(log.columns) == ["run", "iteration", "raw_loss", "best_loss"] + LossBreakdown.TERMS
    assert log["iteration"].tolist() == [0, 50, 100, 150, 200]
    assert set(log["run"]) == set(["fit"])

    checkpoint = os.path.join(output_dir, TrainConfig.CHECKPOINT_FILE % "fit")
    assert os.path.exists(checkpoint)
    assert Network.load(checkpoint).num_parameters == net.num_parameters


@pytest.mark.travis
def test_train_extra_scalars(tmp_path):
    loss_log = os.path.join(str(tmp_path), "loss.csv")

    def objective(view):
        gap = view.extra[0] - 2.0
        return LossBreakdown(data_term=gap*gap + 0.0*view.eval(DATA_POINTS).sum())

    net    = init_network((1, 2, 1), Tanh(), 0)
    config = TrainConfig(400, learning_rate=0.05, log_every=100, loss_log=loss_log, run_label="extra")
    result = train(net, objective, config, extra=[0.0])
    assert abs(result.best_extra[0] - 2.0) < 0.1
    log = pd.read_csv(loss_log)
    assert "extra_0" in log.columns
    assert log["extra_0"].iloc[0] == 0.0


@pytest.mark.travis
def test_train_non_finite_loss():
    def objective(view):
        return LossBreakdown(data_term=float("inf"))

    with pytest.raises(NonFiniteLoss):
        train(init_network((1, 2, 1), Tanh(), 0), objective, TrainConfig(5, log_every=0))
