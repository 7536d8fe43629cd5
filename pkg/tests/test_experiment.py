import os

import pytest

from pinnlab.Error import ConfigurationError
from pinnlab.Experiment import ExperimentConfig


def write_config(tmp_path, text, name="run.conf"):
    path = os.path.join(str(tmp_path), name)
    with open(path, "w") as config_file:
        config_file.write(text)
    return path


@pytest.mark.travis
@pytest.mark.parametrize("experiment", ExperimentConfig.EXPERIMENTS)
def test_defaults_validate(experiment):
    config = ExperimentConfig.read_configuration(experiment)
    assert config.experiment == experiment
    assert config.seed == 0
    assert config.nu == 2
    assert config.certify_lambdas == [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0]
    assert len(config.to_dict()) == len(ExperimentConfig.all_keys())


@pytest.mark.travis
def test_experiment_defaults_layer():
    fdpinn = ExperimentConfig.read_configuration("poisson-fdpinn")
    assert fdpinn.activation == "relu"
    assert fdpinn.hard_bc is True
    assert fdpinn.iterations == 200000
    assert fdpinn.hidden_widths() == (32,)*7

    schrodinger = ExperimentConfig.read_configuration("schrodinger-fdpinn")
    assert schrodinger.width == 100 and schrodinger.depth == 20
    # lagged-nonlinearity fixed point unless newton is asked for
    assert schrodinger.schrodinger_method == "picard"


@pytest.mark.travis
@pytest.mark.parametrize("header", ["", "[pinnlab]\n"])
def test_file_with_and_without_header(tmp_path, header):
    path   = write_config(tmp_path, header + "grid_h = 0.1   # coarser\niterations = 20000\nhard_bc = yes\n"
                                              "alpha_b_values = 1, 10\n")
    config = ExperimentConfig.read_configuration("poisson-fdpinn", path)
    assert config.grid_h == 0.1
    assert config.iterations == 20000
    assert config.hard_bc is True
    assert config.alpha_b_values == [1.0, 10.0]
    assert config.config_file == path


@pytest.mark.travis
def test_overrides_after_file(tmp_path):
    path   = write_config(tmp_path, "seed = 3\n")
    config = ExperimentConfig.read_configuration("gradcheck", path, ["seed=7", " gradcheck_count = 12 "])
    assert config.seed == 7
    assert config.gradcheck_count == 12


@pytest.mark.travis
@pytest.mark.parametrize("text", ["bogus = 1\n",
                                  "[other]\nseed = 1\n",
                                  "seed = three\n",
                                  "hard_bc = maybe\n",
                                  "experiment = certify\n",
                                  "activation = swish\n",
                                  "nu = 3\n",
                                  "learning_rate = 0\n",
                                  "ns_snapshots = 1\n",
                                  "certify_epsilon_factor = 0.5\n",
                                  "adam_beta1 = 1.0\n"])
def test_bad_files(tmp_path, text):
    path = write_config(tmp_path, text)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("poisson-fdpinn", path)


@pytest.mark.travis
def test_bad_inputs(tmp_path):
    with pytest.raises(ConfigurationError):
        ExperimentConfig("poisson")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("poisson-fdm", os.path.join(str(tmp_path), "missing.conf"))
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("poisson-fdm", None, ["seed"])
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("poisson-fdm", None, ["not_a_key=1"])
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("schrodinger-adpinn", None, ["hard_bc=False"])
    with pytest.raises(ConfigurationError):
        ExperimentConfig.read_configuration("certify", None, ["activation=tanh"])


@pytest.mark.travis
def test_loss_weights_and_dtype():
    config = ExperimentConfig.read_configuration("poisson-adpinn", None, ["alpha_b=100", "nu=1", "precision=float32"])
    w = config.loss_weights()
    assert w.alpha_B == 100.0 and w.nu == 1
    assert config.loss_weights(alpha_b=5.0).alpha_B == 5.0
    assert config.dtype.__name__ == "float32"


@pytest.mark.travis
def test_write_configuration_reads_back(tmp_path):
    config = ExperimentConfig.read_configuration("ns-inverse", None, ["ns_noise=0.01", "ns_lambda_init=0.25"])
    config.write_configuration(str(tmp_path))
    path   = os.path.join(str(tmp_path), ExperimentConfig.OUTPUT_CONFIGURATION_FILE)
    again  = ExperimentConfig.read_configuration("ns-inverse", path)
    assert again.to_dict() == config.to_dict()


CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "pinnlab", "configs")


@pytest.mark.travis
@pytest.mark.parametrize("filename,experiment", [("poisson_fdpinn_reduced.conf", "poisson-fdpinn"),
                                                 ("poisson_adpinn_sweep.conf",   "poisson-adpinn"),
                                                 ("schrodinger_grid.conf",       "schrodinger-ref"),
                                                 ("ns_inverse_reduced.conf",     "ns-inverse"),
                                                 ("ns_inverse_noisy.conf",       "ns-inverse"),
                                                 ("certify_coarse.conf",         "certify")])
def test_shipped_configurations(filename, experiment):
    config = ExperimentConfig.read_configuration(experiment, os.path.join(CONFIG_DIR, filename))
    print(config)
    assert config.config_file.endswith(filename)
