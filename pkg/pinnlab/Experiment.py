"""
Experiment configuration: defaults per experiment, the key = value file, command line overrides.
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
import configparser
import os

import numpy as np

from .Activation import Activation
from .Error      import ConfigurationError
from .Logger     import PinnLabLogger
from .Losses     import LossWeights


class ExperimentConfig(object):
    """
    Settings of one experiment run.

    Values come from (lowest priority first) :py:attr:`ExperimentConfig.DEFAULTS`, the entry for the
    experiment in :py:attr:`ExperimentConfig.EXPERIMENT_DEFAULTS`, the configuration file and the
    ``key=value`` overrides.  The file holds ``key = value`` lines under an optional ``[pinnlab]`` header;
    ``#`` and ``;`` start comments.
    """
    #: Configuration file section
    SECTION                     = "pinnlab"

    #: File the effective configuration is echoed to, in the output directory
    OUTPUT_CONFIGURATION_FILE   = "pinnlab_output_config.txt"

    #: Experiments, one per command line subcommand
    EXPERIMENTS                 = ["poisson-fdm", "poisson-fdpinn", "poisson-adpinn",
                                   "schrodinger-ref", "schrodinger-fdpinn", "schrodinger-adpinn",
                                   "ns-datagen", "ns-inverse", "certify", "gradcheck", "example32"]

    #: Reported loss precision options
    PRECISION_OPTIONS           = ["float64", "float32"]

    #: Schroedinger reference solver options
    SCHRODINGER_METHOD_OPTIONS  = ["newton", "picard"]

    #: Heatmap color map options
    COLORMAP_OPTIONS            = ["gray", "heat"]

    #: Integer keys
    INT_KEYS    = ["seed", "width", "depth", "iterations", "log_every", "checkpoint_every", "nu", "q",
                   "eval_resolution", "interpolation_max_points",
                   "schrodinger_n", "schrodinger_t",
                   "ns_n", "ns_steps", "ns_snapshots", "ns_eval_refinement",
                   "certify_samples", "certify_smooth_r_f", "gradcheck_count"]
    #: Float keys
    FLOAT_KEYS  = ["learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
                   "alpha_f", "alpha_b", "alpha_d", "alpha_theta", "grid_h",
                   "ns_h_t", "ns_lambda1", "ns_lambda2", "ns_noise", "ns_w_div", "ns_lambda_init",
                   "certify_epsilon_factor", "certify_smooth_h", "certify_rel_tolerance",
                   "gradcheck_tolerance", "gradcheck_step",
                   "example32_a", "example32_u0"]
    #: Boolean keys
    BOOL_KEYS   = ["hard_bc", "alpha_b_sweep", "grid_equivalence", "write_images"]
    #: Comma separated float list keys
    LIST_KEYS   = ["alpha_b_values", "certify_lambdas", "example32_points"]
    #: String keys
    STRING_KEYS = ["experiment", "activation", "precision", "schrodinger_method", "colormap"]

    #: Defaults shared by every experiment, as configuration file strings
    DEFAULTS = {'experiment'               : '',
                'seed'                     : 0,
                'activation'               : 'tanh',
                'width'                    : 32,
                'depth'                    : 7,
                'iterations'               : 1000,
                'learning_rate'            : 1e-3,
                'adam_beta1'               : 0.9,
                'adam_beta2'               : 0.999,
                'adam_eps'                 : 1e-8,
                'log_every'                : 1000,
                'checkpoint_every'         : 0,
                'alpha_f'                  : 1.0,
                'alpha_b'                  : 1.0,
                'alpha_d'                  : 1.0,
                'nu'                       : 2,
                'alpha_theta'              : 0.0,
                'q'                        : 2,
                'hard_bc'                  : 'False',
                'alpha_b_sweep'            : 'False',
                'alpha_b_values'           : '1, 100, 10000',
                'grid_h'                   : 0.05,
                'eval_resolution'          : 101,
                'grid_equivalence'         : 'True',
                'interpolation_max_points' : 5000,
                'precision'                : 'float64',
                'write_images'             : 'True',
                'colormap'                 : 'heat',

                # schroedinger
                'schrodinger_n'            : 100,
                'schrodinger_t'            : 500,
                'schrodinger_method'       : 'picard',

                # navier-stokes
                'ns_n'                     : 32,
                'ns_steps'                 : 40,
                'ns_h_t'                   : 0.1,
                'ns_lambda1'               : 1.0,
                'ns_lambda2'               : 0.1,
                'ns_snapshots'             : 41,
                'ns_noise'                 : 0.0,
                'ns_w_div'                 : 1e-3,
                'ns_lambda_init'           : 0.5,
                'ns_eval_refinement'       : 5,

                # certification
                'certify_lambdas'          : '-10, -1, -0.1, 0.1, 1, 10',
                'certify_epsilon_factor'   : 0.25,
                'certify_samples'          : 1000,
                'certify_smooth_h'         : 0.5,
                'certify_smooth_r_f'       : 2,
                'certify_rel_tolerance'    : 1e-5,

                # gradient check
                'gradcheck_count'          : 100,
                'gradcheck_tolerance'      : 1e-5,
                'gradcheck_step'           : 1e-5,

                # one dimensional non-uniqueness example
                'example32_a'              : 1.0,
                'example32_u0'             : 0.0,
                'example32_points'         : '0.25, 0.5, 0.75',
               }

    #: Per experiment defaults: network sizes, iteration counts and grids of the reference runs
    EXPERIMENT_DEFAULTS = {
        'poisson-fdm'        : {},
        'poisson-fdpinn'     : {'activation': 'relu', 'width': 32,  'depth': 7,  'iterations': 200000, 'hard_bc': 'True'},
        'poisson-adpinn'     : {'activation': 'tanh', 'width': 32,  'depth': 7,  'iterations': 200000,
                                'alpha_b_sweep': 'True', 'hard_bc': 'True'},
        'schrodinger-ref'    : {},
        'schrodinger-fdpinn' : {'activation': 'relu', 'width': 100, 'depth': 20, 'iterations': 350000, 'hard_bc': 'True'},
        'schrodinger-adpinn' : {'activation': 'tanh', 'width': 100, 'depth': 4,  'iterations': 20000,  'hard_bc': 'True'},
        'ns-datagen'         : {},
        'ns-inverse'         : {'activation': 'relu', 'width': 100, 'depth': 9,  'iterations': 500000},
        'certify'            : {'activation': 'relu', 'width': 32,  'depth': 7},
        'gradcheck'          : {},
        'example32'          : {},
    }

    def __init__(self, experiment):
        if experiment not in ExperimentConfig.EXPERIMENTS:
            msg = "Unknown experiment [%s]. Expected one of %s" % (experiment, str(ExperimentConfig.EXPERIMENTS))
            PinnLabLogger.fatal(msg)
            raise ConfigurationError("external input", msg)
        self.experiment       = experiment
        #: the configuration file read, if any
        self.config_file      = None
        defaults = ExperimentConfig.experiment_defaults(experiment)
        for key in ExperimentConfig.all_keys():
            self._set_from_string(key, str(defaults[key]), "defaults")

    def __repr__(self):
        return "ExperimentConfig(%s, seed=%d)" % (self.experiment, self.seed)

    @staticmethod
    def all_keys():
        return (ExperimentConfig.STRING_KEYS + ExperimentConfig.INT_KEYS + ExperimentConfig.FLOAT_KEYS +
                ExperimentConfig.BOOL_KEYS + ExperimentConfig.LIST_KEYS)

    @staticmethod
    def experiment_defaults(experiment):
        """
        :py:attr:`DEFAULTS` with the experiment's entry of :py:attr:`EXPERIMENT_DEFAULTS` layered on top.
        """
        defaults = dict(ExperimentConfig.DEFAULTS)
        defaults.update(ExperimentConfig.EXPERIMENT_DEFAULTS[experiment])
        defaults['experiment'] = experiment
        return defaults

    def _set_from_string(self, key, value, source):
        """
        Parses *value* for *key* the way the typed configparser getters do.
        """
        try:
            if key in ExperimentConfig.INT_KEYS:
                parsed = int(value)
            elif key in ExperimentConfig.FLOAT_KEYS:
                parsed = float(value)
            elif key in ExperimentConfig.BOOL_KEYS:
                lowered = value.strip().lower()
                if lowered not in configparser.RawConfigParser.BOOLEAN_STATES:
                    raise ValueError("not a boolean: %s" % value)
                parsed = configparser.RawConfigParser.BOOLEAN_STATES[lowered]
            elif key in ExperimentConfig.LIST_KEYS:
                parsed = [float(item) for item in value.split(",") if item.strip()]
            else:
                parsed = value.strip()
        except ValueError as e:
            msg = "Could not parse %s = [%s]: %s" % (key, value, str(e))
            PinnLabLogger.fatal(msg)
            raise ConfigurationError(source, msg)
        setattr(self, key, parsed)

    @staticmethod
    def read_configuration(experiment, config_fullpath=None, overrides=None):
        """
        Reads the configuration for *experiment* from *config_fullpath* (if given) and applies *overrides*,
        a list of ``key=value`` strings.

        :returns: a validated :py:class:`ExperimentConfig`
        :raises:  :py:class:`pinnlab.Error.ConfigurationError`
        """
        config  = ExperimentConfig(experiment)
        parser  = configparser.RawConfigParser(defaults=dict((key, str(val)) for key, val in
                                                             ExperimentConfig.experiment_defaults(experiment).items()),
                                               inline_comment_prefixes=("#", ";"))
        section = ExperimentConfig.SECTION
        source  = "defaults"

        if config_fullpath:
            if not os.path.exists(config_fullpath):
                msg = "Configuration file [%s] not found" % config_fullpath
                PinnLabLogger.fatal(msg)
                raise ConfigurationError(config_fullpath, msg)
            PinnLabLogger.info("Reading configuration file %s" % config_fullpath)
            with open(config_fullpath, 'r') as config_file:
                text = config_file.read()
            if not any(line.strip().startswith("[") for line in text.splitlines()):
                text = "[%s]\n%s" % (section, text)
            try:
                parser.read_string(text, source=config_fullpath)
            except configparser.Error as e:
                msg = "Could not parse configuration: %s" % str(e).replace("\n", " ")
                PinnLabLogger.fatal(msg)
                raise ConfigurationError(config_fullpath, msg)
            config.config_file = config_fullpath
            source             = config_fullpath

            for other in parser.sections():
                if other != section:
                    msg = "Unknown section [%s]; only [%s] is read" % (other, section)
                    PinnLabLogger.fatal(msg)
                    raise ConfigurationError(config_fullpath, msg)

        if not parser.has_section(section):
            parser.add_section(section)

        known = set(ExperimentConfig.all_keys())
        for key in parser.options(section):
            if key not in known:
                msg = "Unknown configuration key [%s]" % key
                PinnLabLogger.fatal(msg)
                raise ConfigurationError(source, msg)

        for override in (overrides or []):
            if "=" not in override:
                msg = "Override [%s] is not of the form key=value" % override
                PinnLabLogger.fatal(msg)
                raise ConfigurationError("external override", msg)
            key, value = [part.strip() for part in override.split("=", 1)]
            if key not in known:
                msg = "Unknown configuration key [%s] in override" % key
                PinnLabLogger.fatal(msg)
                raise ConfigurationError("external override", msg)
            parser.set(section, key, value)
            PinnLabLogger.debug("Override %s = %s" % (key, value))

        if parser.get(section, 'experiment') != experiment:
            msg = "Configuration names experiment [%s] but [%s] was requested" % (parser.get(section, 'experiment'), experiment)
            PinnLabLogger.fatal(msg)
            raise ConfigurationError(source, msg)

        for key in ExperimentConfig.all_keys():
            config._set_from_string(key, parser.get(section, key), source)
        config.validate(source)
        return config

    def validate(self, source="external input"):
        """
        Checks ranges and option values; logs fatal and raises :py:class:`pinnlab.Error.ConfigurationError`.
        """
        problems = []
        if self.activation not in Activation.TAGS:
            problems.append("activation [%s] not one of %s" % (self.activation, str(Activation.TAGS)))
        if self.precision not in ExperimentConfig.PRECISION_OPTIONS:
            problems.append("precision [%s] not one of %s" % (self.precision, str(ExperimentConfig.PRECISION_OPTIONS)))
        if self.schrodinger_method not in ExperimentConfig.SCHRODINGER_METHOD_OPTIONS:
            problems.append("schrodinger_method [%s] not one of %s" % (self.schrodinger_method, str(ExperimentConfig.SCHRODINGER_METHOD_OPTIONS)))
        if self.colormap not in ExperimentConfig.COLORMAP_OPTIONS:
            problems.append("colormap [%s] not one of %s" % (self.colormap, str(ExperimentConfig.COLORMAP_OPTIONS)))
        if self.nu not in LossWeights.NU_OPTIONS:
            problems.append("nu must be one of %s, got %d" % (str(LossWeights.NU_OPTIONS), self.nu))
        if self.q not in LossWeights.Q_OPTIONS:
            problems.append("q must be one of %s, got %d" % (str(LossWeights.Q_OPTIONS), self.q))
        for key in ["width", "depth", "iterations", "eval_resolution", "schrodinger_n", "schrodinger_t",
                    "ns_n", "ns_steps", "ns_snapshots", "ns_eval_refinement", "certify_samples", "gradcheck_count"]:
            if getattr(self, key) < 1:
                problems.append("%s must be at least 1, got %d" % (key, getattr(self, key)))
        for key in ["log_every", "checkpoint_every", "interpolation_max_points", "certify_smooth_r_f"]:
            if getattr(self, key) < 0:
                problems.append("%s must be nonnegative, got %d" % (key, getattr(self, key)))
        for key in ["learning_rate", "grid_h", "ns_h_t", "ns_lambda2", "certify_epsilon_factor", "certify_smooth_h",
                    "certify_rel_tolerance", "gradcheck_tolerance", "gradcheck_step", "adam_eps"]:
            if not getattr(self, key) > 0.0:
                problems.append("%s must be positive, got %g" % (key, getattr(self, key)))
        for key in ["alpha_f", "alpha_b", "alpha_d", "alpha_theta", "ns_noise", "ns_w_div"]:
            if getattr(self, key) < 0.0:
                problems.append("%s must be nonnegative, got %g" % (key, getattr(self, key)))
        for key in ["adam_beta1", "adam_beta2"]:
            if not 0.0 <= getattr(self, key) < 1.0:
                problems.append("%s must lie in [0, 1), got %g" % (key, getattr(self, key)))
        if self.ns_snapshots > self.ns_steps + 1 or self.ns_snapshots < 2:
            problems.append("ns_snapshots must lie in [2, ns_steps + 1 = %d], got %d" % (self.ns_steps + 1, self.ns_snapshots))
        if self.certify_epsilon_factor >= 0.5:
            problems.append("certify_epsilon_factor must be below 0.5, got %g" % self.certify_epsilon_factor)
        if self.alpha_b_sweep and len(self.alpha_b_values) == 0:
            problems.append("alpha_b_sweep needs alpha_b_values")
        if any(val < 0 for val in self.alpha_b_values):
            problems.append("alpha_b_values must be nonnegative, got %s" % str(self.alpha_b_values))
        if self.experiment == "schrodinger-adpinn" and not self.hard_bc:
            problems.append("schrodinger-adpinn imposes the initial condition through the hard anchor; hard_bc must be True")
        if self.experiment == "certify" and self.activation != "relu":
            problems.append("certify builds the tent witness on a ReLU network; activation must be relu")

        for problem in problems:
            PinnLabLogger.fatal(problem)
        if problems:
            raise ConfigurationError(source, "; ".join(problems))

    def loss_weights(self, alpha_b=None):
        """
        :py:class:`pinnlab.Losses.LossWeights` from the configured weights, optionally with another alpha_B.
        """
        return LossWeights(alpha_F     = self.alpha_f,
                           alpha_B     = self.alpha_b if alpha_b is None else alpha_b,
                           alpha_D     = self.alpha_d,
                           nu          = self.nu,
                           alpha_theta = self.alpha_theta,
                           q           = self.q)

    def hidden_widths(self):
        return (self.width,)*self.depth

    @property
    def dtype(self):
        return np.float32 if self.precision == "float32" else np.float64

    def format_value(self, key):
        """
        Configuration file string of the value of *key*.
        """
        value = getattr(self, key)
        if key in ExperimentConfig.INT_KEYS:
            return '%d' % value
        if key in ExperimentConfig.FLOAT_KEYS:
            return '%.17g' % value
        if key in ExperimentConfig.BOOL_KEYS:
            return 'True' if value else 'False'
        if key in ExperimentConfig.LIST_KEYS:
            return ', '.join('%.17g' % item for item in value)
        return value

    def to_dict(self):
        """
        The effective values, keyed and sorted by name, for the metrics file.
        """
        return dict((key, getattr(self, key)) for key in sorted(ExperimentConfig.all_keys()))

    def write_configuration(self, output_dir):
        """
        Write the configuration parameters to function as a record with the output.
        """
        parser = configparser.RawConfigParser()
        parser.add_section(ExperimentConfig.SECTION)
        for key in sorted(ExperimentConfig.all_keys()):
            parser.set(ExperimentConfig.SECTION, key, self.format_value(key))

        output_file = open(os.path.join(output_dir, ExperimentConfig.OUTPUT_CONFIGURATION_FILE), 'w')
        parser.write(output_file)
        output_file.close()
        PinnLabLogger.info("Wrote %s" % os.path.join(output_dir, ExperimentConfig.OUTPUT_CONFIGURATION_FILE))
