"""
Functions to simplify running pinnlab experiments.
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
import argparse
import os
import sys

from .Error      import ConfigurationError, Error
from .Experiment import ExperimentConfig
from .Logger     import PinnLabLogger
from .PinnLab    import PinnLab


def run_setup(experiment,
              output_dir,
              config_file   = None,
              overrides     = None,
              log_to_console= True,

              **kwargs):
    """
    Reads the experiment configuration and creates the output directory.
    Keyword arguments named like configuration keys override the configuration file, after *overrides*.

    Named Keyword arguments:
        experiment -- one of :py:attr:`pinnlab.Experiment.ExperimentConfig.EXPERIMENTS` (required)
        output_dir -- where to write outputs (required). Will be created if it doesn't already exist.

        config_file -- key = value configuration file
        overrides -- list of "key=value" strings applied after the configuration file
        log_to_console -- echo INFO logging to the console (default: True)

    Unnamed keyword arguments:
        any configuration key, e.g. iterations=20000 or seed=3
    """
    if not experiment:
        msg = "Must specify an experiment"
        PinnLabLogger.fatal(msg)
        raise ConfigurationError("external input", msg)

    if experiment not in ExperimentConfig.EXPERIMENTS:
        msg = "experiment [%s] not defined. Expected values: %s" % (experiment, ExperimentConfig.EXPERIMENTS)
        PinnLabLogger.fatal(msg)
        raise ConfigurationError("external input", msg)

    if not output_dir:
        msg = "Must specify where to write outputs"
        PinnLabLogger.fatal(msg)
        raise ConfigurationError("external input", msg)

    # create folder if it doesn't already exist
    if not os.path.exists(output_dir):
        print("Creating output dir [%s]" % output_dir)
        os.makedirs(output_dir)

    all_overrides = list(overrides or [])
    for key in sorted(kwargs.keys()):
        if kwargs[key] is None:
            continue
        value = kwargs[key]
        if isinstance(value, (list, tuple)):
            value = ", ".join(str(item) for item in value)
        all_overrides.append("%s=%s" % (key, value))

    config = ExperimentConfig.read_configuration(experiment, config_file, all_overrides)
    return PinnLab(config, output_dir, logToConsole=log_to_console)


def run_pinnlab(**kwargs):
    """
    Wrapper function to set up and run one experiment.  Takes the arguments of :py:func:`run_setup`.

    :returns: the metrics dictionary
    """
    lab = run_setup(**kwargs)
    return lab.run()


USAGE = r"""

  pinnlab <experiment> --config <file> [--set key=value ...] --out <dir>

  Runs one experiment and writes metrics.json, loss.csv, field CSVs and PPM heatmaps to the output directory.

  Experiments: %s

  Exit codes: 0 success, 1 configuration or input error, 2 numerical failure, 3 certification failure.

""" % ", ".join(ExperimentConfig.EXPERIMENTS)


def main(argv=None):
    """
    Does arg parsing for command line interface.

    :returns: the process exit code
    """

    def str2bool(v):
        return v.lower() in ("yes", "true", "t", "1")

    parser = argparse.ArgumentParser(prog="pinnlab", usage=USAGE)
    parser.register('type','bool',str2bool)
    parser.add_argument("experiment",   choices=ExperimentConfig.EXPERIMENTS, help="Experiment to run")
    parser.add_argument('-c','--config', type=str,  help="key = value configuration file")
    parser.add_argument('-s','--set',    type=str,  action='append', dest='overrides', metavar='KEY=VALUE',
                        help="Override a configuration value; may be repeated")
    parser.add_argument('-o','--out',    type=str,  required=True, dest='output_dir', help="Output directory")
    parser.add_argument('-q','--quiet',  action='store_true', help="Do not echo the info log to the console")
    parser.add_argument('--seed',        type=int,  help="Random seed")
    parser.add_argument('--iterations',  type=int,  help="Training iterations")
    parser.add_argument('--precision',   choices=ExperimentConfig.PRECISION_OPTIONS, help="Precision of the reported losses")
    parser.add_argument('--write_images',type='bool', help="Write PPM heatmaps")

    args = parser.parse_args(sys.argv[1:] if argv is None else argv)

    # don't pass on items that aren't set
    args_dict = vars(args)
    for key in list(args_dict.keys()):
        if args_dict[key] is None: del args_dict[key]

    args_dict["config_file"]    = args_dict.pop("config", None)
    args_dict["log_to_console"] = not args_dict.pop("quiet")

    try:
        run_pinnlab(**args_dict)
    except Error as e:
        PinnLabLogger.fatal("%s: %s" % (e.__class__.__name__, str(e)))
        print("pinnlab %s failed: %s" % (args.experiment, str(e)), file=sys.stderr)
        return e.EXIT_CODE
    return 0


if __name__ == "__main__":
    sys.exit(main())
