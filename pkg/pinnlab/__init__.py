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

__version__ = "0.1.1"

from .Activation   import Activation, ReLU, Sigmoid, SmoothActivation, Tanh
from .AutoDiff     import Jet2, ModelView, ParameterGradient, Variable, eval_jet2, fd_gradient_oracle, \
                          jet_fd_oracle, parameter_gradient
from .Collocation  import CollocationSet, StructuredGrid, build_interval_grid, build_periodic_grid, \
                          build_slit_domain, core_subgrids, interval_collocation
from .Error        import Error, ConfigurationError, InputError, NumericalError, CertificationError
from .Experiment   import ExperimentConfig
from .Logger       import PinnLabLogger, setupLogging
from .Losses       import DiscreteResidual, GridData, LossBreakdown, LossWeights, ResidualForm, adpinn_loss, \
                          adpinn_objective, fd_loss, fdpinn_loss, fdpinn_objective, ridge_penalty
from .NavierStokes import FlowObservations, inject_noise, ns_generate_data, ns_inverse_loss, ns_inverse_objective
from .Network      import ConstrainedNetwork, Network, deepen_relu_identity, init_network, linear_combine, \
                          wrap_hard_constraint
from .Optimize     import TrainConfig, TrainResult, adam_step, train
from .Performance  import Performance
from .PinnLab      import PinnLab
from .Poisson      import DiscreteSystem, assemble_poisson_slit, solve_poisson_fdm
from .Run          import run_pinnlab, main
from .Schrodinger  import SchrodingerSolver, solve_schrodinger_fdm
from .Util         import Util
from .Witness      import HyperplaneFamily, WitnessNetwork, build_hermite_1d, build_null_witness_relu, \
                          build_null_witness_smooth, certify_nonuniqueness, example32_minimizers, \
                          interpolate_values, vandermonde_directions

__all__ = [
    'Activation', 'ReLU', 'Sigmoid', 'SmoothActivation', 'Tanh',
    'CollocationSet', 'StructuredGrid',
    'ConstrainedNetwork', 'Network',
    'ExperimentConfig',
    'LossBreakdown', 'LossWeights', 'ResidualForm',
    'PinnLab',
    'PinnLabLogger', 'setupLogging',
    'Performance',
    'main', 'run_pinnlab',
    'TrainConfig', 'TrainResult',
    'Util',
    'WitnessNetwork',
]
