"""
Experiment drivers: one method per subcommand, each writing its fields, loss log and metrics to the output directory.
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

from .Activation   import Activation, ReLU, Tanh
from .AutoDiff     import eval_jet2, fd_gradient_oracle, jet_fd_oracle, parameter_gradient
from .Collocation  import CollocationSet, build_interval_grid, build_slit_domain, interval_collocation
from .Error        import CertificationError, Error
from .Logger       import PinnLabLogger, setupLogging
from .Losses       import LossWeights, adpinn_loss, adpinn_objective, evaluate_in_precision, fdpinn_loss, fdpinn_objective
from .NavierStokes import DIVERGENCE_TOLERANCE, FlowObservations, inject_noise, ns_generate_data, \
                          ns_inverse_objective, remove_level_means, space_time_points, trajectory_dataframe
from .Network      import init_network, wrap_hard_constraint
from .Optimize     import TrainConfig, train
from .Performance  import Performance
from .Poisson      import POISSON_BOUNDARY, POISSON_RESIDUAL, PoissonResidualFD, assemble_poisson_slit, \
                          evaluation_points, poisson_hard_constraint, solve_poisson_fdm
from .Schrodinger  import SCHRODINGER_PERIODIC, SCHRODINGER_RESIDUAL, SNAPSHOT_TIMES, SchrodingerResidualFD, \
                          schrodinger_ad_collocation, schrodinger_hard_constraint, snapshot_table, \
                          solve_schrodinger_fdm, trajectory_residual, trajectory_values
from .Util         import Util
from .Witness      import build_null_witness_relu, build_null_witness_smooth, certify_nonuniqueness, \
                          example32_minimizers, interpolate_values, sample_points, tent_depth_bound


class PinnLab(object):
    """
    Runs one experiment of an :py:class:`pinnlab.Experiment.ExperimentConfig` into an output directory.
    """
    #: Info log filename.  Writes brief information about program progression here.
    INFO_LOG                = "pinnlab_info.log"

    #: Debug log filename.  Detailed output goes here, including solver and witness diagnostics.
    DEBUG_LOG               = "pinnlab_debug.log"

    #: Metrics file, sorted keys and no timestamps
    METRICS_FILE            = "metrics.json"

    #: Loss log of every training run of the experiment, with a ``run`` column
    LOSS_LOG_FILE           = "loss.csv"

    #: Network checkpoint of a training run's best iterate
    NETWORK_FILE            = "network_%s.npz"

    #: Loss after 200 000 iterations reported for the full-scale Poisson runs, by run label
    POISSON_REFERENCE_LOSSES = {"alpha_b_1": 0.0047, "alpha_b_100": 6.9656e-6, "alpha_b_10000": 3.8e-4, "hard_bc": 5.8781e-8}

    #: Relative L2 error of the full-scale Schroedinger FD-PINN against an external reference
    SCHRODINGER_REFERENCE_L2 = 6.4e-2

    #: Recovered NS coefficients reported for the full-scale run (clean data)
    NS_REFERENCE_LAMBDAS     = {"lambda1": 0.9522, "lambda2": 0.0960}

    #: Largest FD-PINN loss of an interpolated grid solution accepted by the grid equivalence check
    GRID_EQUIVALENCE_TOLERANCE = 1e-8

    #: Smallest |pre-activation| the gradient check accepts at probe points of ReLU networks
    GRADCHECK_KINK_CLEARANCE   = 1e-2

    #: Network draws per gradient check case before giving up on a kink-free configuration
    GRADCHECK_MAX_DRAWS        = 50

    def __init__(self, config, output_dir, logToConsole=True, appendLog=False):
        """
        Sets up logging into *output_dir* (which must exist) and the performance record.
        """
        self.config      = config
        self.output_dir  = output_dir

        setupLogging(os.path.join(output_dir, PinnLab.INFO_LOG),
                     os.path.join(output_dir, PinnLab.DEBUG_LOG),
                     logToConsole=logToConsole, append=appendLog)

        self.performance = Performance()
        #: everything that ends up in :py:attr:`METRICS_FILE`
        self.metrics     = {"experiment": config.experiment, "config": config.to_dict()}
        #: descriptions of failed checks; a nonempty list makes :py:meth:`run` raise
        self.failures    = []

    def output_path(self, filename):
        return os.path.join(self.output_dir, filename)

    def run(self):
        """
        Runs the configured experiment and writes :py:attr:`METRICS_FILE` and the performance record,
        also when the experiment fails.

        :returns: the metrics dictionary
        :raises:  :py:class:`pinnlab.Error.CertificationError` if any check did not pass,
                  or the error the experiment raised
        """
        experiment = self.config.experiment
        handler    = getattr(self, "run_%s" % experiment.replace("-", "_"))
        PinnLabLogger.info("Running experiment %s into %s" % (experiment, self.output_dir))

        self.config.write_configuration(self.output_dir)
        loss_log = self.output_path(PinnLab.LOSS_LOG_FILE)
        if os.path.exists(loss_log):
            os.remove(loss_log)

        try:
            handler()
        except Error as e:
            self.metrics["status"] = "error"
            self.metrics["error"]  = "%s: %s" % (e.__class__.__name__, str(e))
            raise
        finally:
            if "status" not in self.metrics:
                self.metrics["status"] = "failed" if self.failures else "ok"
            self.metrics["failures"] = self.failures
            Util.write_json(self.metrics, "metrics", self.output_path(PinnLab.METRICS_FILE))
            self.performance.write(self.output_dir)

        if self.failures:
            for failure in self.failures:
                PinnLabLogger.fatal(failure)
            raise CertificationError("%d check(s) failed: %s" % (len(self.failures), "; ".join(self.failures)), self.metrics)
        PinnLabLogger.info("Experiment %s finished" % experiment)
        return self.metrics

    def check(self, passed, description):
        """
        Records a failed check; returns *passed*.
        """
        passed = bool(passed)
        if not passed:
            self.failures.append(description)
        PinnLabLogger.info("Check %s: %s" % ("passed" if passed else "FAILED", description))
        return passed

    # ------------------------------------------------------------------ shared pieces

    def build_network(self, input_dim, output_dim, activation=None, seed=None):
        widths = (input_dim,) + self.config.hidden_widths() + (output_dim,)
        return init_network(widths, Activation.from_tag(activation or self.config.activation),
                            self.config.seed if seed is None else seed)

    def train_network(self, net, objective, label, extra=None):
        """
        Trains with the configured Adam settings, appending to the shared loss log and saving the best iterate.
        """
        ridge = self.config.loss_weights() if self.config.alpha_theta > 0 else None
        train_config = TrainConfig(self.config.iterations,
                                   learning_rate    = self.config.learning_rate,
                                   adam_beta1       = self.config.adam_beta1,
                                   adam_beta2       = self.config.adam_beta2,
                                   adam_eps         = self.config.adam_eps,
                                   seed             = self.config.seed,
                                   log_every        = self.config.log_every,
                                   ridge            = ridge,
                                   checkpoint_every = self.config.checkpoint_every,
                                   output_dir       = self.output_dir,
                                   loss_log         = self.output_path(PinnLab.LOSS_LOG_FILE),
                                   run_label        = label)
        self.performance.record_step_start(label, "train")
        result = train(net, objective, train_config, extra)
        self.performance.record_step_end(label)
        result.best_network.save(self.output_path(PinnLab.NETWORK_FILE % label), result.best_extra)
        return result

    def training_report(self, result, objective, extra=None):
        """
        Best loss, its iteration and terms; single precision re-evaluation when configured.
        """
        report = {"best_loss":      result.best_loss,
                  "best_iteration": result.best_iteration,
                  "initial_loss":   float(result.raw_loss_history[0]),
                  "iterations":     len(result.raw_loss_history) - 1,
                  "breakdown":      result.best_breakdown}
        if self.config.precision == "float32":
            report["float32"] = evaluate_in_precision(result.best_network, objective, np.float32, extra).values()
        return report

    def write_field(self, name, df):
        Util.write_dataframe(df, name, self.output_path("%s.csv" % name))

    def write_image(self, name, field, colormap=None):
        if not self.config.write_images:
            return
        Util.write_ppm(field, self.output_path("%s.ppm" % name), colormap or self.config.colormap)

    # ------------------------------------------------------------------ poisson

    def poisson_setup(self):
        """
        Slit grid, collocation set, assembled system and FDM solution at all nodes.
        """
        self.performance.record_step_start("poisson", "build_slit_domain")
        grid, colloc = build_slit_domain(self.config.grid_h)
        self.performance.record_step_start("poisson", "solve_poisson_fdm")
        system = assemble_poisson_slit(grid, colloc)
        u_fdm  = solve_poisson_fdm(system)
        self.performance.record_step_end("poisson")
        return grid, colloc, system, u_fdm

    def write_poisson_image(self, name, values, resolution):
        # values in evaluation_points order (x slowest); image rows run from y = 1 down to y = -1
        self.write_image(name, np.asarray(values).reshape(resolution, resolution).T[::-1])

    def evaluate_poisson_network(self, net, name):
        resolution = self.config.eval_resolution
        points     = evaluation_points(resolution)
        values     = net.eval(points)[:, 0]
        self.write_field(name, pd.DataFrame({"x": points[:, 0], "y": points[:, 1], "u": values}))
        self.write_poisson_image(name, values, resolution)

    def run_poisson_fdm(self):
        """
        Finite-difference solution of the slit Poisson problem, its heatmap and the grid equivalence check.
        """
        grid, colloc, system, u_fdm = self.poisson_setup()
        nodes    = grid.node_coordinates()
        relative = float(np.linalg.norm(system.matrix.dot(u_fdm[system.node_map]) - system.rhs)/np.linalg.norm(system.rhs))

        self.metrics["grid"] = {"h":            self.config.grid_h,
                                "num_nodes":    grid.num_nodes,
                                "num_interior": colloc.num_interior,
                                "num_boundary": colloc.num_boundary,
                                "num_slit":     colloc.boundary_class.count("slit"),
                                "num_outer":    colloc.boundary_class.count("outer")}
        self.metrics["solve"] = {"relative_residual": relative, "max_u": float(np.max(u_fdm))}
        PinnLabLogger.info("Slit grid: %d nodes, %d interior, %d boundary" % (grid.num_nodes, colloc.num_interior, colloc.num_boundary))

        self.write_field("poisson_fdm_solution", pd.DataFrame({"x": nodes[:, 0], "y": nodes[:, 1], "u": u_fdm}))
        self.write_field("collocation", colloc.to_dataframe())
        self.write_image("poisson_fdm_solution", u_fdm.reshape(grid.shape).T[::-1])

        self.check(relative <= system.SOLVE_TOLERANCE, "FDM relative residual %.3e <= %.1e" % (relative, system.SOLVE_TOLERANCE))
        if self.config.grid_equivalence:
            D_res = PoissonResidualFD(grid, colloc, system)
            self.metrics["grid_equivalence"] = self.grid_equivalence(nodes, u_fdm, colloc, D_res)

    def grid_equivalence(self, nodes, values, colloc, D_res):
        """
        Interpolates grid values with a one hidden layer ReLU network and evaluates its FD-PINN loss.
        """
        if len(nodes) > self.config.interpolation_max_points:
            PinnLabLogger.warning("Skipping grid equivalence: %d nodes > interpolation_max_points %d" %
                                  (len(nodes), self.config.interpolation_max_points))
            return {"skipped": True, "num_nodes": len(nodes)}

        self.performance.record_step_start("grid_equivalence", "interpolate_values")
        net  = interpolate_values(nodes, values, ReLU(), self.config.seed)
        loss = fdpinn_loss(net, colloc, D_res, LossWeights())
        self.performance.record_step_end("grid_equivalence")

        residual = float(np.max(np.abs(net.eval(nodes) - np.asarray(values).reshape(len(nodes), -1))))
        self.check(loss.total <= PinnLab.GRID_EQUIVALENCE_TOLERANCE,
                   "FD-PINN loss of the interpolated grid solution %.3e <= %.1e" % (loss.total, PinnLab.GRID_EQUIVALENCE_TOLERANCE))
        return {"skipped":              False,
                "num_nodes":            len(nodes),
                "hidden_units":         net.widths[1],
                "interpolation_error":  residual,
                "fdpinn_loss":          loss.values()}

    def run_poisson_fdpinn(self):
        """
        FD-PINN training on the slit grid; grid error against the FDM solution.
        """
        grid, colloc, system, u_fdm = self.poisson_setup()
        D_res = PoissonResidualFD(grid, colloc, system)
        w     = self.config.loss_weights()
        net   = self.build_network(2, 1)
        if self.config.hard_bc:
            net = wrap_hard_constraint(net, poisson_hard_constraint())

        objective = fdpinn_objective(colloc, D_res, w)
        result    = self.train_network(net, objective, "fdpinn")
        best      = result.best_network
        u_net     = best.eval(grid.node_coordinates())[:, 0]

        report = self.training_report(result, objective)
        report["relative_l2_grid"] = Util.relative_l2(u_net, u_fdm)
        self.metrics["fdpinn"]     = report
        self.metrics["grid"]       = {"h": self.config.grid_h, "num_nodes": grid.num_nodes,
                                      "num_interior": colloc.num_interior, "num_boundary": colloc.num_boundary}
        self.metrics["reference"]  = {"hard_bc_loss": PinnLab.POISSON_REFERENCE_LOSSES["hard_bc"]}
        self.evaluate_poisson_network(best, "poisson_fdpinn")

    def run_poisson_adpinn(self):
        """
        AD-PINN training with soft boundary weights (optionally the alpha_B sweep) and the masked hard-BC run.
        """
        grid, colloc, system, u_fdm = self.poisson_setup()
        nodes = grid.node_coordinates()

        runs = []
        if self.config.alpha_b_sweep:
            for alpha_b in self.config.alpha_b_values:
                runs.append(("alpha_b_%g" % alpha_b, alpha_b, False))
        else:
            runs.append(("alpha_b_%g" % self.config.alpha_b, self.config.alpha_b, False))
        if self.config.hard_bc:
            runs.append(("hard_bc", self.config.alpha_b, True))

        reports = {}
        for label, alpha_b, hard in runs:
            net = self.build_network(2, 1)
            if hard:
                net = wrap_hard_constraint(net, poisson_hard_constraint())
            objective = adpinn_objective(colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, self.config.loss_weights(alpha_b))
            result    = self.train_network(net, objective, label)
            report    = self.training_report(result, objective)
            report["alpha_b"]          = alpha_b
            report["hard_bc"]          = hard
            report["relative_l2_grid"] = Util.relative_l2(result.best_network.eval(nodes)[:, 0], u_fdm)
            if label in PinnLab.POISSON_REFERENCE_LOSSES:
                report["reference_loss"] = PinnLab.POISSON_REFERENCE_LOSSES[label]
            reports[label] = report
            self.evaluate_poisson_network(result.best_network, "poisson_adpinn_%s" % label)

        self.metrics["runs"] = reports
        sweep = dict((label, reports[label]["best_loss"]) for label, _, hard in runs if not hard)
        if all(key in sweep for key in ["alpha_b_1", "alpha_b_100", "alpha_b_10000"]):
            self.metrics["alpha_b_ordering"] = bool(sweep["alpha_b_100"] < sweep["alpha_b_1"] and
                                                    sweep["alpha_b_100"] < sweep["alpha_b_10000"])

    # ------------------------------------------------------------------ schroedinger

    def schrodinger_reference(self):
        self.performance.record_step_start("schrodinger", "solve_schrodinger_fdm")
        levels = solve_schrodinger_fdm(self.config.schrodinger_n, self.config.schrodinger_t, self.config.schrodinger_method)
        self.performance.record_step_end("schrodinger")
        return levels

    def write_schrodinger_field(self, name, grid, values):
        nodes = grid.node_coordinates()
        self.write_field(name, pd.DataFrame({"t": nodes[:, 0], "x": nodes[:, 1],
                                             "real": values[:, 0], "imag": values[:, 1],
                                             "abs": np.hypot(values[:, 0], values[:, 1])}))
        # rows are time levels, newest at the top
        self.write_image(name, np.hypot(values[:, 0], values[:, 1]).reshape(grid.shape)[::-1])

    def run_schrodinger_ref(self):
        """
        Implicit Euler reference trajectory, its residual and the grid equivalence check.
        """
        levels = self.schrodinger_reference()
        grid   = build_interval_grid(self.config.schrodinger_n, self.config.schrodinger_t)
        values = trajectory_values(levels)
        h_t, h_x = grid.spacing
        residual = trajectory_residual(levels, h_t, h_x)

        self.metrics["reference"] = {"N":              self.config.schrodinger_n,
                                     "T":              self.config.schrodinger_t,
                                     "method":         self.config.schrodinger_method,
                                     "max_residual":   residual,
                                     "max_abs_final":  float(np.max(levels[-1].modulus()))}
        self.check(residual <= 1e-10, "Schroedinger reference residual %.3e <= 1e-10" % residual)
        self.write_schrodinger_field("schrodinger_reference", grid, values)

        if self.config.grid_equivalence:
            colloc = interval_collocation(grid)
            self.metrics["grid_equivalence"] = self.grid_equivalence(grid.node_coordinates(), values, colloc,
                                                                     SchrodingerResidualFD(grid, colloc))

    def schrodinger_training_outputs(self, result, objective, grid, reference, name):
        predicted = result.best_network.eval(grid.node_coordinates())
        report    = self.training_report(result, objective)
        report["relative_l2"] = Util.relative_l2(predicted, reference)
        report["reference_relative_l2"] = PinnLab.SCHRODINGER_REFERENCE_L2
        self.write_schrodinger_field(name, grid, predicted)
        self.write_field("%s_snapshots" % name, snapshot_table(grid, reference, predicted, SNAPSHOT_TIMES))
        return report

    def run_schrodinger_fdpinn(self):
        """
        FD-PINN training on the space-time lattice with the additive initial-condition anchor.
        """
        levels    = self.schrodinger_reference()
        grid      = build_interval_grid(self.config.schrodinger_n, self.config.schrodinger_t)
        reference = trajectory_values(levels)
        colloc    = interval_collocation(grid)
        D_res     = SchrodingerResidualFD(grid, colloc)

        net = self.build_network(2, 2)
        if self.config.hard_bc:
            net = wrap_hard_constraint(net, schrodinger_hard_constraint())
        objective = fdpinn_objective(colloc, D_res, self.config.loss_weights())
        result    = self.train_network(net, objective, "fdpinn")
        self.metrics["fdpinn"] = self.schrodinger_training_outputs(result, objective, grid, reference, "schrodinger_fdpinn")

    def run_schrodinger_adpinn(self):
        """
        AD-PINN training with the continuous residual, periodic boundary pairing and the initial-condition anchor.
        """
        levels    = self.schrodinger_reference()
        grid      = build_interval_grid(self.config.schrodinger_n, self.config.schrodinger_t)
        reference = trajectory_values(levels)
        colloc    = schrodinger_ad_collocation(grid)

        net       = wrap_hard_constraint(self.build_network(2, 2), schrodinger_hard_constraint())
        objective = adpinn_objective(colloc, SCHRODINGER_RESIDUAL, SCHRODINGER_PERIODIC, self.config.loss_weights())
        result    = self.train_network(net, objective, "adpinn")
        self.metrics["adpinn"] = self.schrodinger_training_outputs(result, objective, grid, reference, "schrodinger_adpinn")

    # ------------------------------------------------------------------ navier-stokes

    def ns_trajectory(self):
        self.performance.record_step_start("ns", "ns_generate_data")
        snapshots = ns_generate_data(self.config.ns_lambda1, self.config.ns_lambda2, self.config.ns_h_t,
                                     self.config.ns_steps, self.config.ns_n)
        self.performance.record_step_end("ns")
        return snapshots

    def run_ns_datagen(self):
        """
        Projection-method trajectory with per-step divergence and energy checks.
        """
        snapshots   = self.ns_trajectory()
        energies    = [s.energy() for s in snapshots]
        divergences = [s.divergence() for s in snapshots]
        increases   = [k for k in range(len(energies) - 1) if energies[k + 1] > energies[k]]

        self.metrics["trajectory"] = {"n":              self.config.ns_n,
                                      "steps":          self.config.ns_steps,
                                      "h_t":            self.config.ns_h_t,
                                      "lambda1":        self.config.ns_lambda1,
                                      "lambda2":        self.config.ns_lambda2,
                                      "energy":         energies,
                                      "divergence":     divergences,
                                      "max_divergence": max(divergences[1:])}
        self.check(max(divergences[1:]) <= DIVERGENCE_TOLERANCE,
                   "Post-projection divergence %.3e <= %.1e" % (max(divergences[1:]), DIVERGENCE_TOLERANCE))
        self.check(len(increases) == 0, "Kinetic energy non-increasing (increases at steps %s)" % str(increases))

        self.write_field("ns_trajectory", trajectory_dataframe(snapshots))
        final = snapshots[-1]
        for component in ["u", "v", "p"]:
            # x along image columns, y increasing upwards
            self.write_image("ns_%s_final" % component, getattr(final, component).T[::-1])

    def run_ns_inverse(self):
        """
        Joint training of a (t, x, y) -> (psi, p) network and (lambda1, lambda2) on generated velocity snapshots,
        followed by pressure reconstruction on the training grid and a refined grid.
        """
        snapshots    = self.ns_trajectory()[:self.config.ns_snapshots]
        observations = inject_noise(FlowObservations.from_snapshots(snapshots), self.config.ns_noise, self.config.seed)
        times        = [s.time for s in snapshots]
        n            = self.config.ns_n

        net       = self.build_network(3, 2)
        objective = ns_inverse_objective(observations, times, self.config.ns_w_div)
        extra     = np.full(2, self.config.ns_lambda_init)
        result    = self.train_network(net, objective, "ns_inverse", extra)

        recovered = result.best_extra
        truth     = np.array([self.config.ns_lambda1, self.config.ns_lambda2])
        report    = self.training_report(result, objective, recovered)
        report.update({"lambda1":                float(recovered[0]),
                       "lambda2":                float(recovered[1]),
                       "lambda1_relative_error": float(abs(recovered[0] - truth[0])/abs(truth[0])),
                       "lambda2_relative_error": float(abs(recovered[1] - truth[1])/abs(truth[1])),
                       "noise":                  self.config.ns_noise,
                       "num_snapshots":          len(snapshots),
                       "reference_lambdas":      PinnLab.NS_REFERENCE_LAMBDAS})
        PinnLabLogger.info("Recovered lambda1 = %.6f, lambda2 = %.6f" % (recovered[0], recovered[1]))

        # pressure is determined up to a constant per level
        middle   = snapshots[len(snapshots)//2]
        coarse_p = result.best_network.eval(space_time_points(n, [middle.time]))[:, 1].reshape(n, n)
        refine   = self.config.ns_eval_refinement
        fine_n   = n*refine
        fine_p   = result.best_network.eval(space_time_points(fine_n, [middle.time]))[:, 1].reshape(fine_n, fine_n)
        truth_p  = remove_level_means(middle.p)
        report["pressure"] = {"time":                    middle.time,
                              "relative_l2":             Util.relative_l2(remove_level_means(coarse_p), truth_p),
                              "relative_l2_fine_nodes":  Util.relative_l2(remove_level_means(fine_p[::refine, ::refine]), truth_p),
                              "refinement":              refine}
        self.metrics["ns_inverse"] = report

        for name, field, size in [("ns_pressure", coarse_p, n), ("ns_pressure_fine", fine_p, fine_n)]:
            h = 2.0*np.pi/size
            i, j = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
            self.write_field(name, pd.DataFrame({"x": i.ravel()*h, "y": j.ravel()*h,
                                                 "p": remove_level_means(field).ravel()}))
            self.write_image(name, remove_level_means(field).T[::-1])
        self.write_image("ns_pressure_reference", truth_p.T[::-1])

    # ------------------------------------------------------------------ certification

    @staticmethod
    def random_network(widths, activation, seed):
        """
        Glorot weights with biases drawn from U(-0.5, 0.5), so no pre-activation sits exactly at a ReLU kink on a grid.
        """
        net   = init_network(widths, activation, seed)
        rng   = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        theta = net.flatten()
        offset = 0
        for layer in range(1, len(widths)):
            offset += widths[layer]*widths[layer-1]
            theta[offset:offset + widths[layer]] = rng.uniform(-0.5, 0.5, size=widths[layer])
            offset += widths[layer]
        return net.with_parameters(theta)

    @staticmethod
    def cell_center(h):
        """
        Center of the grid cell just below and left of the origin of [-1, 1]^2; no node is within h/2 of it.
        """
        cells = int(round(2.0/h))
        base  = -1.0 + h*(cells//2 - 1 + 0.5)
        return np.array([base, base])

    @staticmethod
    def witness_center(h):
        """
        :py:meth:`cell_center` moved off both cell diagonals through the nodes, so that the hyperplane projections
        of the smooth witness anchor never coincide with a node projection.
        """
        base = PinnLab.cell_center(h)[0]
        return np.array([base + 0.01*np.sqrt(2.0)*h, base + 0.01*np.sqrt(3.0)*h])

    def certify_sweeps(self, u_hat, witness, grid, colloc, system):
        w       = self.config.loss_weights()
        D_res   = PoissonResidualFD(grid, colloc, system)
        samples = sample_points(witness, self.config.certify_samples, self.config.seed)
        evaluators = {"adpinn": lambda net: adpinn_loss(net, colloc, POISSON_RESIDUAL, POISSON_BOUNDARY, w),
                      "fdpinn": lambda net: fdpinn_loss(net, colloc, D_res, w)}
        return dict((name, certify_nonuniqueness(u_hat, witness, evaluator, self.config.certify_lambdas,
                                                 samples, self.config.nu))
                    for name, evaluator in sorted(evaluators.items()))

    def run_certify(self):
        """
        Non-uniqueness certification on the slit Poisson collocation sets: a ReLU tent witness on the configured grid
        (exact loss invariance) and a smooth tanh witness on a coarse grid (loss invariance to a relative tolerance).
        """
        lambdas = self.config.certify_lambdas
        hidden  = self.config.hidden_widths()

        # relu tent
        self.performance.record_step_start("certify", "relu_witness")
        grid, colloc = build_slit_domain(self.config.grid_h)
        system  = assemble_poisson_slit(grid, colloc)
        u_hat   = PinnLab.random_network((2,) + hidden + (1,), ReLU(), self.config.seed)
        center  = PinnLab.cell_center(self.config.grid_h)
        tent    = build_null_witness_relu(colloc, center, [1.0], self.config.certify_epsilon_factor*self.config.grid_h,
                                          u_hat.depth)
        sweeps  = self.certify_sweeps(u_hat, tent, grid, colloc, system)
        relu_report = {"witness": tent.to_report(), "sweeps": sweeps, "depth_bound": tent_depth_bound(2)}
        self.check(tent.certified, "ReLU tent witness vanishes to order 2 at every collocation point")
        for name, sweep in sweeps.items():
            self.check(sweep["max_abs_difference"] == 0.0,
                       "ReLU tent %s loss invariance: max |J(u + lambda Phi) - J(u)| = %.3e" % (name, sweep["max_abs_difference"]))

        sup = dict((row["lambda"], row["sup_norm"]) for row in sweeps["adpinn"]["sweep"])
        if 1.0 in sup and 10.0 in sup and sup[1.0] > 0.0:
            ratio = sup[10.0]/sup[1.0]
            relu_report["divergence_ratio"] = ratio
            self.check(abs(ratio - 10.0) <= 1e-9, "Off-collocation growth sup|10 Phi| / sup|Phi| = %.12f" % ratio)

        # smooth witness
        self.performance.record_step_start("certify", "smooth_witness")
        coarse_grid, coarse_colloc = build_slit_domain(self.config.certify_smooth_h)
        coarse_system = assemble_poisson_slit(coarse_grid, coarse_colloc)
        u_smooth = PinnLab.random_network((2,) + hidden + (1,), Tanh(), self.config.seed)
        smooth   = build_null_witness_smooth(coarse_colloc, self.config.certify_smooth_r_f, 0,
                                             PinnLab.witness_center(self.config.certify_smooth_h), [1.0],
                                             u_smooth.depth, Tanh(), self.config.seed)
        smooth_sweeps = self.certify_sweeps(u_smooth, smooth, coarse_grid, coarse_colloc, coarse_system)
        smooth_report = {"witness": smooth.to_report(), "sweeps": smooth_sweeps}
        self.check(smooth.certified, "Smooth witness conditions hold to %.1e" % smooth.tolerance)
        self.check(smooth_sweeps["adpinn"]["max_rel_difference"] <= self.config.certify_rel_tolerance,
                   "Smooth witness adpinn loss invariance: max relative difference %.3e <= %.1e" %
                   (smooth_sweeps["adpinn"]["max_rel_difference"], self.config.certify_rel_tolerance))
        self.performance.record_step_end("certify")

        self.metrics["lambdas"] = lambdas
        self.metrics["relu"]    = relu_report
        self.metrics["smooth"]  = smooth_report

        rows = []
        for kind, report in [("relu", sweeps), ("smooth", smooth_sweeps)]:
            for loss_name, sweep in sorted(report.items()):
                for row in sweep["sweep"]:
                    rows.append(dict(row, witness=kind, loss=loss_name, loss_value=row["loss"]))
        table = pd.DataFrame(rows)[["witness", "loss", "lambda", "loss_value", "abs_difference", "rel_difference",
                                    "sup_norm", "lnu_norm", "growth"]]
        self.write_field("certify_sweep", table)

    # ------------------------------------------------------------------ gradient check

    def gradcheck_case(self, index, rng):
        """
        One random (architecture, points, loss) configuration.

        :returns: (net, objective, probe points, description dict)
        """
        loss_kind  = ["adpinn", "fdpinn", "data"][index % 3]
        problem    = ["poisson", "schrodinger"][(index//3) % 2]
        activation = [Tanh(), ReLU()][(index//6) % 2]
        output_dim = 1 if problem == "poisson" else 2
        widths     = (2,) + tuple(int(w) for w in rng.integers(2, 6, size=int(rng.integers(1, 4)))) + (output_dim,)
        w          = LossWeights(alpha_F=1.0, alpha_B=float(rng.choice([1.0, 10.0])), alpha_D=1.0, nu=int(rng.choice([1, 2])))

        if problem == "poisson":
            low, high = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
        else:
            low, high = np.array([0.0, -5.0]), np.array([2.0*np.pi, 5.0])

        if loss_kind == "fdpinn":
            if problem == "poisson":
                grid, colloc = build_slit_domain(0.5)
                D_res = PoissonResidualFD(grid, colloc, assemble_poisson_slit(grid, colloc))
            else:
                grid   = build_interval_grid(4, 3)
                colloc = interval_collocation(grid)
                D_res  = SchrodingerResidualFD(grid, colloc)
            objective = fdpinn_objective(colloc, D_res, w)
            probes    = D_res.points
        elif loss_kind == "adpinn":
            interior = rng.uniform(low, high, size=(4, 2))
            if problem == "poisson":
                boundary = rng.uniform(low, high, size=(3, 2))
                F_res, B_res = POISSON_RESIDUAL, POISSON_BOUNDARY
                probes   = np.vstack([interior, boundary])
            else:
                boundary = np.stack([rng.uniform(0.0, 2.0*np.pi, size=2), np.full(2, -5.0)], axis=1)
                F_res, B_res = SCHRODINGER_RESIDUAL, SCHRODINGER_PERIODIC
                probes   = np.vstack([interior, boundary, SCHRODINGER_PERIODIC.partner(boundary)])
            colloc    = CollocationSet(interior, boundary)
            objective = adpinn_objective(colloc, F_res, B_res, w)
        else:
            interior  = rng.uniform(low, high, size=(2, 2))
            data      = rng.uniform(low, high, size=(5, 2))
            colloc    = CollocationSet(interior, [], data, rng.normal(size=(5, output_dim)))
            objective = adpinn_objective(colloc, None, None, w)
            probes    = data

        description = {"index": index, "loss": loss_kind, "problem": problem, "activation": activation.name,
                       "widths": list(widths), "nu": w.nu, "alpha_B": w.alpha_B}
        for draw in range(PinnLab.GRADCHECK_MAX_DRAWS):
            net = PinnLab.random_network(widths, activation, int(rng.integers(0, 2**31 - 1)))
            if not activation.has_kinks or net.min_abs_preactivation(probes) > PinnLab.GRADCHECK_KINK_CLEARANCE:
                description["draws"] = draw + 1
                return net, objective, probes, description
        raise CertificationError("No kink-free network in %d draws for gradient check case %d" % (PinnLab.GRADCHECK_MAX_DRAWS, index))

    @staticmethod
    def gradient_error(grad, reference):
        """
        Largest componentwise relative error over components of *reference* above 1e-8 in magnitude; each
        denominator is at least 1e-2 times the largest reference component.
        """
        scale = float(np.max(np.abs(reference))) if reference.size else 0.0
        mask  = np.abs(reference) > 1e-8
        if not np.any(mask):
            return float(np.max(np.abs(grad - reference))) if grad.size else 0.0
        denominator = np.maximum(np.abs(reference[mask]), 1e-2*scale)
        return float(np.max(np.abs(grad[mask] - reference[mask])/denominator))

    def run_gradcheck(self):
        """
        Parameter gradients against central differences and jets against the finite-difference jet oracle
        over random configurations.
        """
        tolerance = self.config.gradcheck_tolerance
        streams   = np.random.SeedSequence(self.config.seed).spawn(self.config.gradcheck_count)
        cases     = []
        self.performance.record_step_start("gradcheck", "gradcheck")
        for index, stream in enumerate(streams):
            rng = np.random.default_rng(stream)
            net, objective, probes, case = self.gradcheck_case(index, rng)

            exact     = parameter_gradient(net, objective).grad
            reference = fd_gradient_oracle(net, objective, self.config.gradcheck_step)
            case["num_parameters"] = net.num_parameters
            case["gradient_error"] = PinnLab.gradient_error(exact, reference)

            point  = probes[int(rng.integers(0, len(probes)))]
            jet    = eval_jet2(net, point)
            oracle = jet_fd_oracle(net, point, step_grad=1e-5, step_hess=1e-4)
            case["jet_error"] = max(float(np.max(np.abs(getattr(jet, part) - getattr(oracle, part)))) /
                                    max(1.0, float(np.max(np.abs(getattr(oracle, part)))))
                                    for part in ["grad", "hess"])
            case["passed"] = bool(case["gradient_error"] <= tolerance and case["jet_error"] <= tolerance)
            PinnLabLogger.debug("gradcheck case %d: %s" % (index, str(case)))
            cases.append(case)
        self.performance.record_step_end("gradcheck")

        failed = [case["index"] for case in cases if not case["passed"]]
        self.metrics["gradcheck"] = {"num_cases":          len(cases),
                                     "tolerance":          tolerance,
                                     "step":               self.config.gradcheck_step,
                                     "max_gradient_error": max(case["gradient_error"] for case in cases),
                                     "max_jet_error":      max(case["jet_error"] for case in cases),
                                     "failed":             failed,
                                     "cases":              cases}
        self.write_field("gradcheck", pd.DataFrame(cases)[["index", "problem", "loss", "activation", "nu",
                                                           "num_parameters", "gradient_error", "jet_error", "passed"]])
        self.check(len(failed) == 0, "Gradient check: %d of %d cases within %.1e" % (len(cases) - len(failed), len(cases), tolerance))

    # ------------------------------------------------------------------ one dimensional example

    def run_example32(self):
        """
        Two ReLU minimizers of the AD-PINN loss of ``u' = a``, ``u(0) = u0`` that differ between collocation points.
        """
        minimizers = example32_minimizers(self.config.example32_a, self.config.example32_u0, self.config.example32_points)
        report     = minimizers.to_report()
        self.metrics["example32"] = report

        for idx, loss in enumerate(minimizers.losses):
            self.check(loss.total <= 1e-15, "Minimizer %d attains loss %.3e <= 1e-15" % (idx, loss.total))
        self.check(report["difference"] >= 0.05, "Minimizers differ by %.4f >= 0.05 at z = %g" % (report["difference"], report["probe"]))

        z = np.linspace(0.0, float(minimizers.points[-1]), 101)
        self.write_field("example32", pd.DataFrame({"z":  z,
                                                    "u1": minimizers.networks[0].eval(z.reshape(-1, 1))[:, 0],
                                                    "u2": minimizers.networks[1].eval(z.reshape(-1, 1))[:, 0]}))
