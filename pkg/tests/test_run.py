import json
import os

import pandas as pd
import pytest

from pinnlab.Error import CertificationError
from pinnlab.PinnLab import PinnLab
from pinnlab.Run import main, run_pinnlab


def read_metrics(output_dir):
    with open(os.path.join(output_dir, PinnLab.METRICS_FILE)) as metrics_file:
        return json.load(metrics_file)


@pytest.mark.travis
def test_main_example32(output_dir):
    assert main(["example32", "--out", output_dir, "--quiet"]) == 0
    metrics = read_metrics(output_dir)
    assert metrics["status"] == "ok"
    assert metrics["example32"]["values"] == pytest.approx([0.5, 0.4375], abs=1e-15)
    assert os.path.exists(os.path.join(output_dir, "example32.csv"))
    assert os.path.exists(os.path.join(output_dir, "pinnlab_output_config.txt"))


@pytest.mark.travis
@pytest.mark.parametrize("args,exit_code", [(["--set", "bogus=1"],                            1),
                                            (["--set", "example32_a=0"],                      1),
                                            (["--set", "example32_points=0.01, 0.5"],         3)])
def test_main_exit_codes(output_dir, args, exit_code):
    assert main(["example32", "--out", output_dir, "--quiet"] + args) == exit_code


@pytest.mark.travis
def test_failed_check_still_writes_metrics(output_dir):
    with pytest.raises(CertificationError):
        run_pinnlab(experiment="example32", output_dir=output_dir, overrides=["example32_points=0.01, 0.5"],
                    log_to_console=False)
    metrics = read_metrics(output_dir)
    assert metrics["status"] == "failed"
    assert len(metrics["failures"]) == 1


@pytest.mark.travis
def test_poisson_fdm_run(output_dir):
    metrics = run_pinnlab(experiment="poisson-fdm", output_dir=output_dir, overrides=["grid_h=0.25"],
                          write_images=False, log_to_console=False)
    assert metrics["grid"]["num_nodes"] == 81
    assert metrics["grid"]["num_interior"] == 45
    assert metrics["grid"]["num_slit"] == 4
    assert metrics["grid_equivalence"]["skipped"] is False
    solution = pd.read_csv(os.path.join(output_dir, "poisson_fdm_solution.csv"))
    assert list(solution.columns) == ["x", "y", "u"]
    assert len(solution) == 81
    assert not os.path.exists(os.path.join(output_dir, "poisson_fdm_solution.ppm"))


@pytest.mark.travis
def test_gradcheck_run(output_dir):
    metrics = run_pinnlab(experiment="gradcheck", output_dir=output_dir, overrides=["gradcheck_count=12"],
                          log_to_console=False)
    report  = metrics["gradcheck"]
    assert report["num_cases"] == 12
    assert report["failed"] == []
    assert report["max_gradient_error"] <= 1e-5


@pytest.mark.travis
def test_ns_datagen_run(output_dir):
    metrics = run_pinnlab(experiment="ns-datagen", output_dir=output_dir,
                          overrides=["ns_n=16", "ns_steps=5", "ns_snapshots=6"], log_to_console=False)
    assert metrics["trajectory"]["max_divergence"] <= 1e-8
    assert len(metrics["trajectory"]["energy"]) == 6
    assert os.path.exists(os.path.join(output_dir, "ns_u_final.ppm"))


@pytest.mark.travis
def test_certify_run(output_dir):
    metrics = run_pinnlab(experiment="certify", output_dir=output_dir,
                          overrides=["grid_h=0.25", "width=8", "depth=3"], log_to_console=False)
    assert metrics["status"] == "ok"
    assert metrics["relu"]["sweeps"]["adpinn"]["max_abs_difference"] == 0.0
    assert metrics["relu"]["sweeps"]["fdpinn"]["max_abs_difference"] == 0.0
    assert abs(metrics["relu"]["divergence_ratio"] - 10.0) <= 1e-9
    sweep = pd.read_csv(os.path.join(output_dir, "certify_sweep.csv"))
    assert len(sweep) == 2*2*6


@pytest.mark.long_running
def test_poisson_fdpinn_reduced_scale(output_dir):
    metrics = run_pinnlab(experiment="poisson-fdpinn", output_dir=output_dir,
                          overrides=["grid_h=0.1", "iterations=20000", "log_every=1000"], log_to_console=False)
    print(metrics["fdpinn"]["best_loss"], metrics["fdpinn"]["relative_l2_grid"])
    assert metrics["fdpinn"]["relative_l2_grid"] <= 0.10


@pytest.mark.long_running
def test_ns_inverse_reduced_scale(output_dir):
    metrics = run_pinnlab(experiment="ns-inverse", output_dir=output_dir,
                          overrides=["ns_n=16", "ns_steps=9", "ns_snapshots=10", "iterations=50000", "log_every=5000"],
                          log_to_console=False)
    report = metrics["ns_inverse"]
    print(report["lambda1"], report["lambda2"])
    assert report["lambda1_relative_error"] <= 0.2
    assert report["lambda2_relative_error"] <= 0.2


@pytest.mark.travis
def test_schrodinger_reference_run(output_dir):
    metrics = run_pinnlab(experiment="schrodinger-ref", output_dir=output_dir,
                          overrides=["schrodinger_n=32", "schrodinger_t=40", "schrodinger_method=newton"], write_images=False, log_to_console=False)
    assert metrics["reference"]["max_residual"] <= 1e-10
    assert metrics["grid_equivalence"]["fdpinn_loss"]["total"] <= 1e-8
    assert os.path.exists(os.path.join(output_dir, "schrodinger_reference.csv"))
