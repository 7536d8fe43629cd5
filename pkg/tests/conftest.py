import pytest

import numpy as np

from pinnlab.Collocation import build_slit_domain
from pinnlab.Poisson import assemble_poisson_slit, solve_poisson_fdm


def pytest_addoption(parser):
    parser.addoption("--runlong", action="store_true", default=False,
                     help="run the reduced-scale training and data generation tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "travis: fast tests run on every push")
    config.addinivalue_line("markers", "long_running: training runs of several minutes, enabled with --runlong")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runlong"):
        return
    skip_long = pytest.mark.skip(reason="needs --runlong")
    for item in items:
        if "long_running" in item.keywords:
            item.add_marker(skip_long)


@pytest.fixture(scope="module")
def slit_coarse():
    """
    Slit domain with h = 0.25: grid, collocation set, system and FDM solution.
    """
    grid, colloc = build_slit_domain(0.25)
    system = assemble_poisson_slit(grid, colloc)
    yield grid, colloc, system, solve_poisson_fdm(system)


@pytest.fixture(scope="function")
def rng():
    yield np.random.default_rng(20261016)


@pytest.fixture(scope="function")
def output_dir(tmp_path):
    yield str(tmp_path)
