import numpy as np
import pytest

from pinnlab.Collocation import CollocationSet, build_interval_grid, build_periodic_grid, build_slit_domain, \
    core_subgrids, interval_collocation
from pinnlab.Error import DuplicateAbscissa, GridTooSmall, NonIntegralMesh

# h -> (nodes, interior, boundary, slit)
SLIT_COUNTS = {0.5:  (25,   7,    18,  2),
               0.25: (81,   45,   36,  4),
               0.1:  (441,  351,  90,  10),
               0.05: (1681, 1501, 180, 20)}


@pytest.mark.travis
@pytest.mark.parametrize("h", sorted(SLIT_COUNTS.keys()))
def test_slit_domain_counts(h):
    grid, colloc = build_slit_domain(h)
    nodes, interior, boundary, slit = SLIT_COUNTS[h]
    print("h=%g: %d nodes, %d interior, %d boundary" % (h, grid.num_nodes, colloc.num_interior, colloc.num_boundary))
    assert grid.num_nodes       == nodes
    assert colloc.num_interior  == interior
    assert colloc.num_boundary  == boundary
    assert colloc.boundary_class.count("slit") == slit
    assert np.isclose(colloc.interior_weights.sum(), 1.0)
    assert np.isclose(colloc.boundary_weights.sum(), 1.0)


@pytest.mark.travis
def test_slit_domain_classification():
    grid, colloc = build_slit_domain(0.25)
    slit = colloc.boundary[np.array(colloc.boundary_class) == "slit"]
    assert np.all(slit[:, 1] == 0.0)
    assert np.all((slit[:, 0] >= 0.0) & (slit[:, 0] < 1.0))
    # (1, 0) sits on the frame
    outer = colloc.boundary[np.array(colloc.boundary_class) == "outer"]
    assert np.any(np.all(outer == np.array([1.0, 0.0]), axis=1))
    # no interior node on the slit or the frame
    assert not np.any((colloc.interior[:, 1] == 0.0) & (colloc.interior[:, 0] >= 0.0))
    assert np.all(np.abs(colloc.interior) < 1.0)
    assert np.array_equal(grid.node_coordinates()[colloc.interior_index], colloc.interior)


@pytest.mark.travis
@pytest.mark.parametrize("h", [0.3, 0.0, -0.1])
def test_slit_domain_rejects_mesh(h):
    with pytest.raises(NonIntegralMesh):
        build_slit_domain(h)


@pytest.mark.travis
def test_collocation_set_rejects_duplicates():
    with pytest.raises(DuplicateAbscissa):
        CollocationSet([[0.0, 0.0], [0.0, 0.0]], [[1.0, 1.0]])
    with pytest.raises(DuplicateAbscissa):
        CollocationSet([[0.0, 0.0]], [[0.0, 0.0]])


@pytest.mark.travis
def test_collocation_dataframe():
    grid, colloc = build_slit_domain(0.5)
    df = colloc.to_dataframe()
    assert list(df.columns) == ["x", "y", "class"]
    counts = df["class"].value_counts()
    assert counts[CollocationSet.CLASS_INTERIOR] == 7
    assert counts["slit"] == 2
    assert counts["outer"] == 16


@pytest.mark.travis
def test_interval_grid():
    grid = build_interval_grid(32, 40)
    assert grid.shape == (41, 33)
    assert grid.spacing[0] == pytest.approx(2.0*np.pi/40)
    assert grid.spacing[1] == pytest.approx(10.0/32)
    assert grid.coordinates(1)[0] == -5.0
    assert grid.coordinates(1)[-1] == pytest.approx(5.0)
    # x_{-1} is identified with x_{N-1}
    assert grid.resolve(1, -1) == 31
    assert grid.resolve(0, -1) is None

    colloc = interval_collocation(grid)
    assert colloc.num_interior == 40*32
    assert colloc.num_boundary == 33
    assert np.all(colloc.boundary[:, 0] == 0.0)
    assert np.all(colloc.interior[:, 0] > 0.0)


@pytest.mark.travis
def test_periodic_grid():
    grid = build_periodic_grid(16, 2.0*np.pi)
    assert grid.shape == (16, 16)
    assert grid.resolve(0, -1) == 15
    assert grid.resolve(1, 16) == 0
    assert grid.neighbor(0, 0, -1) == 15*16
    with pytest.raises(GridTooSmall):
        build_periodic_grid(2, 1.0)


@pytest.mark.travis
def test_core_subgrids():
    grid = build_periodic_grid(8, 2.0*np.pi)
    core = core_subgrids(grid, 5)
    assert len(core.omega1) == 36
    assert len(core.omega2) == 16
    assert list(core.t_core) == [0, 1, 2, 3]
    assert np.zeros((8, 8))[core.trim2].shape == (4, 4)
    with pytest.raises(GridTooSmall):
        core_subgrids(build_periodic_grid(4, 2.0*np.pi), 5)
    with pytest.raises(GridTooSmall):
        core_subgrids(grid, 1)
