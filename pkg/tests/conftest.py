import numpy as np
import pytest

from spinent import parallel
from spinent.grid import UniformGrid3D
from spinent.io import cube_from_volumes, save_cube
from spinent.orbitals import closed_shell_atom, hydrogenic_set, orbital_set_on_grid, two_center_toy


@pytest.fixture(scope="session")
def argon():
    return hydrogenic_set(closed_shell_atom("Ar"))


@pytest.fixture(scope="session")
def toy_grid():
    # odd dims so the bond axis and midpoint are grid points
    return UniformGrid3D.cartesian((-3.5, -2.5, -2.5), (3.5, 2.5, 2.5), (57, 41, 41))


@pytest.fixture(scope="session")
def toy_cubes(tmp_path_factory, toy_grid):
    root = tmp_path_factory.mktemp("toy")
    data = orbital_set_on_grid(two_center_toy(), toy_grid)
    for i, v in enumerate(data):
        save_cube(root / f"orb{i}.cube", cube_from_volumes(toy_grid, np.real(v), ("toy", f"orbital {i}")))
    return root


@pytest.fixture(autouse=True)
def _reset_workers():
    yield
    parallel.set_workers(1)
