import numpy as np
import pytest

from spinent.errors import NegativeDError, UndefinedPointError
from spinent.fields import (
    N_FLOOR,
    compute_D,
    compute_density,
    compute_fields,
    inv_le_values,
    point_fields,
)
from spinent.grid import ScalarField, UniformGrid3D, VectorField
from spinent.orbitals import (
    BoostedSet,
    GridOrbitalSet,
    HydrogenicSpec,
    Shell,
    hydrogenic_set,
    orbital_set_on_grid,
    two_center_toy,
    with_global_phase,
)

RNG = np.random.default_rng(7)


def _fd(fun, pts, h=1e-4):
    cols = []
    for c in range(3):
        e = np.zeros(3)
        e[c] = h
        cols.append((fun(pts + e) - fun(pts - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def test_grad_and_laplacian_of_density(argon):
    pts = RNG.normal(scale=1.2, size=(15, 3))
    pf = point_fields(argon, pts, with_laplacian=True)
    dens = lambda p: point_fields(argon, p).n  # noqa: E731
    np.testing.assert_allclose(pf.grad_n, _fd(dens, pts, 1e-5), rtol=1e-6, atol=1e-6)
    h = 1e-3
    lap = -6 * dens(pts)
    for c in range(3):
        e = np.zeros(3)
        e[c] = h
        lap = lap + dens(pts + e) + dens(pts - e)
    np.testing.assert_allclose(pf.lap_n, lap / h**2, rtol=1e-4, atol=1e-3)


def test_D_nonnegative_for_many_orbitals(argon):
    pts = RNG.normal(scale=2.0, size=(500, 3))
    pf = point_fields(argon, pts)
    D = pf.D[pf.defined]
    assert np.all(D >= -1e-10 * pf.tau.max())


def test_D_invariant_under_phase_and_boost(argon):
    pts = RNG.normal(size=(40, 3))
    ref = point_fields(argon, pts)
    moved = point_fields(BoostedSet(with_global_phase(argon, 1.3), (0.4, -0.7, 0.2)), pts)
    assert np.abs(moved.j_p).max() > 0.1
    np.testing.assert_allclose(moved.n, ref.n, rtol=1e-13)
    np.testing.assert_allclose(moved.D, ref.D, rtol=1e-9, atol=1e-10 * ref.tau.max())


def test_single_orbital_current_matches_boost():
    # one orbital boosted by k: j_p = n k, D = 0
    orb = BoostedSet(hydrogenic_set(HydrogenicSpec([Shell(2, 1, 1, 1.0)])), (0.5, 0, 0))
    pts = RNG.normal(size=(20, 3))
    pf = point_fields(orb, pts)
    np.testing.assert_allclose(pf.j_p[:, 0], 0.5 * pf.n, rtol=1e-12)
    assert np.abs(pf.D).max() < 1e-12 * pf.tau.max()


def test_grid_path_matches_point_path():
    grid = UniformGrid3D.cartesian((-2, -2, -2), (2, 2, 2), (41, 41, 41))
    toy = two_center_toy()
    fast = compute_fields(GridOrbitalSet(grid, orbital_set_on_grid(toy, grid).real), grid)
    exact = compute_fields(toy, grid)
    inner = ~grid.boundary_mask(3)
    assert np.allclose(fast.n.values, exact.n.values, rtol=1e-13)
    err = np.abs(fast.tau.values - exact.tau.values)[inner].max() / exact.tau.values.max()
    assert err < 1e-2  # tight cores, h = 0.1
    assert fast.boundary is not None and fast.boundary.any()


def test_undefined_points_and_floor():
    grid = UniformGrid3D.cartesian((30, 30, 30), (31, 31, 31), (5, 5, 5))
    orb = hydrogenic_set(HydrogenicSpec([Shell(1, 0, 0, 2.0)]))
    n = compute_density(orb, grid)
    assert n.values.max() < N_FLOOR
    with pytest.raises(UndefinedPointError):
        compute_D(n, VectorField(grid, np.zeros(grid.dims + (3,))), n, VectorField(grid, np.zeros(grid.dims + (3,))))


def test_negative_D_is_rejected():
    with pytest.raises(NegativeDError):
        inv_le_values(np.array([-1.0, 1.0]), np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    out = inv_le_values(np.array([-1e-14, 4.0]), np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    assert out.tolist() == [0.0, 2.0]


def test_scalar_field_shape_checked():
    grid = UniformGrid3D.cartesian((0, 0, 0), (1, 1, 1), (5, 5, 5))
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros(7))
