import numpy as np
import pytest

from spinent.errors import GridError
from spinent.grid import (
    ScalarField,
    UniformGrid3D,
    atom_centered_quadrature,
    gradient,
    gradient_array,
    interpolate,
    interpolate_many,
    laplacian,
    sphere_quadrature,
)


def _poly_grid(axes=None):
    if axes is None:
        return UniformGrid3D.cartesian((-1, -1, -1), (1, 1.2, 0.8), (9, 10, 8))
    return UniformGrid3D((-0.5, -0.4, -0.3), axes, (9, 9, 9))


def _cubic(p):
    x, y, z = p.T
    return x**3 - 2 * x * y + y**2 * z + 0.5 * z**3


def _cubic_grad(p):
    x, y, z = p.T
    return np.stack([3 * x**2 - 2 * y, -2 * x + 2 * y * z, y**2 + 1.5 * z**2], axis=-1)


def _cubic_lap(p):
    x, y, z = p.T
    return 6 * x + 2 * z + 3 * z


def test_points_c_order():
    g = UniformGrid3D.cartesian((0, 0, 0), (1, 2, 3), (2, 3, 4))
    pts = g.points()
    assert pts.shape == (24, 3)
    np.testing.assert_allclose(pts[1], [0, 0, 1])
    np.testing.assert_allclose(pts[4], [0, 1, 0])
    np.testing.assert_allclose(g.point(1, 2, 3), [1, 2, 3])


def test_degenerate_axes_rejected():
    with pytest.raises(GridError):
        UniformGrid3D((0, 0, 0), [[1, 0, 0], [2, 0, 0], [0, 0, 1]], (5, 5, 5))


@pytest.mark.parametrize("axes", [None, [[0.12, 0.0, 0.0], [0.03, 0.11, 0.0], [0.0, 0.02, 0.1]]])
def test_gradient_exact_for_cubics(axes):
    # 4th-order interior and 2nd-order edge stencils: cubic is exact in the interior
    g = _poly_grid(axes)
    pts = g.points()
    f = ScalarField(g, _cubic(pts))
    grad = gradient(f).values.reshape(-1, 3)
    interior = ~g.boundary_mask(2).ravel()
    np.testing.assert_allclose(grad[interior], _cubic_grad(pts)[interior], atol=1e-10)


@pytest.mark.parametrize("axes", [None, [[0.12, 0.0, 0.0], [0.03, 0.11, 0.0], [0.0, 0.02, 0.1]]])
def test_laplacian_exact_for_cubics(axes):
    g = _poly_grid(axes)
    pts = g.points()
    lap = laplacian(ScalarField(g, _cubic(pts))).values.ravel()
    interior = ~g.boundary_mask(2).ravel()
    np.testing.assert_allclose(lap[interior], _cubic_lap(pts)[interior], atol=1e-9)


def test_gradient_converges_fourth_order():
    errs = []
    for n in (21, 41):
        g = UniformGrid3D.cartesian((0, 0, 0), (1, 1, 1), (n, n, n))
        pts = g.points()
        f = np.sin(2 * pts[:, 0]) * np.cos(pts[:, 1]) * np.exp(0.3 * pts[:, 2])
        gx = gradient_array(f.reshape(g.dims), g)[..., 0]
        exact = (2 * np.cos(2 * pts[:, 0]) * np.cos(pts[:, 1]) * np.exp(0.3 * pts[:, 2])).reshape(g.dims)
        errs.append(np.abs(gx - exact)[4:-4, 4:-4, 4:-4].max())
    assert errs[0] / errs[1] > 12.0


def test_too_few_points_rejected():
    g = UniformGrid3D.cartesian((0, 0, 0), (1, 1, 1), (4, 6, 6))
    with pytest.raises(GridError):
        gradient(ScalarField(g, np.zeros(g.dims)))


def test_interpolation_exact_for_trilinear():
    g = UniformGrid3D.cartesian((0, 0, 0), (1, 2, 1), (5, 6, 7))
    pts = g.points()
    f = ScalarField(g, 1 + pts[:, 0] - 2 * pts[:, 1] + 3 * pts[:, 0] * pts[:, 1] * pts[:, 2])
    rng = np.random.default_rng(0)
    q = rng.uniform((0, 0, 0), (1, 2, 1), size=(50, 3))
    expect = 1 + q[:, 0] - 2 * q[:, 1] + 3 * q[:, 0] * q[:, 1] * q[:, 2]
    np.testing.assert_allclose(interpolate_many(f, q), expect, atol=1e-12)
    assert interpolate(f, (1, 2, 1)) == pytest.approx(1 + 1 - 4 + 6)
    with pytest.raises(GridError):
        interpolate(f, (1.1, 0, 0))


def _real_harmonic_moments(order):
    quad = sphere_quadrature(order)
    x, y, z = quad.nodes.T
    return quad, x, y, z


def test_sphere_quadrature_integrates_polynomials():
    quad, x, y, z = _real_harmonic_moments(17)
    assert quad.weights.sum() == pytest.approx(1.0, abs=1e-15)
    # spherical means of monomials: <x^2> = 1/3, <x^4> = 1/5, <x^2 y^2> = 1/15
    assert quad.mean(x**2) == pytest.approx(1 / 3, abs=1e-14)
    assert quad.mean(z**4) == pytest.approx(1 / 5, abs=1e-14)
    assert quad.mean(x**2 * y**2) == pytest.approx(1 / 15, abs=1e-14)
    assert quad.mean(x**8 * z**8) == pytest.approx(quad.mean(y**8 * z**8), abs=1e-14)
    assert quad.mean(x * y**3 * z**5) == pytest.approx(0.0, abs=1e-15)


def test_sphere_quadrature_order_bounds():
    assert len(sphere_quadrature(0).weights) == 1
    with pytest.raises(GridError, match="supported orders"):
        sphere_quadrature(64)


def test_atom_centered_quadrature_gaussian():
    pts, w = atom_centered_quadrature((0.3, -0.2, 0.1), n_radial=80, order=11)
    r2 = ((pts - np.array([0.3, -0.2, 0.1])) ** 2).sum(axis=1)
    assert (w * np.exp(-r2)).sum() == pytest.approx(np.pi**1.5, rel=1e-10)
