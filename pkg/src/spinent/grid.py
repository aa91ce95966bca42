"""Regular 3D grids, sampled fields, finite differences and spherical quadrature.

Field values are stored as numpy arrays of shape ``grid.dims`` in C order, so
the innermost (fastest) index runs along the third axis. This is the same
ordering used by cube files (x slowest, z fastest).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError

# interior 4th-order stencils (unit spacing)
_D1_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_INTERIOR = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

MIN_STENCIL_POINTS = 5


@dataclass(frozen=True)
class UniformGrid3D:
    """A parallelepiped grid ``origin + i*axes[0] + j*axes[1] + k*axes[2]``.

    Lengths are in bohr. ``axes`` holds one spacing vector per row.
    """

    origin: np.ndarray
    axes: np.ndarray
    dims: tuple[int, int, int]

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        axes = np.asarray(self.axes, dtype=float).reshape(3, 3)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise GridError(f"grid dims must be three positive integers, got {self.dims}")
        if abs(np.linalg.det(axes)) < 1e-14 * max(np.abs(axes).max(), 1e-300) ** 3:
            raise GridError("grid axis vectors are linearly dependent")
        origin.flags.writeable = False
        axes.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def cartesian(cls, lower, upper, dims) -> "UniformGrid3D":
        """Axis-aligned grid spanning ``lower``..``upper`` inclusive."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        dims = tuple(int(d) for d in dims)
        steps = [(upper[a] - lower[a]) / (dims[a] - 1) if dims[a] > 1 else 1.0 for a in range(3)]
        return cls(lower, np.diag(steps), dims)

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    @property
    def voxel_volume(self) -> float:
        return float(abs(np.linalg.det(self.axes)))

    @property
    def is_orthogonal(self) -> bool:
        gram = self.axes @ self.axes.T
        off = gram - np.diag(np.diag(gram))
        return bool(np.abs(off).max() <= 1e-12 * np.abs(gram).max())

    def point(self, i: int, j: int, k: int) -> np.ndarray:
        return self.origin + i * self.axes[0] + j * self.axes[1] + k * self.axes[2]

    def points(self) -> np.ndarray:
        """All grid points as an ``(size, 3)`` array in storage order."""
        i, j, k = np.meshgrid(*(np.arange(d) for d in self.dims), indexing="ij")
        idx = np.stack([i.ravel(), j.ravel(), k.ravel()], axis=1).astype(float)
        return self.origin + idx @ self.axes

    def fractional(self, r) -> np.ndarray:
        """Fractional index coordinates of one or more positions."""
        r = np.asarray(r, dtype=float)
        return np.linalg.solve(self.axes.T, (r - self.origin).T).T

    def same_as(self, other: "UniformGrid3D", tol: float = 1e-10) -> bool:
        return (
            self.dims == other.dims
            and np.allclose(self.origin, other.origin, rtol=0.0, atol=tol)
            and np.allclose(self.axes, other.axes, rtol=0.0, atol=tol)
        )

    def boundary_mask(self, width: int = 2) -> np.ndarray:
        """True on cells where derivative stencils fall back to lower order."""
        mask = np.zeros(self.dims, dtype=bool)
        for a, d in enumerate(self.dims):
            sl = [slice(None)] * 3
            sl[a] = np.r_[0:min(width, d), max(d - width, 0):d]
            mask[tuple(sl)] = True
        return mask


@dataclass
class ScalarField:
    grid: UniformGrid3D
    values: np.ndarray
    defined: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.size != self.grid.size:
            raise GridError(
                f"field has {self.values.size} values, grid expects {self.grid.size}"
            )
        self.values = self.values.reshape(self.grid.dims)
        if self.defined is not None:
            self.defined = np.asarray(self.defined, dtype=bool).reshape(self.grid.dims)


@dataclass
class VectorField:
    grid: UniformGrid3D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.size != 3 * self.grid.size:
            raise GridError(
                f"vector field has {self.values.size} values, grid expects {3 * self.grid.size}"
            )
        self.values = self.values.reshape(self.grid.dims + (3,))


def _check_stencil(dims):
    if min(dims) < MIN_STENCIL_POINTS:
        raise GridError(
            f"finite differences need at least {MIN_STENCIL_POINTS} points per axis, "
            f"grid has dims {tuple(dims)}"
        )


def _d1_index(values: np.ndarray, axis: int) -> np.ndarray:
    """First derivative with respect to the integer index along ``axis``."""
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    out[1] = (f[2] - f[0]) / 2.0
    out[-2] = (f[-1] - f[-3]) / 2.0
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / 2.0
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / 2.0
    return np.moveaxis(out, 0, axis)


def _d2_index(values: np.ndarray, axis: int) -> np.ndarray:
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / 12.0
    out[1] = f[0] - 2.0 * f[1] + f[2]
    out[-2] = f[-3] - 2.0 * f[-2] + f[-1]
    out[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
    out[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    return np.moveaxis(out, 0, axis)


def gradient_array(values: np.ndarray, grid: UniformGrid3D) -> np.ndarray:
    """Cartesian gradient of a (possibly complex) array sampled on ``grid``.

    Returns an array of shape ``grid.dims + (3,)``.
    """
    values = np.asarray(values).reshape(grid.dims)
    _check_stencil(grid.dims)
    d_index = np.stack([_d1_index(values, a) for a in range(3)], axis=-1)
    # d f/d s_a = axes[a] . grad f  =>  grad f = axes^{-1} d_index
    inv = np.linalg.inv(grid.axes)
    return d_index @ inv.T


def gradient(f: ScalarField) -> VectorField:
    """Fourth-order central differences inside, second-order one-sided at the edges."""
    return VectorField(f.grid, gradient_array(f.values, f.grid))


def laplacian_array(values: np.ndarray, grid: UniformGrid3D) -> np.ndarray:
    values = np.asarray(values).reshape(grid.dims)
    _check_stencil(grid.dims)
    metric = np.linalg.inv(grid.axes @ grid.axes.T)
    out = np.zeros_like(values)
    for a in range(3):
        out = out + metric[a, a] * _d2_index(values, a)
    if not grid.is_orthogonal:
        for a in range(3):
            first = _d1_index(values, a)
            for b in range(a + 1, 3):
                if metric[a, b] != 0.0:
                    out = out + 2.0 * metric[a, b] * _d1_index(first, b)
    return out


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, laplacian_array(f.values, f.grid))


def interpolate_many(f: ScalarField, points, tol: float = 1e-9) -> np.ndarray:
    """Trilinear interpolation of ``f`` at an ``(m, 3)`` array of positions.

    Raises GridError for any position outside the grid hull.
    """
    grid = f.grid
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    s = grid.fractional(pts)
    upper = np.array(grid.dims, dtype=float) - 1.0
    outside = np.any((s < -tol) | (s > upper + tol), axis=1)
    if outside.any():
        bad = pts[np.argmax(outside)]
        raise GridError(f"position {bad.tolist()} lies outside the grid hull")
    s = np.clip(s, 0.0, upper)
    i0 = np.minimum(np.floor(s).astype(int), np.maximum(np.array(grid.dims) - 2, 0))
    t = s - i0
    v = f.values
    out = np.zeros(len(pts), dtype=v.dtype)
    for di in (0, 1):
        wi = t[:, 0] if di else 1.0 - t[:, 0]
        ii = np.minimum(i0[:, 0] + di, grid.dims[0] - 1)
        for dj in (0, 1):
            wj = t[:, 1] if dj else 1.0 - t[:, 1]
            jj = np.minimum(i0[:, 1] + dj, grid.dims[1] - 1)
            for dk in (0, 1):
                wk = t[:, 2] if dk else 1.0 - t[:, 2]
                kk = np.minimum(i0[:, 2] + dk, grid.dims[2] - 1)
                out = out + wi * wj * wk * v[ii, jj, kk]
    return out


def interpolate(f: ScalarField, r) -> float:
    return interpolate_many(f, np.asarray(r, dtype=float).reshape(1, 3))[0].item()


def inside_hull(grid: UniformGrid3D, points, tol: float = 1e-9) -> np.ndarray:
    s = grid.fractional(np.atleast_2d(points))
    upper = np.array(grid.dims, dtype=float) - 1.0
    return np.all((s >= -tol) & (s <= upper + tol), axis=1)


@dataclass(frozen=True)
class SphereQuadrature:
    """Unit-sphere nodes with weights summing to one (a spherical mean)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def mean(self, values) -> np.ndarray:
        """Weighted mean over the last axis of ``values``, summed in node order."""
        values = np.asarray(values)
        total = np.zeros(values.shape[:-1], dtype=np.result_type(values, float))
        for q in range(len(self.weights)):
            total = total + self.weights[q] * values[..., q]
        return total


SUPPORTED_ORDERS = tuple(range(0, 64))


def sphere_quadrature(order: int = 17) -> SphereQuadrature:
    """Product Gauss-Legendre (polar) x uniform (azimuthal) rule.

    Exact for spherical harmonics of degree <= ``order``.
    """
    if order not in SUPPORTED_ORDERS:
        raise GridError(
            f"unsupported quadrature order {order}; supported orders are "
            f"{SUPPORTED_ORDERS[0]}..{SUPPORTED_ORDERS[-1]}"
        )
    n_theta = order // 2 + 1
    n_phi = order + 1
    cos_t, w_t = np.polynomial.legendre.leggauss(n_theta)
    sin_t = np.sqrt(1.0 - cos_t**2)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    nodes = np.empty((n_theta * n_phi, 3))
    weights = np.empty(n_theta * n_phi)
    for a in range(n_theta):
        sl = slice(a * n_phi, (a + 1) * n_phi)
        nodes[sl, 0] = sin_t[a] * np.cos(phi)
        nodes[sl, 1] = sin_t[a] * np.sin(phi)
        nodes[sl, 2] = cos_t[a]
        weights[sl] = 0.5 * w_t[a] / n_phi
    weights /= weights.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return SphereQuadrature(nodes, weights, order)


def radial_quadrature(n_radial: int = 120, r_scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Radii and weights for integrals ``int_0^inf f(r) r^2 dr``.

    Gauss-Legendre on (-1, 1) mapped with ``r = r_scale (1+x)/(1-x)``.
    """
    x, w = np.polynomial.legendre.leggauss(n_radial)
    r = r_scale * (1.0 + x) / (1.0 - x)
    dr = 2.0 * r_scale / (1.0 - x) ** 2
    return r, w * dr * r**2


def atom_centered_quadrature(
    center=(0.0, 0.0, 0.0), n_radial: int = 120, order: int = 17, r_scale: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights approximating ``int d^3r f(r)`` around ``center``."""
    r, wr = radial_quadrature(n_radial, r_scale)
    quad = sphere_quadrature(order)
    pts = np.asarray(center, dtype=float) + (r[:, None, None] * quad.nodes[None, :, :])
    wts = 4.0 * np.pi * wr[:, None] * quad.weights[None, :]
    return pts.reshape(-1, 3), wts.ravel()
