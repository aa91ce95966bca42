"""Local fields built from occupied orbitals.

Conventions (atomic units, spatial orbitals doubly occupied)::

    n     = 2 sum_i |phi_i|^2
    tau   = 2 sum_i |grad phi_i|^2
    j_p   = (1/i) sum_i [phi_i* grad phi_i - phi_i grad phi_i*]  = 2 sum_i Im(phi_i* grad phi_i)
    D     = tau - |grad n|^2 / (4 n) - |j_p|^2 / n
    1/l_E = sqrt(D / n)

The current has no 1/2 prefactor. With this choice D vanishes identically
for a single orbital, complex or not.

When orbitals are available, D is evaluated in the equivalent pair form

    n D = 4 sum_{i<j} |phi_i grad phi_j - phi_j grad phi_i|^2

which is non-negative term by term and free of the cancellation that the
difference form suffers near nodes, where n -> 0 while tau stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeDError, UndefinedPointError
from .grid import ScalarField, UniformGrid3D, VectorField, laplacian_array
from .orbitals import GridOrbitalSet, OrbitalSet
from .parallel import map_points

N_FLOOR = 1e-12
D_TOLERANCE = 1e-10  # relative to max(tau)


@dataclass
class PointFields:
    """Field values at an explicit list of points (arrays over points)."""

    n: np.ndarray
    grad_n: np.ndarray
    tau: np.ndarray
    j_p: np.ndarray
    lap_n: np.ndarray | None = None
    n_D: np.ndarray | None = None

    @property
    def defined(self) -> np.ndarray:
        return self.n > N_FLOOR

    @property
    def D(self) -> np.ndarray:
        if self.n_D is not None:
            return d_from_pairs(self.n_D, self.n)
        return d_values(self.n, self.grad_n, self.tau, self.j_p)

    @property
    def inv_lE(self) -> np.ndarray:
        return inv_le_values(self.D, self.n, self.tau)


def _accumulate(values: np.ndarray, grads: np.ndarray, laps: np.ndarray | None = None):
    """Sum orbital contributions in fixed orbital order."""
    m = values.shape[1]
    n = np.zeros(m)
    grad_n = np.zeros((m, 3))
    tau = np.zeros(m)
    jp = np.zeros((m, 3))
    lap = None if laps is None else np.zeros(m)
    for i in range(values.shape[0]):
        phi = values[i]
        g = grads[i]
        cross = np.conj(phi)[:, None] * g
        n = n + 2.0 * np.real(np.conj(phi) * phi)
        grad_n = grad_n + 4.0 * np.real(cross)
        tau = tau + 2.0 * np.real(np.einsum("ij,ij->i", np.conj(g), g))
        jp = jp + 2.0 * np.imag(cross)
        if laps is not None:
            lap = lap + 4.0 * np.real(np.conj(phi) * laps[i])
    if lap is not None:
        lap = lap + tau + tau
    return n, grad_n, tau, jp, lap


def _pair_nd(values: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """n D = 4 sum_{i<j} |phi_i grad phi_j - phi_j grad phi_i|^2, in fixed order."""
    out = np.zeros(values.shape[1])
    for i in range(values.shape[0] - 1):
        w = values[i][None, :, None] * grads[i + 1:] - values[i + 1:, :, None] * grads[i][None]
        out = out + 4.0 * np.real(np.conj(w) * w).sum(axis=(0, 2))
    return out


def d_from_pairs(n_D, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ok = n > N_FLOOR
    return np.where(ok, np.asarray(n_D) / np.where(ok, n, 1.0), np.nan)


def point_fields(orbs: OrbitalSet, points, with_laplacian: bool = False) -> PointFields:
    """Evaluate n, grad n, tau, j_p (and optionally lap n) at ``(m, 3)`` points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def work(chunk):
        laps = orbs.laplacians(chunk) if with_laplacian else None
        vals, grads = orbs.values(chunk), orbs.gradients(chunk)
        n, gn, tau, jp, lap = _accumulate(vals, grads, laps)
        nd = _pair_nd(vals, grads)
        if lap is None:
            return n, gn, tau, jp, nd
        return n, gn, tau, jp, nd, lap

    with np.errstate(divide="ignore", invalid="ignore"):
        parts = map_points(work, pts)
    lap = parts[5] if with_laplacian else None
    return PointFields(parts[0], parts[1], parts[2], parts[3], lap, parts[4])


def d_values(n, grad_n, tau, j_p) -> np.ndarray:
    """D at points with n above the floor; NaN elsewhere."""
    n = np.asarray(n, dtype=float)
    ok = n > N_FLOOR
    safe = np.where(ok, n, 1.0)
    gn2 = np.einsum("...k,...k->...", grad_n, grad_n)
    j2 = np.einsum("...k,...k->...", j_p, j_p)
    d = tau - 0.25 * gn2 / safe - j2 / safe
    return np.where(ok, d, np.nan)


def inv_le_values(D, n, tau=None) -> np.ndarray:
    """sqrt(D/n); small negative D (rounding) is clipped, large negative raises."""
    D = np.asarray(D, dtype=float)
    n = np.asarray(n, dtype=float)
    ok = (n > N_FLOOR) & np.isfinite(D)
    if tau is not None and np.any(ok):
        eps = D_TOLERANCE * max(float(np.nanmax(np.where(ok, tau, 0.0))), 0.0)
    else:
        eps = 0.0
    worst = np.min(np.where(ok, D, 0.0), initial=0.0)
    if worst < -eps and worst < -1e-300:
        raise NegativeDError(f"D = {worst:.3e} is negative beyond tolerance {eps:.3e}; orbital input is inconsistent")
    safe = np.where(ok, n, 1.0)
    return np.where(ok, np.sqrt(np.clip(D, 0.0, None) / safe), np.nan)


# --------------------------------------------------------------------------
# grid-level operations


@dataclass
class FieldBundle:
    n: ScalarField
    grad_n: VectorField
    lap_n: ScalarField
    tau: ScalarField
    j_p: VectorField
    D: ScalarField
    inv_lE: ScalarField
    boundary: np.ndarray | None = None

    @property
    def grid(self) -> UniformGrid3D:
        return self.n.grid

    @property
    def defined(self) -> np.ndarray:
        return self.n.values > N_FLOOR


def _grid_raw(orbs: OrbitalSet, grid: UniformGrid3D, with_laplacian: bool):
    if isinstance(orbs, GridOrbitalSet) and orbs.grid.same_as(grid):
        vals = orbs.grid_values().reshape(orbs.count, -1)
        grads = orbs.grid_gradients().reshape(orbs.count, -1, 3)
        n, gn, tau, jp, _ = _accumulate(vals, grads)
        nd = _pair_nd(vals, grads)
        lap = laplacian_array(n.reshape(grid.dims), grid).ravel() if with_laplacian else None
        return n, gn, tau, jp, lap, nd
    pf = point_fields(orbs, grid.points(), with_laplacian=with_laplacian)
    return pf.n, pf.grad_n, pf.tau, pf.j_p, pf.lap_n, pf.n_D


def compute_density(orbs: OrbitalSet, grid: UniformGrid3D) -> ScalarField:
    """n(r) = 2 sum_i |phi_i(r)|^2 on every grid point."""
    return ScalarField(grid, _grid_raw(orbs, grid, False)[0])


def compute_tau(orbs: OrbitalSet, grid: UniformGrid3D) -> ScalarField:
    return ScalarField(grid, _grid_raw(orbs, grid, False)[2])


def compute_jp(orbs: OrbitalSet, grid: UniformGrid3D) -> VectorField:
    return VectorField(grid, _grid_raw(orbs, grid, False)[3])


def compute_D(n: ScalarField, grad_n: VectorField, tau: ScalarField, j_p: VectorField) -> ScalarField:
    """Pointwise D; sites with n below the floor are marked undefined."""
    d = d_values(n.values, grad_n.values, tau.values, j_p.values)
    defined = n.values > N_FLOOR
    if not defined.any():
        raise UndefinedPointError("density is below the floor at every grid point")
    return ScalarField(n.grid, d, defined)


def compute_inv_lE(D: ScalarField, n: ScalarField, tau: ScalarField | None = None) -> ScalarField:
    """Inverse entanglement length sqrt(D/n), the stored form since it stays finite."""
    inv = inv_le_values(D.values, n.values, None if tau is None else tau.values)
    return ScalarField(n.grid, inv, n.values > N_FLOOR)


def compute_fields(orbs: OrbitalSet, grid: UniformGrid3D) -> FieldBundle:
    n, gn, tau, jp, lap, nd = _grid_raw(orbs, grid, True)
    nf = ScalarField(grid, n)
    gf = VectorField(grid, gn)
    tf = ScalarField(grid, tau)
    jf = VectorField(grid, jp)
    if not (n > N_FLOOR).any():
        raise UndefinedPointError("density is below the floor at every grid point")
    D = ScalarField(grid, d_from_pairs(nd, n), n > N_FLOOR)
    inv = compute_inv_lE(D, nf, tf)
    boundary = grid.boundary_mask() if isinstance(orbs, GridOrbitalSet) else None
    return FieldBundle(nf, gf, ScalarField(grid, lap), tf, jf, D, inv, boundary)
