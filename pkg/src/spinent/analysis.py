"""Radial profiles, extrema and planar slices used by the CLI reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elf import elf_values_from_chi
from .errors import GridError
from .fields import N_FLOOR, FieldBundle, inv_le_values, point_fields
from .grid import SphereQuadrature, UniformGrid3D, inside_hull, sphere_quadrature
from .orbitals import GridOrbitalSet, OrbitalSet


@dataclass
class RadialProfile:
    r: np.ndarray
    n: np.ndarray
    D: np.ndarray
    inv_lE: np.ndarray
    elf: np.ndarray
    masked: int = 0

    def columns(self) -> dict:
        return {"r": self.r, "n": self.n, "D": self.D, "inv_lE": self.inv_lE, "elf": self.elf}


def radial_grid(r_max: float, samples: int) -> np.ndarray:
    """``samples`` radii ``r_max * i / samples`` for i = 1..samples (the nucleus is skipped)."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    return r_max * np.arange(1, samples + 1) / samples


def radial_profile(
    orbs: OrbitalSet,
    r_max: float,
    samples: int,
    center=(0.0, 0.0, 0.0),
    quad: SphereQuadrature | None = None,
) -> RadialProfile:
    """Sphere-averaged n and D at each radius; 1/l_E and ELF follow from the averages.

    For grid-backed orbitals, quadrature nodes outside the grid are dropped
    and the remaining weights renormalized.
    """
    quad = quad or sphere_quadrature()
    r = radial_grid(r_max, samples)
    center = np.asarray(center, dtype=float)
    pts = center + r[:, None, None] * quad.nodes[None, :, :]
    flat = pts.reshape(-1, 3)
    weights = np.broadcast_to(quad.weights, (len(r), len(quad.weights))).copy()
    masked = 0
    if isinstance(orbs, GridOrbitalSet):
        inside = inside_hull(orbs.grid, flat).reshape(weights.shape)
        masked = int((~inside).sum())
        weights = np.where(inside, weights, 0.0)
        flat = np.where(inside.reshape(-1, 1), flat, orbs.grid.origin)
    pf = point_fields(orbs, flat)
    n = pf.n.reshape(weights.shape)
    D = np.nan_to_num(pf.D).reshape(weights.shape)
    wsum = weights.sum(axis=1)
    n_bar = np.zeros(len(r))
    d_bar = np.zeros(len(r))
    for q in range(weights.shape[1]):
        n_bar = n_bar + weights[:, q] * n[:, q]
        d_bar = d_bar + weights[:, q] * D[:, q]
    ok = wsum > 0
    n_bar = np.where(ok, n_bar / np.where(ok, wsum, 1.0), np.nan)
    d_bar = np.where(ok & (n_bar > N_FLOOR), d_bar / np.where(ok, wsum, 1.0), np.nan)
    tau_scale = np.nanmax(np.where(np.isfinite(pf.tau), pf.tau, 0.0), initial=0.0)
    inv = inv_le_values(d_bar, np.nan_to_num(n_bar), np.full(len(r), tau_scale))
    elf, _ = elf_values_from_chi(d_bar, np.nan_to_num(n_bar))
    elf = np.where(np.isfinite(d_bar), elf, np.nan)
    return RadialProfile(r, n_bar, d_bar, inv, elf, masked)


def local_extrema(values, kind: str = "max", include_start: bool = True) -> np.ndarray:
    """Indices of local maxima (or minima) of a sampled 1D profile.

    A plateau counts once, at its first sample. The first sample counts when
    ``include_start`` is set (the profile starts next to a symmetry centre);
    the last sample never counts since it is a truncation edge.
    """
    v = np.asarray(values, dtype=float)
    if kind == "min":
        v = -v
    elif kind != "max":
        raise ValueError("kind must be 'max' or 'min'")
    idx = []
    if include_start and len(v) > 1 and v[0] > v[1]:
        idx.append(0)
    for i in range(1, len(v) - 1):
        if not np.isfinite(v[i]):
            continue
        if v[i] > v[i - 1] and v[i] >= v[i + 1]:
            j = i + 1
            while j < len(v) - 1 and v[j] == v[i]:
                j += 1
            if j == len(v) - 1 and v[j] == v[i]:
                continue
            if v[j] <= v[i]:
                idx.append(i)
    return np.array(idx, dtype=int)


# --------------------------------------------------------------------------
# planar slices

_AXES = {"x": 0, "y": 1, "z": 2}


def parse_plane(text: str) -> tuple[int, float]:
    try:
        name, offset = text.split("=")
        return _AXES[name.strip().lower()], float(offset)
    except (ValueError, KeyError):
        raise ValueError(f"plane must look like z=0.0, got {text!r}") from None


@dataclass
class PlaneSlice:
    axis: int
    offset: float
    coord_names: tuple[str, str]
    u: np.ndarray
    v: np.ndarray
    elf: np.ndarray
    inv_lE: np.ndarray

    def columns(self) -> dict:
        uu, vv = np.meshgrid(self.u, self.v, indexing="ij")
        return {
            self.coord_names[0]: uu.ravel(),
            self.coord_names[1]: vv.ravel(),
            "elf": self.elf.ravel(),
            "inv_lE": self.inv_lE.ravel(),
        }


def plane_slice(grid: UniformGrid3D, elf: np.ndarray, inv_le: np.ndarray, axis: int, offset: float) -> PlaneSlice:
    """Slice two fields on an axis-aligned grid, interpolating linearly between planes."""
    steps = np.diag(grid.axes)
    if not grid.is_orthogonal or np.any(np.abs(grid.axes - np.diag(steps)) > 1e-12):
        raise GridError("plane slices need an axis-aligned grid")
    s = (offset - grid.origin[axis]) / steps[axis]
    top = grid.dims[axis] - 1
    if s < -1e-9 or s > top + 1e-9:
        lo = grid.origin[axis]
        hi = lo + top * steps[axis]
        raise GridError(f"plane offset {offset} is outside the grid range [{min(lo, hi)}, {max(lo, hi)}]")
    s = min(max(s, 0.0), float(top))
    k = min(int(np.floor(s)), max(top - 1, 0))
    t = s - k

    def take(a):
        a0 = np.take(a, k, axis=axis)
        if t == 0.0 or top == 0:
            return a0
        return (1.0 - t) * a0 + t * np.take(a, k + 1, axis=axis)

    others = [a for a in range(3) if a != axis]
    names = tuple("xyz"[a] for a in others)
    u = grid.origin[others[0]] + steps[others[0]] * np.arange(grid.dims[others[0]])
    v = grid.origin[others[1]] + steps[others[1]] * np.arange(grid.dims[others[1]])
    return PlaneSlice(axis, offset, names, u, v, take(elf), take(inv_le))


def bundle_elf(bundle: FieldBundle) -> np.ndarray:
    elf, _ = elf_values_from_chi(bundle.D.values, bundle.n.values)
    return elf
