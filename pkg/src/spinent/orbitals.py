"""Occupied closed-shell orbital sets behind one evaluation interface.

Every provider exposes ``values(points)``, ``gradients(points)`` and
``laplacians(points)`` for an ``(m, 3)`` array of positions. Values are
complex in general; providers whose orbitals are real may return float
arrays, which every consumer treats as complex with zero imaginary part.
Each spatial orbital is doubly occupied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import genlaguerre

from .errors import GridError, OrbitalError
from .grid import UniformGrid3D, gradient_array, interpolate_many, laplacian_array, ScalarField

OCCUPATION = 2


class OrbitalSet:
    """Base class. Subclasses implement the three vectorized evaluators."""

    provider = "abstract"

    def __init__(self, count: int, params: dict | None = None):
        self.count = int(count)
        self.params = dict(params or {})

    @property
    def metadata(self) -> dict:
        return {"provider": self.provider, **self.params}

    def values(self, points) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, points) -> np.ndarray:
        raise NotImplementedError

    def laplacians(self, points) -> np.ndarray:
        raise NotImplementedError

    def value(self, i: int, r) -> complex:
        return complex(self.values(np.reshape(r, (1, 3)))[i, 0])

    def gradient(self, i: int, r) -> np.ndarray:
        return np.asarray(self.gradients(np.reshape(r, (1, 3)))[i, 0], dtype=complex)

    def __repr__(self):
        return f"<{type(self).__name__} count={self.count} {self.params}>"


class LinearCombinationSet(OrbitalSet):
    """Orbitals ``sum_j coeffs[i, j] * base_j``."""

    def __init__(self, base: OrbitalSet, coeffs, provider: str | None = None, params=None):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 2 or coeffs.shape[1] != base.count:
            raise OrbitalError("coefficient matrix does not match the base set")
        super().__init__(coeffs.shape[0], params if params is not None else base.params)
        self.base = base
        self.coeffs = coeffs
        self.provider = provider or base.provider

    def values(self, points):
        return np.tensordot(self.coeffs, self.base.values(points), axes=(1, 0))

    def gradients(self, points):
        return np.tensordot(self.coeffs, self.base.gradients(points), axes=(1, 0))

    def laplacians(self, points):
        return np.tensordot(self.coeffs, self.base.laplacians(points), axes=(1, 0))


def with_global_phase(orbs: OrbitalSet, alpha: float) -> OrbitalSet:
    return LinearCombinationSet(orbs, np.exp(1j * alpha) * np.eye(orbs.count))


class BoostedSet(OrbitalSet):
    """Every orbital multiplied by the plane wave ``exp(i k.r)``."""

    def __init__(self, base: OrbitalSet, k):
        self.base = base
        self.k = np.asarray(k, dtype=float).reshape(3)
        super().__init__(base.count, {**base.params, "boost": self.k.tolist()})
        self.provider = base.provider

    def _phase(self, points):
        return np.exp(1j * (np.asarray(points) @ self.k))

    def values(self, points):
        return self.base.values(points) * self._phase(points)

    def gradients(self, points):
        phase = self._phase(points)
        v = self.base.values(points)
        g = self.base.gradients(points)
        return (g + 1j * v[..., None] * self.k) * phase[:, None]

    def laplacians(self, points):
        phase = self._phase(points)
        v = self.base.values(points)
        g = self.base.gradients(points)
        lap = self.base.laplacians(points)
        return (lap + 2j * (g @ self.k) - (self.k @ self.k) * v) * phase


# --------------------------------------------------------------------------
# homogeneous gas


@dataclass(frozen=True)
class GasModel:
    """Unpolarized homogeneous electron gas; lengths in bohr."""

    r_s: float
    n: float
    k_F: float

    @classmethod
    def from_rs(cls, r_s: float) -> "GasModel":
        if not r_s > 0:
            raise OrbitalError(f"r_s must be positive, got {r_s}")
        n = 3.0 / (4.0 * math.pi * r_s**3)
        return cls(r_s, n, (3.0 * math.pi**2 * n) ** (1.0 / 3.0))

    @classmethod
    def from_density(cls, n: float) -> "GasModel":
        if not n > 0:
            raise OrbitalError(f"density must be positive, got {n}")
        return cls((3.0 / (4.0 * math.pi * n)) ** (1.0 / 3.0), n, (3.0 * math.pi**2 * n) ** (1.0 / 3.0))

    @classmethod
    def from_kf(cls, k_F: float) -> "GasModel":
        return cls.from_density(k_F**3 / (3.0 * math.pi**2))


class PlaneWaveSet(OrbitalSet):
    provider = "plane_wave"

    def __init__(self, kvecs, box_length: float, params=None):
        self.kvecs = np.asarray(kvecs, dtype=float).reshape(-1, 3)
        self.box_length = float(box_length)
        self.volume = self.box_length**3
        super().__init__(len(self.kvecs), params)

    def values(self, points):
        phase = np.asarray(points, dtype=float) @ self.kvecs.T
        return np.exp(1j * phase).T / math.sqrt(self.volume)

    def gradients(self, points):
        v = self.values(points)
        return 1j * v[..., None] * self.kvecs[:, None, :]

    def laplacians(self, points):
        k2 = np.einsum("ij,ij->i", self.kvecs, self.kvecs)
        return -k2[:, None] * self.values(points)


def lattice_shells(max_shells: int) -> list[np.ndarray]:
    """Integer vectors grouped by |m|^2, smallest first; ``max_shells + 1`` groups."""
    shells: list[np.ndarray] = []
    radius = 1
    while True:
        rng = range(-radius, radius + 1)
        ms = np.array(list(product(rng, rng, rng)), dtype=int)
        m2 = (ms**2).sum(axis=1)
        values = np.unique(m2)
        complete = values[values <= radius**2]
        if len(complete) > max_shells:
            for v in complete[: max_shells + 1]:
                group = ms[m2 == v]
                shells.append(group[np.lexsort(group.T[::-1])])
            return shells
        radius += 1


def plane_wave_set(
    gas: GasModel | None = None,
    box_length: float | None = None,
    shell_cutoff: int | None = 0,
    n_orbitals: int | None = None,
) -> PlaneWaveSet:
    """Periodic plane waves filling closed momentum shells.

    ``shell_cutoff`` counts shells beyond k = 0 (0 gives the single k = 0
    orbital). Alternatively ``n_orbitals`` requests an explicit count, which
    must land on a shell closure. If ``box_length`` is omitted it is chosen
    so that the density equals ``gas.n``.
    """
    if n_orbitals is not None:
        shells, total = [], 0
        while total < n_orbitals:
            shells = lattice_shells(len(shells))
            total = sum(len(s) for s in shells)
        if total != n_orbitals:
            closures = np.cumsum([len(s) for s in shells])
            raise OrbitalError(
                f"{n_orbitals} orbitals would split a degenerate momentum shell; "
                f"nearest closed-shell counts are {closures[-2] if len(closures) > 1 else 0} "
                f"and {closures[-1]}"
            )
        shell_cutoff = len(shells) - 1
    if shell_cutoff is None or shell_cutoff < 0:
        raise OrbitalError("shell_cutoff must be a non-negative integer")
    ms = np.concatenate(lattice_shells(shell_cutoff))
    count = len(ms)
    if box_length is None:
        if gas is None:
            raise OrbitalError("either gas or box_length is required")
        box_length = (OCCUPATION * count / gas.n) ** (1.0 / 3.0)
    if not box_length > 0:
        raise OrbitalError("box_length must be positive")
    kvecs = 2.0 * math.pi / box_length * ms
    params = {"box_length": float(box_length), "shells": int(shell_cutoff)}
    if gas is not None:
        params["r_s"] = gas.r_s
    return PlaneWaveSet(kvecs, box_length, params)


# --------------------------------------------------------------------------
# hydrogen-like orbitals

_SQRT_PI = math.sqrt(math.pi)

# Real solid harmonics r^l Y_lm as {(px, py, pz): coefficient}; m = -l..l
_SOLID_HARMONICS: dict[int, list[dict[tuple[int, int, int], float]]] = {
    0: [{(0, 0, 0): 0.5 / _SQRT_PI}],
    1: [
        {(0, 1, 0): math.sqrt(3.0 / (4 * math.pi))},
        {(0, 0, 1): math.sqrt(3.0 / (4 * math.pi))},
        {(1, 0, 0): math.sqrt(3.0 / (4 * math.pi))},
    ],
    2: [
        {(1, 1, 0): 0.5 * math.sqrt(15.0 / math.pi)},
        {(0, 1, 1): 0.5 * math.sqrt(15.0 / math.pi)},
        {(0, 0, 2): 0.25 * math.sqrt(5.0 / math.pi) * 2.0,
         (2, 0, 0): -0.25 * math.sqrt(5.0 / math.pi),
         (0, 2, 0): -0.25 * math.sqrt(5.0 / math.pi)},
        {(1, 0, 1): 0.5 * math.sqrt(15.0 / math.pi)},
        {(2, 0, 0): 0.25 * math.sqrt(15.0 / math.pi), (0, 2, 0): -0.25 * math.sqrt(15.0 / math.pi)},
    ],
    3: [
        {(2, 1, 0): 3 * 0.25 * math.sqrt(35.0 / (2 * math.pi)),
         (0, 3, 0): -0.25 * math.sqrt(35.0 / (2 * math.pi))},
        {(1, 1, 1): 0.5 * math.sqrt(105.0 / math.pi)},
        {(0, 1, 2): 4 * 0.25 * math.sqrt(21.0 / (2 * math.pi)),
         (2, 1, 0): -0.25 * math.sqrt(21.0 / (2 * math.pi)),
         (0, 3, 0): -0.25 * math.sqrt(21.0 / (2 * math.pi))},
        {(0, 0, 3): 2 * 0.25 * math.sqrt(7.0 / math.pi),
         (2, 0, 1): -3 * 0.25 * math.sqrt(7.0 / math.pi),
         (0, 2, 1): -3 * 0.25 * math.sqrt(7.0 / math.pi)},
        {(1, 0, 2): 4 * 0.25 * math.sqrt(21.0 / (2 * math.pi)),
         (3, 0, 0): -0.25 * math.sqrt(21.0 / (2 * math.pi)),
         (1, 2, 0): -0.25 * math.sqrt(21.0 / (2 * math.pi))},
        {(2, 0, 1): 0.25 * math.sqrt(105.0 / math.pi), (0, 2, 1): -0.25 * math.sqrt(105.0 / math.pi)},
        {(3, 0, 0): 0.25 * math.sqrt(35.0 / (2 * math.pi)),
         (1, 2, 0): -3 * 0.25 * math.sqrt(35.0 / (2 * math.pi))},
    ],
}
MAX_L = max(_SOLID_HARMONICS)


def _eval_poly3(terms, x, y, z):
    out = np.zeros_like(x)
    for (px, py, pz), c in terms.items():
        out = out + c * x**px * y**py * z**pz
    return out


def _grad_poly3(terms, x, y, z):
    gx, gy, gz = np.zeros_like(x), np.zeros_like(x), np.zeros_like(x)
    for (px, py, pz), c in terms.items():
        if px:
            gx = gx + c * px * x ** (px - 1) * y**py * z**pz
        if py:
            gy = gy + c * py * x**px * y ** (py - 1) * z**pz
        if pz:
            gz = gz + c * pz * x**px * y**py * z ** (pz - 1)
    return np.stack([gx, gy, gz], axis=-1)


@dataclass(frozen=True)
class Shell:
    n: int
    l: int
    m: int
    z_eff: float


@dataclass
class HydrogenicSpec:
    shells: list[Shell] = field(default_factory=list)
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    label: str = "custom"

    def __post_init__(self):
        self.shells = [s if isinstance(s, Shell) else Shell(*s) for s in self.shells]
        seen = set()
        for s in self.shells:
            if s.n < 1 or s.l < 0 or s.n < s.l + 1 or abs(s.m) > s.l:
                raise OrbitalError(f"invalid quantum numbers n={s.n}, l={s.l}, m={s.m}")
            if s.l > MAX_L:
                raise OrbitalError(f"l={s.l} is not supported (max {MAX_L})")
            if not s.z_eff > 0:
                raise OrbitalError(f"Z_eff must be positive, got {s.z_eff}")
            key = (s.n, s.l, s.m, s.z_eff)
            if key in seen:
                raise OrbitalError(f"duplicate shell {key}")
            seen.add(key)


class _RadialPart:
    """``R_nl(r) / r^l = poly(r) * exp(-a r)`` for a hydrogen-like orbital."""

    def __init__(self, n: int, l: int, z: float):
        a = z / n
        norm = math.sqrt((2.0 * a) ** 3 * math.factorial(n - l - 1) / (2.0 * n * math.factorial(n + l)))
        lag = genlaguerre(n - l - 1, 2 * l + 1)
        # L(2 a r) as a polynomial in r, times (2a)^l from rho^l
        coeffs_rho = lag.coeffs[::-1]
        coeffs_r = np.array([c * (2.0 * a) ** k for k, c in enumerate(coeffs_rho)])
        self.poly = np.polynomial.Polynomial(norm * (2.0 * a) ** l * coeffs_r)
        self.dpoly = self.poly.deriv()
        self.d2poly = self.dpoly.deriv()
        self.a = a
        self.l = l

    def g(self, r):
        return self.poly(r) * np.exp(-self.a * r)

    def dg(self, r):
        return (self.dpoly(r) - self.a * self.poly(r)) * np.exp(-self.a * r)

    def d2g(self, r):
        return (self.d2poly(r) - 2 * self.a * self.dpoly(r) + self.a**2 * self.poly(r)) * np.exp(-self.a * r)


def _radial_overlap(p: _RadialPart, q: _RadialPart) -> float:
    """Exact ``int_0^inf R_p R_q r^2 dr`` for equal l."""
    prod = p.poly * q.poly
    s = p.a + q.a
    total = 0.0
    for k, c in enumerate(prod.coef):
        power = k + 2 * p.l + 2
        total += c * math.factorial(power) / s ** (power + 1)
    return total


class _HydrogenicPrimitives(OrbitalSet):
    provider = "hydrogenic"

    def __init__(self, spec: HydrogenicSpec):
        super().__init__(len(spec.shells), {"label": spec.label})
        self.spec = spec
        self.center = np.asarray(spec.center, dtype=float)
        self.radial = [_RadialPart(s.n, s.l, s.z_eff) for s in spec.shells]
        self.angular = [_SOLID_HARMONICS[s.l][s.m + s.l] for s in spec.shells]

    def _coords(self, points):
        d = np.asarray(points, dtype=float) - self.center
        r = np.sqrt(np.einsum("ij,ij->i", d, d))
        return d, r

    def values(self, points):
        d, r = self._coords(points)
        x, y, z = d.T
        return np.array([rad.g(r) * _eval_poly3(ang, x, y, z) for rad, ang in zip(self.radial, self.angular)])

    def gradients(self, points):
        d, r = self._coords(points)
        x, y, z = d.T
        safe = np.where(r > 0, r, 1.0)
        rhat = np.where((r > 0)[:, None], d / safe[:, None], 0.0)
        out = []
        for rad, ang in zip(self.radial, self.angular):
            s = _eval_poly3(ang, x, y, z)
            out.append(rad.dg(r)[:, None] * rhat * s[:, None] + rad.g(r)[:, None] * _grad_poly3(ang, x, y, z))
        return np.array(out)

    def laplacians(self, points):
        # solid harmonics are harmonic and homogeneous of degree l
        d, r = self._coords(points)
        x, y, z = d.T
        with np.errstate(divide="ignore", invalid="ignore"):
            out = []
            for rad, ang, sh in zip(self.radial, self.angular, self.spec.shells):
                s = _eval_poly3(ang, x, y, z)
                radial_term = rad.d2g(r) + 2.0 * (sh.l + 1) * rad.dg(r) / r
                out.append(radial_term * s)
        return np.array(out)


def gram_schmidt(coeffs: np.ndarray, overlap: np.ndarray) -> np.ndarray:
    """Orthonormalize coefficient rows in order under the metric ``overlap``."""
    out = np.array(coeffs, dtype=np.result_type(coeffs, overlap, float), copy=True)
    for i in range(len(out)):
        for j in range(i):
            proj = np.conj(out[j]) @ overlap @ out[i]
            out[i] = out[i] - proj * out[j]
        norm = math.sqrt(np.real(np.conj(out[i]) @ overlap @ out[i]))
        if norm < 1e-10:
            raise OrbitalError(f"orbital {i} is linearly dependent on earlier orbitals")
        out[i] = out[i] / norm
    return out


def hydrogenic_set(spec: HydrogenicSpec, orthogonalize: bool = True) -> OrbitalSet:
    """Real hydrogen-like orbitals with analytic gradients and Laplacians.

    Shells that share (l, m) but carry different effective charges are not
    mutually orthogonal; with ``orthogonalize`` they are Gram-Schmidt
    orthonormalized in listed order (so the first shell of each channel, e.g.
    1s, is kept unchanged).
    """
    if not spec.shells:
        raise OrbitalError("hydrogenic spec has no shells")
    prim = _HydrogenicPrimitives(spec)
    n = prim.count
    overlap = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            si, sj = spec.shells[i], spec.shells[j]
            if si.l == sj.l and si.m == sj.m:
                overlap[i, j] = overlap[j, i] = _radial_overlap(prim.radial[i], prim.radial[j])
    coeffs = gram_schmidt(np.eye(n), overlap) if orthogonalize else np.eye(n)
    params = {
        "label": spec.label,
        "shells": [f"{s.n}{'spdf'[s.l]}{s.m:+d}:{s.z_eff:g}" for s in spec.shells],
        "orthogonalized": orthogonalize,
    }
    out = LinearCombinationSet(prim, coeffs, provider="hydrogenic", params=params)
    out.overlap = overlap
    return out


# Slater screening ----------------------------------------------------------

ELEMENTS = (
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
)
_AUFBAU = ((1, 0, 2), (2, 0, 2), (2, 1, 6), (3, 0, 2), (3, 1, 6))


def configuration(z: int) -> list[tuple[int, int, int]]:
    """Ground-state (n, l, electrons) subshells for Z <= 18."""
    if not 1 <= z <= len(ELEMENTS):
        raise OrbitalError(f"Slater rules are tabulated for Z = 1..{len(ELEMENTS)}, got {z}")
    out, left = [], z
    for n, l, cap in _AUFBAU:
        if left == 0:
            break
        k = min(cap, left)
        out.append((n, l, k))
        left -= k
    return out


def slater_zeff(z: int, n: int, l: int) -> float:
    """Slater-rule effective charge seen by an (n, l) electron of neutral atom Z."""
    if l > 1:
        raise OrbitalError("Slater table covers s and p electrons only")
    config = configuration(z)
    shielding = 0.0
    found = False
    for cn, cl, k in config:
        if cn == n:
            same = k - (1 if cl <= 1 and (cn, cl) == (n, l) else 0)
            if (cn, cl) == (n, l):
                found = True
            shielding += same * (0.30 if n == 1 else 0.35)
        elif cn == n - 1:
            shielding += k * 0.85
        elif cn < n - 1:
            shielding += k * 1.00
    if not found:
        raise OrbitalError(f"subshell n={n} l={l} is not occupied for Z={z}")
    return round(z - shielding, 10)


SLATER_ZEFF = {
    sym: {(n, l): slater_zeff(z, n, l) for n, l, _ in configuration(z)}
    for z, sym in enumerate(ELEMENTS, start=1)
}

CLOSED_SHELL_ATOMS = ("He", "Be", "Ne", "Mg", "Ar")


def closed_shell_atom(symbol: str, center=(0.0, 0.0, 0.0)) -> HydrogenicSpec:
    """Hydrogenic spec for a closed-shell atom with Slater-rule charges."""
    sym = symbol.capitalize()
    if sym not in CLOSED_SHELL_ATOMS:
        raise OrbitalError(f"no closed-shell model for {symbol!r}; choose from {CLOSED_SHELL_ATOMS}")
    z = ELEMENTS.index(sym) + 1
    shells = []
    for n, l, k in configuration(z):
        if k != 2 * (2 * l + 1):
            raise OrbitalError(f"{sym} has an open subshell")
        for m in range(-l, l + 1):
            shells.append(Shell(n, l, m, SLATER_ZEFF[sym][(n, l)]))
    return HydrogenicSpec(shells, tuple(center), label=f"{sym.lower()}-slater")


def parse_shell_list(text: str, center=(0.0, 0.0, 0.0)) -> HydrogenicSpec:
    """Parse ``"1s:17.7,2p:13.85"`` style specs; a p or d entry expands to all m."""
    entries = [e.strip() for e in text.split(",") if e.strip()]
    if not entries:
        raise OrbitalError("empty shell list")
    shells = []
    for e in entries:
        try:
            name, z = e.split(":")
            n, letter = int(name[:-1]), name[-1].lower()
            l = "spdf".index(letter)
            zeff = float(z)
        except ValueError as exc:
            raise OrbitalError(f"cannot parse shell entry {e!r}; expected like 2p:13.85") from exc
        shells.extend(Shell(n, l, m, zeff) for m in range(-l, l + 1))
    return HydrogenicSpec(shells, tuple(center), label="custom")


# --------------------------------------------------------------------------
# Gaussian model sets


class _GaussianPrimitives(OrbitalSet):
    provider = "gaussian"

    def __init__(self, centers, exponents):
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 3)
        self.exponents = np.asarray(exponents, dtype=float).reshape(-1)
        if len(self.centers) != len(self.exponents) or np.any(self.exponents <= 0):
            raise OrbitalError("need one positive exponent per Gaussian center")
        self.norms = (2.0 * self.exponents / math.pi) ** 0.75
        super().__init__(len(self.exponents))

    def _parts(self, points):
        pts = np.asarray(points, dtype=float)
        d = pts[None, :, :] - self.centers[:, None, :]
        r2 = np.einsum("ijk,ijk->ij", d, d)
        g = self.norms[:, None] * np.exp(-self.exponents[:, None] * r2)
        return d, r2, g

    def values(self, points):
        return self._parts(points)[2]

    def gradients(self, points):
        d, _, g = self._parts(points)
        return -2.0 * self.exponents[:, None, None] * d * g[..., None]

    def laplacians(self, points):
        _, r2, g = self._parts(points)
        a = self.exponents[:, None]
        return (4.0 * a**2 * r2 - 6.0 * a) * g

    def overlap(self) -> np.ndarray:
        a = self.exponents[:, None]
        b = self.exponents[None, :]
        d = self.centers[:, None, :] - self.centers[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", d, d)
        pref = np.outer(self.norms, self.norms) * (math.pi / (a + b)) ** 1.5
        return pref * np.exp(-a * b / (a + b) * r2)


def gaussian_set(centers, exponents, coeffs=None, orthogonalize: bool = True, label: str = "gaussian") -> OrbitalSet:
    """Linear combinations of normalized s-type Gaussians.

    ``coeffs`` rows define the orbitals in the primitive basis (identity if
    omitted); rows are orthonormalized in order when ``orthogonalize`` is set.
    """
    prim = _GaussianPrimitives(centers, exponents)
    coeffs = np.eye(prim.count) if coeffs is None else np.atleast_2d(np.asarray(coeffs))
    s = prim.overlap()
    if orthogonalize:
        coeffs = gram_schmidt(coeffs, s)
    out = LinearCombinationSet(prim, coeffs, provider="gaussian", params={"label": label})
    out.overlap = np.conj(coeffs) @ s @ coeffs.T
    return out


def two_center_toy(
    separation: float = 2.27, core_exponent: float = 4.0, bond_exponent: float = 0.6
) -> OrbitalSet:
    """Two tight cores plus one bonding orbital spread over both centers.

    Centers lie on the x axis at ``+-separation/2``.
    """
    half = separation / 2.0
    centers = [(-half, 0, 0), (half, 0, 0), (-half, 0, 0), (half, 0, 0)]
    exponents = [core_exponent, core_exponent, bond_exponent, bond_exponent]
    coeffs = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]], dtype=float)
    return gaussian_set(centers, exponents, coeffs, label="two-center-toy")


# --------------------------------------------------------------------------
# ingested numerical orbitals


class GridOrbitalSet(OrbitalSet):
    """Real orbitals sampled on a grid, with finite-difference derivatives.

    Off-grid evaluation interpolates values and derivative arrays trilinearly.
    """

    provider = "grid"

    def __init__(self, grid: UniformGrid3D, data, params=None):
        data = np.asarray(data)
        if data.ndim == 3:
            data = data[None]
        if data.shape[1:] != grid.dims:
            raise GridError(f"orbital data shape {data.shape[1:]} does not match grid dims {grid.dims}")
        super().__init__(len(data), params)
        self.grid = grid
        self.data = data
        self._grad = None
        self._lap = None

    def grid_values(self) -> np.ndarray:
        return self.data

    def grid_gradients(self) -> np.ndarray:
        if self._grad is None:
            self._grad = np.array([gradient_array(d, self.grid) for d in self.data])
        return self._grad

    def grid_laplacians(self) -> np.ndarray:
        if self._lap is None:
            self._lap = np.array([laplacian_array(d, self.grid) for d in self.data])
        return self._lap

    def _interp(self, arrays, points):
        return np.array([interpolate_many(ScalarField(self.grid, a), points) for a in arrays])

    def values(self, points):
        return self._interp(self.data, points)

    def gradients(self, points):
        g = self.grid_gradients()
        return np.stack([self._interp(g[..., c], points) for c in range(3)], axis=-1)

    def laplacians(self, points):
        return self._interp(self.grid_laplacians(), points)

    def overlap_matrix(self) -> np.ndarray:
        """Overlap by the rectangle rule on the grid."""
        flat = self.data.reshape(self.count, -1)
        return (flat @ flat.conj().T) * self.grid.voxel_volume


def from_cube_files(paths) -> GridOrbitalSet:
    """One orbital per cube volume; all files must share one grid."""
    from .io import read_cube

    paths = list(paths)
    if not paths:
        raise OrbitalError("no cube files given")
    grid = None
    volumes = []
    for p in paths:
        doc = read_cube(p)
        g = doc.grid()
        if grid is None:
            grid = g
        elif not grid.same_as(g, tol=1e-10):
            raise GridError(f"{p}: grid differs from {paths[0]}")
        volumes.extend(doc.volumes())
    return GridOrbitalSet(grid, np.array(volumes), {"files": [str(p) for p in paths]})


def orbital_set_on_grid(orbs: OrbitalSet, grid: UniformGrid3D) -> np.ndarray:
    """Sample every orbital on the grid: shape ``(count,) + grid.dims``."""
    vals = orbs.values(grid.points())
    return vals.reshape((orbs.count,) + grid.dims)
