"""Two-spin entanglement between electrons at two positions.

For a closed-shell determinant the spin part of the pair density matrix at
(r1, r2) is a Werner state whose singlet weight is fixed by the exchange
hole, so the concurrence follows in closed form. The general Wootters
construction is kept alongside as an independent check.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import SpinEntError, UndefinedPointError
from .fields import N_FLOOR, point_fields
from .grid import SphereQuadrature, inside_hull, sphere_quadrature
from .orbitals import GridOrbitalSet, OrbitalSet
from .parallel import map_points

log = logging.getLogger(__name__)

# basis order: up-up, up-down, down-up, down-down
SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
SINGLET_PROJECTOR = np.outer(SINGLET, SINGLET).astype(complex)
IDENTITY4 = np.eye(4, dtype=complex)
_SIGMA_Y2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


@dataclass
class PairEntanglement:
    p: float
    C: float
    entangled: bool
    h_X: float = math.nan
    n1: float = math.nan
    n2: float = math.nan
    masked: int = 0


def concurrence_from_p(p):
    """Werner-state concurrence max{(3p-1)/2, 0}; works on scalars and arrays."""
    c = np.maximum((3.0 * np.asarray(p, dtype=float) - 1.0) / 2.0, 0.0)
    return float(c) if np.ndim(c) == 0 else c


def _pair_from_hole(h, n1, n2, masked=0) -> PairEntanglement:
    denom = 2.0 * n2 + h
    if not (n1 > N_FLOOR and n2 > N_FLOOR) or not denom > 0:
        raise UndefinedPointError(f"pair undefined: n1={n1:.3e}, n2={n2:.3e}, 2n2+h_X={denom:.3e}")
    p = -h / denom
    c = concurrence_from_p(p)
    return PairEntanglement(float(p), c, c > 0.0, float(h), float(n1), float(n2), masked)


# --------------------------------------------------------------------------
# one-body matrix and exchange hole


def _as_point(r) -> np.ndarray:
    return np.asarray(r, dtype=float).reshape(1, 3)


def rho1_many(orbs: OrbitalSet, r1, r2) -> np.ndarray:
    """rho_1(r1, r2) = 2 sum_i phi_i(r1) phi_i*(r2) for row-paired point arrays."""
    v1 = orbs.values(np.atleast_2d(r1))
    v2 = orbs.values(np.atleast_2d(r2))
    out = np.zeros(v1.shape[1], dtype=complex)
    for i in range(v1.shape[0]):
        out = out + 2.0 * v1[i] * np.conj(v2[i])
    return out


def rho1(orbs: OrbitalSet, r1, r2) -> complex:
    return complex(rho1_many(orbs, _as_point(r1), _as_point(r2))[0])


def density_at(orbs: OrbitalSet, points) -> np.ndarray:
    v = orbs.values(np.atleast_2d(points))
    out = np.zeros(v.shape[1])
    for i in range(v.shape[0]):
        out = out + 2.0 * np.real(np.conj(v[i]) * v[i])
    return out


def exchange_hole(orbs: OrbitalSet, r1, r2) -> float:
    """h_X(r1, r2) = -|rho_1(r1, r2)|^2 / n(r1)."""
    n1 = density_at(orbs, _as_point(r1))[0]
    if not n1 > N_FLOOR:
        raise UndefinedPointError(f"density {n1:.3e} at r1 is below the floor")
    return -abs(rho1(orbs, r1, r2)) ** 2 / n1


def _pair_arrays(orbs: OrbitalSet, r1, r2):
    r1 = np.atleast_2d(np.asarray(r1, dtype=float))
    r2 = np.atleast_2d(np.asarray(r2, dtype=float))
    v1 = orbs.values(r1)
    v2 = orbs.values(r2)
    rho = np.zeros(v1.shape[1], dtype=complex)
    n1 = np.zeros(v1.shape[1])
    n2 = np.zeros(v1.shape[1])
    for i in range(v1.shape[0]):
        rho = rho + 2.0 * v1[i] * np.conj(v2[i])
        n1 = n1 + 2.0 * np.real(np.conj(v1[i]) * v1[i])
        n2 = n2 + 2.0 * np.real(np.conj(v2[i]) * v2[i])
    return rho, n1, n2


def singlet_weight(orbs: OrbitalSet, r1, r2) -> float:
    """p = -h_X / (2 n(r2) + h_X); equals 1 on top, 1/3 at the entanglement threshold."""
    return concurrence_pair(orbs, r1, r2).p


def concurrence_pair(orbs: OrbitalSet, r1, r2) -> PairEntanglement:
    rho, n1, n2 = _pair_arrays(orbs, _as_point(r1), _as_point(r2))
    if not n1[0] > N_FLOOR:
        raise UndefinedPointError(f"density {n1[0]:.3e} at r1 is below the floor")
    h = -abs(rho[0]) ** 2 / n1[0]
    return _pair_from_hole(h, n1[0], n2[0])


def concurrence_pairs(orbs: OrbitalSet, r1, r2) -> dict[str, np.ndarray]:
    """Vectorized pair evaluation; undefined pairs come back as NaN."""
    stacked = np.hstack([np.atleast_2d(r1), np.atleast_2d(r2)]).astype(float)

    def work(chunk):
        rho, n1, n2 = _pair_arrays(orbs, chunk[:, :3], chunk[:, 3:])
        return rho, n1, n2

    rho, n1, n2 = map_points(work, stacked)
    ok = (n1 > N_FLOOR) & (n2 > N_FLOOR)
    safe1 = np.where(ok, n1, 1.0)
    h = np.where(ok, -np.abs(rho) ** 2 / safe1, np.nan)
    denom = 2.0 * n2 + h
    ok &= denom > 0
    p = np.where(ok, -h / np.where(ok, denom, 1.0), np.nan)
    c = np.where(ok, concurrence_from_p(np.nan_to_num(p)), np.nan)
    return {"p": p, "C": c, "h_X": h, "n1": n1, "n2": n2, "defined": ok}


# --------------------------------------------------------------------------
# two-spin states


@dataclass
class TwoSpinState:
    matrix: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex).reshape(4, 4)

    def normalize(self) -> "TwoSpinState":
        tr = np.trace(self.matrix).real
        if not tr > 0:
            raise SpinEntError(f"cannot normalize a state with trace {tr:.3e}")
        return TwoSpinState(self.matrix / tr, True)


def werner_state(p: float) -> TwoSpinState:
    return TwoSpinState(p * SINGLET_PROJECTOR + (1.0 - p) * IDENTITY4 / 4.0, True)


def state_from_hole(n1: float, n2: float, h_x: float) -> TwoSpinState:
    """Unnormalized pair spin matrix n1 (n2 + h) I/4 - n1 h |S><S| / 2."""
    m = n1 * (n2 + h_x) * IDENTITY4 / 4.0 - n1 * h_x * SINGLET_PROJECTOR / 2.0
    return TwoSpinState(m, False)


def build_two_spin_state(orbs: OrbitalSet, r1, r2) -> TwoSpinState:
    pair = concurrence_pair(orbs, r1, r2)
    return state_from_hole(pair.n1, pair.n2, pair.h_X)


def wootters_concurrence(state: TwoSpinState, tol: float = 1e-10) -> float:
    """General two-qubit concurrence max{0, l1 - l2 - l3 - l4}.

    The l_i are the singular values of ``W^T (sy x sy) W`` with
    ``rho = W W^dagger``; these equal the square roots of the eigenvalues of
    ``rho (sy x sy) rho* (sy x sy)`` in decreasing order.
    """
    rho = state.matrix
    if not state.normalized:
        rho = state.normalize().matrix
    if np.abs(rho - rho.conj().T).max() > tol:
        raise SpinEntError("state is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise SpinEntError("state is not trace-normalized")
    rho = 0.5 * (rho + rho.conj().T)
    mu, vecs = np.linalg.eigh(rho)
    if mu.min() < -tol:
        raise SpinEntError(f"state has negative eigenvalue {mu.min():.3e}")
    mu = np.where(mu < 1e-13, 0.0, mu)
    w = vecs * np.sqrt(mu)
    t = w.T @ _SIGMA_Y2 @ w
    lam = np.linalg.svd(t, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# --------------------------------------------------------------------------
# spherical averages and closed forms


def _shell_points(r, u, quad: SphereQuadrature) -> np.ndarray:
    return np.asarray(r, dtype=float).reshape(1, 3) + u * quad.nodes


def averaged_pair(
    orbs: OrbitalSet,
    r,
    u: float,
    quad: SphereQuadrature | None = None,
    density: str = "averaged",
) -> PairEntanglement:
    """Spherically averaged pair at distance ``u`` from ``r``.

    The hole and the density at r + u are averaged separately over the shell
    before forming p (average, then divide). ``density="pointwise"`` uses n(r)
    in place of the shell-averaged density in the denominator.

    To order u^2 the shell-averaged |rho_1|^2 carries a ``n lap(n) u^2 / 6``
    term that is cancelled exactly by the same term in the averaged density,
    so the default treatment gives ``1 - C = u^2 D / n + O(u^4)``, i.e. the
    short-range form. The pointwise denominator keeps the uncancelled
    Laplacian term and is only kept for comparison.
    """
    if u < 0:
        raise ValueError("u must be non-negative")
    quad = quad or sphere_quadrature()
    r = np.asarray(r, dtype=float).reshape(3)
    shell = _shell_points(r, u, quad)
    weights = np.asarray(quad.weights)
    masked = 0
    if isinstance(orbs, GridOrbitalSet):
        inside = inside_hull(orbs.grid, shell)
        masked = int((~inside).sum())
        if masked == len(shell):
            raise UndefinedPointError("every quadrature node lies outside the data grid")
        if masked:
            log.warning("averaged_pair: %d of %d quadrature nodes outside the grid were masked", masked, len(shell))
            shell = shell[inside]
            weights = weights[inside] / weights[inside].sum()
    centre = np.repeat(r.reshape(1, 3), len(shell), axis=0)
    rho, n1, n2 = _pair_arrays(orbs, centre, shell)
    n_r = n1[0]
    if not n_r > N_FLOOR:
        raise UndefinedPointError(f"density {n_r:.3e} at r is below the floor")
    h_bar = 0.0
    n_bar = 0.0
    for q in range(len(weights)):
        h_bar += weights[q] * (-abs(rho[q]) ** 2 / n_r)
        n_bar += weights[q] * n2[q]
    if density == "pointwise":
        n_bar = n_r
    elif density != "averaged":
        raise ValueError(f"unknown density treatment {density!r}")
    return _pair_from_hole(h_bar, n_r, n_bar, masked)


def averaged_scan(orbs: OrbitalSet, r, us, quad: SphereQuadrature | None = None) -> np.ndarray:
    """Averaged concurrence for each radius in ``us``."""
    return np.array([averaged_pair(orbs, r, float(u), quad).C for u in us])


def concurrence_short_range(D_over_n: float, u):
    """Lowest-order form max{0, 1 - u^2 D/n}; zero at u = l_E."""
    if np.any(np.asarray(D_over_n) < 0):
        raise ValueError("D/n must be non-negative")
    c = np.maximum(0.0, 1.0 - np.asarray(u, dtype=float) ** 2 * D_over_n)
    return float(c) if np.ndim(c) == 0 else c


def concurrence_gaussian(inv_lE: float, u):
    """Gaussian resummation exp(-u^2 / l_E^2)."""
    if np.any(np.asarray(inv_lE) < 0):
        raise ValueError("inverse entanglement length must be non-negative")
    c = np.exp(-(np.asarray(u, dtype=float) ** 2) * np.asarray(inv_lE) ** 2)
    return float(c) if np.ndim(c) == 0 else c


def local_length(orbs: OrbitalSet, r) -> tuple[float, float]:
    """(D/n, 1/l_E) at a single point."""
    pf = point_fields(orbs, _as_point(r))
    if not pf.n[0] > N_FLOOR:
        raise UndefinedPointError(f"density {pf.n[0]:.3e} at r is below the floor")
    d_over_n = float(pf.D[0] / pf.n[0])
    return d_over_n, float(pf.inv_lE[0])
