"""Closed forms for the ideal homogeneous gas."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .entanglement import concurrence_from_p, concurrence_gaussian, concurrence_short_range
from .orbitals import GasModel


def _envelope(x):
    """3 j_1(x) / x, with its series near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    exact = 3.0 * (np.sin(xs) - xs * np.cos(xs)) / xs**3
    x2 = x * x
    series = 1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2**3 / 15120.0
    return np.where(small, series, exact)


def rho1_unif(gas: GasModel, u):
    """One-body density matrix of the ideal gas at separation u."""
    out = gas.n * _envelope(gas.k_F * np.asarray(u, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def concurrence_exact_unif(gas: GasModel, u):
    g2 = _envelope(gas.k_F * np.asarray(u, dtype=float)) ** 2
    h = -gas.n * g2
    p = -h / (2.0 * gas.n + h)
    return concurrence_from_p(p)


def crossing_kf_u() -> float:
    """k_F u at which the exact curve first reaches zero: [3 j_1(x)/x]^2 = 1/2."""
    return brentq(lambda x: float(_envelope(x)) ** 2 - 0.5, 1.0, 3.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def zero_crossing(gas: GasModel) -> float:
    return crossing_kf_u() / gas.k_F


def entanglement_length_unif(gas: GasModel) -> float:
    return math.sqrt(5.0 / 3.0) / gas.k_F


@dataclass
class GasCurves:
    gas: GasModel
    u_samples: np.ndarray
    c_exact: np.ndarray
    c_sr: np.ndarray
    c_gauss: np.ndarray


def fig1_curves(gas: GasModel, u_max: float, samples: int) -> GasCurves:
    """Exact, quadratic and Gaussian concurrence on a uniform u grid from 0 to u_max."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not u_max > 0:
        raise ValueError("u_max must be positive")
    u = np.linspace(0.0, u_max, samples)
    inv_le = 1.0 / entanglement_length_unif(gas)
    return GasCurves(
        gas,
        u,
        concurrence_exact_unif(gas, u),
        concurrence_short_range(inv_le**2, u),
        concurrence_gaussian(inv_le, u),
    )
