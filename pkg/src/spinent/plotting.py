"""Report figures written next to the CSV output.

All figures go through the Agg backend and are saved without a software
version stamp, so identical data gives identical PNG bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fermi_gas import GasCurves  # noqa: E402

_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def _save(fig, path):
    fig.savefig(path, format="png", **_SAVE_KW)
    plt.close(fig)


def plot_gas_curves(curves: list[GasCurves], path) -> None:
    """Exact curves solid, quadratic form dashed, Gaussian form as bullets."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for c, color in zip(curves, colors * 4):
        label = f"$r_s$ = {c.gas.r_s:g}"
        ax.plot(c.u_samples, c.c_exact, "-", color=color, label=label)
        ax.plot(c.u_samples, c.c_sr, "--", color=color)
        step = max(1, len(c.u_samples) // 40)
        ax.plot(c.u_samples[::step], c.c_gauss[::step], "o", color=color, ms=3)
    ax.set_xlabel("u (bohr)")
    ax.set_ylabel("concurrence C")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlim(0, max(c.u_samples[-1] for c in curves))
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)


def plot_radial_profile(profile, path, extrema_r=()) -> None:
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(5.5, 7.0))
    axes[0].plot(profile.r, profile.inv_lE, "-k")
    axes[0].set_ylabel(r"$l_E^{-1}$ (bohr$^{-1}$)")
    axes[1].plot(profile.r, profile.elf, "-k")
    for r in extrema_r:
        axes[1].axvline(r, color="0.7", lw=0.8, ls=":")
    axes[1].set_ylabel("ELF")
    axes[1].set_ylim(0, 1.02)
    axes[2].semilogy(profile.r, np.where(profile.n > 0, profile.n, np.nan), "-k")
    axes[2].set_ylabel(r"n (bohr$^{-3}$)")
    axes[2].set_xlabel("r (bohr)")
    fig.tight_layout()
    _save(fig, path)


def plot_plane(sl, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    extent = (sl.u[0], sl.u[-1], sl.v[0], sl.v[-1])
    for ax, data, title in ((axes[0], sl.elf, "ELF"), (axes[1], sl.inv_lE, r"$l_E^{-1}$")):
        im = ax.imshow(np.asarray(data, dtype=float).T, origin="lower", extent=extent, cmap="viridis", aspect="equal")
        ax.set_title(title)
        ax.set_xlabel(f"{sl.coord_names[0]} (bohr)")
        ax.set_ylabel(f"{sl.coord_names[1]} (bohr)")
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    _save(fig, path)


def plot_pair_scan(u, c, path, label="C") -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(u, c, "-k", label=label)
    ax.set_xlabel("u (bohr)")
    ax.set_ylabel("concurrence C")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    _save(fig, path)
