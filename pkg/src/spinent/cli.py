"""Command-line front end.

Every option can also come from a plain-text ``key=value`` file passed with
``--config``; flags given on the command line win over file values. Exit
codes: 0 success, 1 runtime failure, 2 usage error. Errors go to stderr
prefixed with ``spinent: error:`` or ``spinent: usage error:``.
"""

from __future__ import annotations

import argparse
import glob
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import parallel
from .analysis import local_extrema, parse_plane, plane_slice, radial_profile
from .elf import elf_values_from_chi
from .entanglement import averaged_pair, concurrence_from_p, concurrence_pairs
from .errors import SpinEntError
from .fermi_gas import crossing_kf_u, entanglement_length_unif, fig1_curves, rho1_unif, zero_crossing
from .fields import compute_fields
from .grid import inside_hull, sphere_quadrature
from .io import cube_from_volumes, save_csv, save_cube
from .orbitals import (
    CLOSED_SHELL_ATOMS,
    GasModel,
    GridOrbitalSet,
    closed_shell_atom,
    from_cube_files,
    hydrogenic_set,
    parse_shell_list,
)

PROG = "spinent"
log = logging.getLogger(PROG)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Report argument errors through the same prefix and exit code as other usage errors."""

    def error(self, message):
        sub = self.prog[len(PROG):].strip()
        raise UsageError(f"{sub}: {message}" if sub else message)


# --------------------------------------------------------------------------
# value converters (shared by flags and config files)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _vec3(text: str) -> np.ndarray:
    vals = _float_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return np.array(vals)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _scan(text: str) -> tuple[float, int]:
    vals = str(text).split(",")
    try:
        u_max, n = float(vals[0]), int(vals[1])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"--scan expects u_max,N, got {text!r}") from None
    return u_max, n


# (flag, dest, converter, default, help)
COMMON = [
    ("--out", "out", str, ".", "output directory"),
    ("--workers", "workers", int, 1, "worker threads for field and pair loops"),
    ("--plots", "plots", _bool, True, "render PNG figures next to the CSV files (true/false)"),
]
SOURCE = [
    ("--model", "model", str, None, f"closed-shell model: {', '.join(a.lower() + '-slater' for a in CLOSED_SHELL_ATOMS)}"),
    ("--shells", "shells", str, None, "hydrogenic shells like 1s:17.7,2s:13.85,2p:13.85"),
    ("--cubes", "cubes", str, None, "glob of orbital cube files"),
]
COMMANDS = {
    "gas-compare": [
        ("--rs", "rs", _float_list, "0.5,1.0,4.0", "comma-separated Wigner-Seitz radii (bohr)"),
        ("--umax", "umax", float, 5.0, "largest separation (bohr)"),
        ("--samples", "samples", int, 501, "samples per curve"),
    ],
    "atom-profile": SOURCE + [
        ("--rmax", "rmax", float, 6.0, "largest radius (bohr)"),
        ("--samples", "samples", int, 600, "radial samples"),
        ("--order", "order", int, 17, "sphere quadrature order"),
    ],
    "analyze-cube": [
        ("--cubes", "cubes", str, None, "glob of orbital cube files"),
        ("--plane", "plane", str, "z=0", "slice plane, e.g. z=0.0"),
    ],
    "pair": SOURCE + [
        ("--gas", "gas", float, None, "homogeneous gas with this r_s instead of orbitals"),
        ("--r1", "r1", _vec3, None, "first position x,y,z (bohr)"),
        ("--r2", "r2", _vec3, None, "second position x,y,z (bohr)"),
        ("--scan", "scan", _scan, None, "scan C along r1->r2 up to u_max with N samples: u_max,N"),
        ("--average", "average", _bool, False, "scan the spherical average around r1 instead (true/false)"),
        ("--order", "order", int, 17, "sphere quadrature order"),
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Spin-entanglement fields from occupied orbitals.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        sp = subs.add_parser(name)
        sp.add_argument("--config", default=None, help="key=value configuration file")
        for flag, dest, conv, _default, help_ in opts + COMMON:
            sp.add_argument(flag, dest=dest, type=conv, default=None, help=help_)
        sp.add_argument("--no-plots", dest="plots", action="store_const", const=False, help="write data files only")
    return parser


def read_config(path) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for i, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config values over built-in defaults."""
    opts = COMMANDS[args.command] + COMMON
    file_values = read_config(args.config) if args.config else {}
    known = {dest for _, dest, *_ in opts}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    cfg = {"command": args.command}
    for _flag, dest, conv, default, _help in opts:
        value = getattr(args, dest)
        if value is None and dest in file_values:
            try:
                value = conv(file_values[dest])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {dest}: {exc}") from None
        if value is None and default is not None:
            value = conv(default) if isinstance(default, str) else default
        cfg[dest] = value
    return cfg


def _describe(cfg: dict) -> str:
    def fmt(v):
        if isinstance(v, np.ndarray):
            return ",".join(repr(float(x)) for x in v)
        if isinstance(v, (list, tuple)):
            return ",".join(str(x) for x in v)
        return str(v)

    return " ".join(f"{k}={fmt(v)}" for k, v in cfg.items())


# --------------------------------------------------------------------------
# sources


def _expand(pattern: str) -> list[str]:
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise UsageError(f"no files match {pattern!r}")
    return paths


def load_source(cfg: dict):
    chosen = [k for k in ("model", "shells", "cubes") if cfg.get(k) is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one orbital source: --model, --shells or --cubes")
    kind = chosen[0]
    if kind == "model":
        name = cfg["model"].lower()
        symbol = name.split("-")[0]
        if not name.endswith("-slater") or symbol.capitalize() not in CLOSED_SHELL_ATOMS:
            raise UsageError(f"unknown model {cfg['model']!r}")
        return hydrogenic_set(closed_shell_atom(symbol))
    if kind == "shells":
        try:
            return hydrogenic_set(parse_shell_list(cfg["shells"]))
        except SpinEntError as exc:
            raise UsageError(str(exc)) from None
    return from_cube_files(_expand(cfg["cubes"]))


# --------------------------------------------------------------------------
# subcommands


def cmd_gas_compare(cfg: dict, out: Path) -> None:
    rs_list = cfg["rs"]
    if not rs_list or any(not (r > 0) or not math.isfinite(r) for r in rs_list):
        raise UsageError(f"every r_s must be a positive number, got {rs_list}")
    if cfg["samples"] < 2:
        raise UsageError("--samples must be at least 2")
    if not cfg["umax"] > 0:
        raise UsageError("--umax must be positive")
    curves = []
    summary = {"r_s": [], "n": [], "k_F": [], "l_E_unif": [], "u_crossing": [], "kF_u_crossing": []}
    x_star = crossing_kf_u()
    for rs in rs_list:
        gas = GasModel.from_rs(rs)
        c = fig1_curves(gas, cfg["umax"], cfg["samples"])
        curves.append(c)
        save_csv(out / f"gas_rs_{rs:g}.csv", {"u": c.u_samples, "c_exact": c.c_exact, "c_sr": c.c_sr, "c_gauss": c.c_gauss})
        summary["r_s"].append(rs)
        summary["n"].append(gas.n)
        summary["k_F"].append(gas.k_F)
        summary["l_E_unif"].append(entanglement_length_unif(gas))
        summary["u_crossing"].append(zero_crossing(gas))
        summary["kF_u_crossing"].append(x_star)
    save_csv(out / "gas_summary.csv", summary)
    if cfg["plots"]:
        from .plotting import plot_gas_curves

        plot_gas_curves(curves, out / "gas_curves.png")


def cmd_atom_profile(cfg: dict, out: Path) -> None:
    if cfg["samples"] < 2:
        raise UsageError("--samples must be at least 2")
    if not cfg["rmax"] > 0:
        raise UsageError("--rmax must be positive")
    orbs = load_source(cfg)
    try:
        quad = sphere_quadrature(cfg["order"])
    except SpinEntError as exc:
        raise UsageError(str(exc)) from None
    prof = radial_profile(orbs, cfg["rmax"], cfg["samples"], quad=quad)
    if prof.masked:
        log.warning("%d quadrature nodes fell outside the cube grid and were masked", prof.masked)
    save_csv(out / "atom_profile.csv", prof.columns())
    maxima = local_extrema(prof.elf, "max")
    minima = local_extrema(prof.elf, "min", include_start=False)
    order = np.argsort(np.concatenate([maxima, minima]), kind="stable")
    idx = np.concatenate([maxima, minima])[order]
    kind = np.concatenate([np.ones(len(maxima)), -np.ones(len(minima))])[order]
    save_csv(
        out / "atom_elf_extrema.csv",
        {"r": prof.r[idx], "elf": prof.elf[idx], "inv_lE": prof.inv_lE[idx], "type": kind},
    )
    log.info("ELF maxima at r = %s", ", ".join(f"{r:.4g}" for r in prof.r[maxima]))
    if cfg["plots"]:
        from .plotting import plot_radial_profile

        plot_radial_profile(prof, out / "atom_profile.png", prof.r[maxima])


def cmd_analyze_cube(cfg: dict, out: Path) -> None:
    if not cfg.get("cubes"):
        raise UsageError("--cubes is required")
    try:
        axis, offset = parse_plane(cfg["plane"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    orbs = from_cube_files(_expand(cfg["cubes"]))
    bundle = compute_fields(orbs, orbs.grid)
    elf = np.where(bundle.defined, elf_values_from_chi(bundle.D.values, bundle.n.values)[0], np.nan)
    inv = bundle.inv_lE.values
    sl = plane_slice(orbs.grid, elf, inv, axis, offset)
    tag = f"{'xyz'[axis]}_{offset:g}"
    save_csv(out / f"plane_{tag}.csv", sl.columns())
    save_cube(out / "elf.cube", cube_from_volumes(orbs.grid, np.nan_to_num(elf), ("ELF", "undefined points written as 0")))
    save_cube(out / "inv_lE.cube", cube_from_volumes(orbs.grid, np.nan_to_num(inv), ("inverse entanglement length (1/bohr)", "undefined points written as 0")))
    if cfg["plots"]:
        from .plotting import plot_plane

        plot_plane(sl, out / f"plane_{tag}.png")


def _gas_pairs(gas: GasModel, r1, r2) -> dict:
    u = np.linalg.norm(np.atleast_2d(r2) - np.atleast_2d(r1), axis=1)
    rho = rho1_unif(gas, u)
    h = -np.asarray(rho) ** 2 / gas.n
    p = -h / (2.0 * gas.n + h)
    n = np.full(len(u), gas.n)
    return {"p": p, "C": concurrence_from_p(p), "h_X": h, "n1": n, "n2": n, "defined": np.ones(len(u), bool)}


def cmd_pair(cfg: dict, out: Path) -> None:
    r1, r2 = cfg.get("r1"), cfg.get("r2")
    if r1 is None or r2 is None:
        raise UsageError("--r1 and --r2 are required")
    if cfg.get("gas") is not None:
        if any(cfg.get(k) is not None for k in ("model", "shells", "cubes")):
            raise UsageError("--gas cannot be combined with an orbital source")
        if not cfg["gas"] > 0:
            raise UsageError("--gas r_s must be positive")
        gas = GasModel.from_rs(cfg["gas"])
        orbs = None

        def pairs(a, b):
            return _gas_pairs(gas, a, b)
    else:
        orbs = load_source(cfg)

        def pairs(a, b):
            a = np.atleast_2d(a)
            b = np.atleast_2d(b)
            if isinstance(orbs, GridOrbitalSet):
                ok = inside_hull(orbs.grid, a) & inside_hull(orbs.grid, b)
                res = concurrence_pairs(orbs, np.where(ok[:, None], a, orbs.grid.origin), np.where(ok[:, None], b, orbs.grid.origin))
                for key in ("p", "C", "h_X", "n1", "n2"):
                    res[key] = np.where(ok, res[key], np.nan)
                res["defined"] = res["defined"] & ok
                return res
            return concurrence_pairs(orbs, a, b)

    single = pairs(r1, r2)
    if not single["defined"][0]:
        log.warning("pair is undefined (density below floor or outside the data grid)")
    save_csv(
        out / "pair.csv",
        {
            "n1": single["n1"], "n2": single["n2"], "h_X": single["h_X"], "p": single["p"], "C": single["C"],
            "entangled": (single["C"] > 0).astype(float), "defined": single["defined"].astype(float),
        },
    )
    if cfg.get("scan") is None:
        return
    u_max, count = cfg["scan"]
    if count < 2 or not u_max > 0:
        raise UsageError("--scan needs u_max > 0 and at least 2 samples")
    us = np.linspace(0.0, u_max, count)
    if cfg["average"]:
        quad = sphere_quadrature(cfg["order"])
        if orbs is None:
            res = _gas_pairs(gas, np.zeros((count, 3)), us[:, None] * np.array([1.0, 0.0, 0.0]))
            cols = {"u": us, "C": res["C"], "p": res["p"], "h_X": res["h_X"], "n2": res["n2"]}
        else:
            c, p, h, nb = [], [], [], []
            for u in us:
                try:
                    pe = averaged_pair(orbs, r1, float(u), quad)
                    c.append(pe.C), p.append(pe.p), h.append(pe.h_X), nb.append(pe.n2)
                except SpinEntError:
                    c.append(np.nan), p.append(np.nan), h.append(np.nan), nb.append(np.nan)
            cols = {"u": us, "C": np.array(c), "p": np.array(p), "h_X": np.array(h), "n2": np.array(nb)}
    else:
        d = r2 - r1
        norm = np.linalg.norm(d)
        if norm == 0:
            raise UsageError("a segment scan needs r2 != r1 (or use --average true)")
        pts = r1 + us[:, None] * (d / norm)
        res = pairs(np.repeat(r1[None], count, axis=0), pts)
        cols = {"u": us, "C": res["C"], "p": res["p"], "h_X": res["h_X"], "n2": res["n2"]}
    save_csv(out / "pair_scan.csv", cols)
    if cfg["plots"]:
        from .plotting import plot_pair_scan

        plot_pair_scan(cols["u"], cols["C"], out / "pair_scan.png")


HANDLERS = {
    "gas-compare": cmd_gas_compare,
    "atom-profile": cmd_atom_profile,
    "analyze-cube": cmd_analyze_cube,
    "pair": cmd_pair,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format=f"{PROG}: %(levelname)s: %(message)s", stream=sys.stderr, force=True)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"{PROG}: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = resolve(args)
        if cfg["workers"] < 1:
            raise UsageError("--workers must be at least 1")
        log.info("config: %s", _describe(cfg))
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        parallel.set_workers(cfg["workers"])
        HANDLERS[args.command](cfg, out)
    except UsageError as exc:
        print(f"{PROG}: usage error: {exc}", file=sys.stderr)
        return 2
    except (SpinEntError, OSError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    finally:
        parallel.set_workers(1)
    return 0


def run() -> None:
    sys.exit(main())
