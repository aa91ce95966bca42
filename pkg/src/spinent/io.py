"""Gaussian cube files and CSV export.

Cube grammar: two comment lines; ``natoms ox oy oz``; three axis lines
``count vx vy vz``; ``|natoms|`` atom lines ``Z charge x y z``; when natoms is
negative, an orbital record ``norb id1 id2 ...``; then the values with the
x index slowest and z fastest (and, for orbital files, the orbital index
fastest of all). A negative axis count marks angstrom units; everything is
converted to bohr on reading.
"""

from __future__ import annotations

import csv
import io as _io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CsvError, CubeParseError
from .grid import UniformGrid3D

ANGSTROM_TO_BOHR = 1.8897259886
VALUES_PER_LINE = 6


@dataclass
class Atom:
    number: int
    charge: float
    position: tuple[float, float, float]


@dataclass
class CubeDocument:
    comments: tuple[str, str]
    origin: np.ndarray
    counts: tuple[int, int, int]
    axes: np.ndarray
    atoms: list[Atom] = field(default_factory=list)
    orbital_ids: list[int] | None = None
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)
        self.axes = np.asarray(self.axes, dtype=float).reshape(3, 3)
        self.counts = tuple(int(c) for c in self.counts)
        self.values = np.asarray(self.values, dtype=float).ravel()
        expected = math.prod(self.counts) * self.n_volumes
        if self.values.size != expected:
            raise ValueError(f"cube holds {self.values.size} values, expected {expected}")

    @property
    def natoms(self) -> int:
        """Signed atom count as written in the file."""
        return -len(self.atoms) if self.orbital_ids is not None else len(self.atoms)

    @property
    def n_volumes(self) -> int:
        return len(self.orbital_ids) if self.orbital_ids is not None else 1

    def grid(self) -> UniformGrid3D:
        return UniformGrid3D(self.origin, self.axes, self.counts)

    def volumes(self) -> list[np.ndarray]:
        data = self.values.reshape(self.counts + (self.n_volumes,))
        return [np.ascontiguousarray(data[..., v]) for v in range(self.n_volumes)]

    def equals(self, other: "CubeDocument", rtol: float = 0.0) -> bool:
        scale = max(np.abs(self.values).max(initial=0.0), 1e-300)
        return (
            self.comments == other.comments
            and self.counts == other.counts
            and self.orbital_ids == other.orbital_ids
            and len(self.atoms) == len(other.atoms)
            and all(
                a.number == b.number and a.charge == b.charge and a.position == b.position
                for a, b in zip(self.atoms, other.atoms)
            )
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.axes, other.axes)
            and self.values.shape == other.values.shape
            and bool(np.all(np.abs(self.values - other.values) <= rtol * scale))
        )


def cube_from_volumes(grid: UniformGrid3D, volumes, comments=("", ""), atoms=None, orbital_ids=None) -> CubeDocument:
    """Build a document from one or more arrays shaped like ``grid.dims``."""
    vols = np.asarray(volumes, dtype=float)
    if vols.ndim == 3:
        vols = vols[None]
    if orbital_ids is None and len(vols) > 1:
        orbital_ids = list(range(1, len(vols) + 1))
    data = np.moveaxis(vols, 0, -1)
    return CubeDocument(
        tuple(comments), grid.origin.copy(), grid.dims, grid.axes.copy(), list(atoms or []), orbital_ids, data.ravel()
    )


# --------------------------------------------------------------------------
# parsing


def _number(token: str, lineno: int) -> float:
    try:
        x = float(token)
    except ValueError:
        raise CubeParseError(f"non-numeric token {token[:40]!r}", lineno) from None
    if not math.isfinite(x):
        raise CubeParseError(f"non-finite value {token[:40]!r}", lineno)
    return x


def _integer(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        x = _number(token, lineno)
        if not x.is_integer():
            raise CubeParseError(f"expected an integer, got {token[:40]!r}", lineno) from None
        return int(x)


def parse_cube(data: bytes | str) -> CubeDocument:
    """Parse cube text. All failures raise CubeParseError with a 1-based line number."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = data[: exc.start].count(b"\n") + 1
            raise CubeParseError("file is not valid UTF-8 text", line) from None
    else:
        text = data
    lines = text.splitlines()
    if len(lines) < 6:
        raise CubeParseError("truncated header", len(lines) + 1)
    comments = (lines[0].rstrip("\r\n"), lines[1].rstrip("\r\n"))

    tok = lines[2].split()
    if len(tok) not in (4, 5):
        raise CubeParseError(f"expected 'natoms ox oy oz', got {len(tok)} fields", 3)
    natoms = _integer(tok[0], 3)
    origin = np.array([_number(t, 3) for t in tok[1:4]])
    if len(tok) == 5 and _integer(tok[4], 3) != 1:
        raise CubeParseError("only one value per grid point is supported", 3)

    counts, axes = [], []
    angstrom = None
    for a in range(3):
        lineno = 4 + a
        tok = lines[3 + a].split()
        if len(tok) != 4:
            raise CubeParseError(f"axis record needs a count and three components, got {len(tok)} fields", lineno)
        c = _integer(tok[0], lineno)
        if c == 0:
            raise CubeParseError("axis count must be non-zero", lineno)
        if angstrom is None:
            angstrom = c < 0
        elif angstrom != (c < 0):
            raise CubeParseError("axis counts mix bohr and angstrom signs", lineno)
        counts.append(abs(c))
        axes.append([_number(t, lineno) for t in tok[1:]])
    scale = ANGSTROM_TO_BOHR if angstrom else 1.0

    nat = abs(natoms)
    if 6 + nat > len(lines):
        raise CubeParseError(f"header declares {nat} atoms but the file ends first", len(lines) + 1)
    atoms = []
    for i in range(nat):
        lineno = 7 + i
        tok = lines[6 + i].split()
        if len(tok) != 5:
            raise CubeParseError(f"atom record needs 5 fields, got {len(tok)}", lineno)
        pos = tuple(_number(t, lineno) * scale for t in tok[2:])
        atoms.append(Atom(_integer(tok[0], lineno), _number(tok[1], lineno), pos))

    cursor = 6 + nat
    orbital_ids = None
    if natoms < 0:
        ids_tokens: list[tuple[str, int]] = []
        need = None
        while need is None or len(ids_tokens) < need:
            if cursor >= len(lines):
                raise CubeParseError("missing orbital record", cursor + 1)
            for t in lines[cursor].split():
                ids_tokens.append((t, cursor + 1))
            cursor += 1
            if need is None and ids_tokens:
                norb = _integer(ids_tokens[0][0], ids_tokens[0][1])
                if norb < 1:
                    raise CubeParseError("orbital count must be positive", ids_tokens[0][1])
                need = norb + 1
        if len(ids_tokens) != need:
            raise CubeParseError(
                f"orbital record lists {len(ids_tokens) - 1} ids, expected {need - 1}", ids_tokens[-1][1]
            )
        orbital_ids = [_integer(t, ln) for t, ln in ids_tokens[1:]]

    nvol = len(orbital_ids) if orbital_ids else 1
    expected = math.prod(counts) * nvol
    values = []
    for idx in range(cursor, len(lines)):
        for t in lines[idx].split():
            if len(values) >= expected:
                raise CubeParseError(f"more than the {expected} declared values", idx + 1)
            values.append(_number(t, idx + 1))
    if len(values) < expected:
        raise CubeParseError(f"truncated volumetric data: {len(values)} of {expected} values", len(lines) + 1)

    return CubeDocument(
        comments,
        origin * scale,
        tuple(counts),
        np.array(axes) * scale,
        atoms,
        orbital_ids,
        np.array(values, dtype=float),
    )


def read_cube(path) -> CubeDocument:
    try:
        return parse_cube(Path(path).read_bytes())
    except CubeParseError as exc:
        raise CubeParseError(f"{path}: {exc}") from None


# --------------------------------------------------------------------------
# writing


def write_cube(doc: CubeDocument) -> bytes:
    """Serialize in bohr; header floats use exact repr, values 13 significant digits."""
    out = [doc.comments[0], doc.comments[1]]
    out.append(f"{doc.natoms:5d} " + " ".join(repr(float(x)) for x in doc.origin))
    for c, v in zip(doc.counts, doc.axes):
        out.append(f"{c:5d} " + " ".join(repr(float(x)) for x in v))
    for a in doc.atoms:
        out.append(f"{a.number:5d} {float(a.charge)!r} " + " ".join(repr(float(x)) for x in a.position))
    if doc.orbital_ids is not None:
        out.append(" ".join(str(x) for x in [len(doc.orbital_ids)] + list(doc.orbital_ids)))
    row = doc.counts[2] * doc.n_volumes
    vals = doc.values.reshape(-1, row)
    for r in vals:
        for s in range(0, row, VALUES_PER_LINE):
            out.append(" ".join(f"{x: .12E}" for x in r[s:s + VALUES_PER_LINE]))
    return ("\n".join(out) + "\n").encode("ascii")


def save_cube(path, doc: CubeDocument) -> None:
    Path(path).write_bytes(write_cube(doc))


# --------------------------------------------------------------------------
# CSV


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def write_csv(columns: dict) -> bytes:
    """Header of column names, then one row per sample, full double precision."""
    names = list(columns)
    cols = [list(np.asarray(columns[n]).ravel()) if not isinstance(columns[n], list) else columns[n] for n in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise CsvError(f"ragged columns: lengths {sorted(lengths)}")
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue().encode("ascii")


def read_csv(data: bytes) -> dict[str, np.ndarray]:
    rows = list(csv.reader(_io.StringIO(data.decode("ascii"))))
    if not rows:
        raise CsvError("empty CSV")
    names = rows[0]
    body = rows[1:]
    return {n: np.array([float(r[i]) for r in body]) for i, n in enumerate(names)}


def save_csv(path, columns: dict) -> None:
    Path(path).write_bytes(write_csv(columns))
