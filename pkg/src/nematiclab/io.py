"""Binary ELSF snapshots, CSV writers and run manifests.

ELSF layout (little endian)::

    b"ELSF" | u32 version=1 | u32 dim | u32 res | f64 box_len | f64 time |
    u32 ncomp | ncomp * res**dim complex coefficients as (re, im) f64 pairs

Coefficients are written in C order of the ``(ncomp, M, ..., M)`` array,
i.e. component-major, then modes in FFT storage order per axis.
A :class:`SimState` is stored with ``ncomp = 2 * dim`` (velocity then director).
"""

from __future__ import annotations

import csv
import hashlib
import struct
from pathlib import Path

import numpy as np

from .spectral import Grid, SpectralField

MAGIC = b"ELSF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIddI")


def write_snapshot(path, field: SpectralField, time: float = 0.0) -> None:
    g = field.grid
    header = _HEADER.pack(MAGIC, VERSION, g.dim, g.res, g.box_len, float(time), field.ncomp)
    data = np.ascontiguousarray(field.coeffs, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_snapshot(path) -> tuple[SpectralField, float]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated ELSF header")
    magic, version, dim, res, box_len, time, ncomp = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported ELSF version {version}")
    grid = Grid(dim, res, box_len)
    count = ncomp * res**dim
    body = raw[_HEADER.size :]
    if len(body) != 16 * count:
        raise ValueError(f"{path}: expected {16 * count} payload bytes, found {len(body)}")
    coeffs = np.frombuffer(body, dtype="<c16").astype(complex).reshape((ncomp,) + grid.shape)
    return SpectralField(grid, coeffs), time


def fmt(x) -> str:
    """Serialize a float with 17 significant digits (exact binary64 round trip)."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def git_blob_hash(data: bytes) -> str:
    """Content hash in the same form git uses for blobs."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def write_manifest(path, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key} = {fmt(value)}\n")
