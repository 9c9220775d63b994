"""Flat binary field snapshots.

Layout (little-endian): header {magic "MHDF", version u32, dim u32, n u32,
box_len f64, ncomp u32} followed by ncomp * n^dim f64 values in row-major
order, one component after another.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import UsageError
from .fields import Grid

MAGIC = b"MHDF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdI")


def write_snapshot(path, grid: Grid, components) -> None:
    """Write components (list of arrays of grid shape) to ``path``."""
    arrays = [np.ascontiguousarray(np.asarray(c, dtype="<f8")) for c in components]
    for a in arrays:
        if a.shape != grid.shape:
            raise UsageError(f"component shape {a.shape} != grid shape {grid.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.dim, grid.n, grid.box_len, len(arrays)))
        for a in arrays:
            fh.write(a.tobytes(order="C"))


def read_snapshot(path) -> tuple[Grid, list[np.ndarray]]:
    """Read a snapshot back as (grid, list of component arrays)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise UsageError(f"{path}: truncated snapshot header")
    magic, version, dim, n, box_len, ncomp = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise UsageError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise UsageError(f"{path}: unsupported version {version}")
    grid = Grid(dim, n, box_len)
    count = n**dim
    expected = _HEADER.size + ncomp * count * 8
    if len(raw) != expected:
        raise UsageError(f"{path}: expected {expected} bytes, found {len(raw)}")
    out = []
    for i in range(ncomp):
        start = _HEADER.size + i * count * 8
        flat = np.frombuffer(raw, dtype="<f8", count=count, offset=start)
        out.append(flat.reshape(grid.shape).astype(np.float64))
    return grid, out
