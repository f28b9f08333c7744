"""Tensor dump writer.

Byte layout (little-endian throughout):

    offset  size    field
    0       4       magic "TDMP"
    4       2       format version, u16 (currently 1)
    6       1       dtype code, u8: 1 = f32, 2 = f64, 3 = i64
    7       1       rank, u8
    8       8*rank  dims, u64 each
    ...             elements, row-major

Deliberately written from scratch against the format definition rather than
shared with the analysis side, so a round-trip test between the two
implementations actually checks something.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import UnsupportedDtype

_MAGIC = b"TDMP"
_VERSION = 1

# (kind, itemsize) -> (code, canonical little-endian dtype)
_CODES: dict[tuple[str, int], tuple[int, np.dtype]] = {
    ("f", 4): (1, np.dtype("<f4")),
    ("f", 8): (2, np.dtype("<f8")),
    ("i", 8): (3, np.dtype("<i8")),
}


def dump_bytes(tensor) -> bytes:
    """Serialize an array-like into the dump format."""
    if hasattr(tensor, "detach"):  # torch tensor
        tensor = tensor.detach().cpu().numpy()
    arr = np.asarray(tensor)
    key = (arr.dtype.kind, arr.dtype.itemsize)
    if key not in _CODES:
        raise UnsupportedDtype(str(arr.dtype))
    code, le_dtype = _CODES[key]
    if arr.ndim > 255:
        raise UnsupportedDtype(f"rank {arr.ndim} exceeds the u8 rank field")
    header = struct.pack("<4sHBB", _MAGIC, _VERSION, code, arr.ndim)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    payload = np.ascontiguousarray(arr, dtype=le_dtype).tobytes()
    return header + dims + payload


def dump_tensor(tensor, path: str | Path) -> None:
    """Write ``tensor`` to ``path`` in the dump format."""
    Path(path).write_bytes(dump_bytes(tensor))
