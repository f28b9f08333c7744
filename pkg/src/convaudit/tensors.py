"""Tensor values and the on-disk tensor dump format.

Dump layout (all integers little-endian, no padding, no trailer):

    offset  size       content
    0       4          magic b"TDMP"
    4       2          format version, u16, currently 1
    6       1          dtype code, u8: 1 = f32, 2 = f64, 3 = i64
    7       1          rank, u8
    8       8 * rank   dimensions, u64 each
    ...     rest       elements, row-major, native width

A rank-0 scalar therefore occupies 8 header bytes plus one element.  The
element count must match the dimension product exactly; trailing bytes are
an error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from math import prod
from pathlib import Path

import numpy as np

from .errors import DumpUnreadable, MalformedInput, UnsupportedDtype

MAGIC = b"TDMP"
VERSION = 1

# dtype name -> (code, little-endian numpy dtype)
DTYPES: dict[str, tuple[int, np.dtype]] = {
    "f32": (1, np.dtype("<f4")),
    "f64": (2, np.dtype("<f8")),
    "i64": (3, np.dtype("<i8")),
}
_CODE_TO_NAME = {code: name for name, (code, _) in DTYPES.items()}


@dataclass(frozen=True, eq=False)
class Tensor:
    """An immutable dense tensor; data is flat, row-major."""

    dtype: str
    shape: tuple[int, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.dtype not in DTYPES:
            raise UnsupportedDtype(self.dtype)
        if any(d < 0 for d in self.shape):
            raise MalformedInput(f"negative dimension in shape {self.shape}")
        want = prod(self.shape)
        if self.data.ndim != 1 or self.data.size != want:
            raise MalformedInput(
                f"shape {self.shape} needs {want} element(s), data has {self.data.size}"
            )
        self.data.setflags(write=False)

    @property
    def size(self) -> int:
        return self.data.size


def make_tensor(dtype: str, shape: tuple[int, ...] | list[int], values) -> Tensor:
    if dtype not in DTYPES:
        raise UnsupportedDtype(dtype)
    arr = np.asarray(values, dtype=DTYPES[dtype][1]).reshape(-1).copy()
    return Tensor(dtype=dtype, shape=tuple(shape), data=arr)


def tensor_dump_bytes(tensor: Tensor) -> bytes:
    code, np_dtype = DTYPES[tensor.dtype]
    header = MAGIC + struct.pack("<HBB", VERSION, code, len(tensor.shape))
    dims = struct.pack(f"<{len(tensor.shape)}Q", *tensor.shape)
    payload = np.ascontiguousarray(tensor.data, dtype=np_dtype).tobytes()
    return header + dims + payload


def parse_tensor_dump(buf: bytes) -> Tensor:
    if len(buf) < 8:
        raise MalformedInput(f"dump shorter than the 8-byte fixed header ({len(buf)} bytes)")
    if buf[:4] != MAGIC:
        raise MalformedInput(f"bad magic {buf[:4]!r}")
    version, code, rank = struct.unpack_from("<HBB", buf, 4)
    if version != VERSION:
        raise MalformedInput(f"unsupported version {version}")
    if code not in _CODE_TO_NAME:
        raise MalformedInput(f"unknown dtype code {code}")
    dtype = _CODE_TO_NAME[code]
    dims_end = 8 + 8 * rank
    if len(buf) < dims_end:
        raise MalformedInput(f"truncated dimension list (rank {rank})")
    shape = struct.unpack_from(f"<{rank}Q", buf, 8)
    count = prod(shape)
    np_dtype = DTYPES[dtype][1]
    expected = dims_end + count * np_dtype.itemsize
    if len(buf) < expected:
        raise MalformedInput(
            f"truncated payload: need {expected} bytes for shape {shape}, have {len(buf)}"
        )
    if len(buf) > expected:
        raise MalformedInput(f"{len(buf) - expected} trailing byte(s) after payload")
    data = np.frombuffer(buf, dtype=np_dtype, count=count, offset=dims_end).copy()
    return Tensor(dtype=dtype, shape=tuple(int(d) for d in shape), data=data)


def write_tensor_dump(tensor: Tensor, path: str | Path) -> None:
    Path(path).write_bytes(tensor_dump_bytes(tensor))


def read_tensor_dump(path: str | Path) -> Tensor:
    """Read a dump file; failures raise DumpUnreadable naming the path."""
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise DumpUnreadable(str(path), str(exc)) from None
    try:
        return parse_tensor_dump(buf)
    except MalformedInput as exc:
        raise DumpUnreadable(str(path), str(exc)) from None
