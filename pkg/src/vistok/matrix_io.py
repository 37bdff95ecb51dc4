"""Matrix exchange formats.

Binary layout (all little-endian)::

    offset  size  field
    0       4     magic b"VTKM"
    4       4     uint32 format version (1)
    8       4     uint32 rows
    12      4     uint32 cols
    16      4*r*c float32 values, row-major

CSV: one row per line, comma separated, no header, 17 significant digits (float64 round-trip).
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import IoError, MatrixFormatError

MAGIC = b"VTKM"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def encode_matrix(m: np.ndarray) -> bytes:
    m = np.asarray(m)
    if m.ndim != 2:
        raise MatrixFormatError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixFormatError("matrix contains non-finite values")
    rows, cols = m.shape
    return _HEADER.pack(MAGIC, VERSION, rows, cols) + m.astype("<f4").tobytes(order="C")


def decode_matrix(buf: bytes) -> np.ndarray:
    if len(buf) < _HEADER.size:
        raise MatrixFormatError("truncated header")
    magic, version, rows, cols = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise MatrixFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise MatrixFormatError(f"unsupported matrix version {version}")
    expected = _HEADER.size + 4 * rows * cols
    if len(buf) != expected:
        raise MatrixFormatError(f"payload is {len(buf)} bytes, header implies {expected}")
    return np.frombuffer(buf, dtype="<f4", offset=_HEADER.size).reshape(rows, cols).astype(np.float64)


def write_matrix(path: str | os.PathLike, m: np.ndarray) -> None:
    path = os.fspath(path)
    try:
        if path.endswith(".csv"):
            np.savetxt(path, np.asarray(m, dtype=np.float64), delimiter=",", fmt="%.17g")
        else:
            with open(path, "wb") as fh:
                fh.write(encode_matrix(m))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    path = os.fspath(path)
    try:
        if path.endswith(".csv"):
            m = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
            if not np.all(np.isfinite(m)):
                raise MatrixFormatError(f"{path}: non-finite values")
            return m
        with open(path, "rb") as fh:
            return decode_matrix(fh.read())
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
