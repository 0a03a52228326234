"""TNS3 tensor files.

Layout: one ASCII header line ``TNS3 <n1> <n2> <n3>\\n`` followed by
``n1*n2*n3`` little-endian float64 values, frontal slice by frontal slice,
row-major inside each slice.
"""

import os

import numpy as np

from .errors import FormatError
from .tcore import as_tensor3

_MAGIC = b"TNS3"
_DTYPE = np.dtype("<f8")


def to_bytes(a):
    a = as_tensor3(a)
    n1, n2, n3 = a.shape
    header = f"TNS3 {n1} {n2} {n3}\n".encode("ascii")
    # (n3, n1, n2) C-order == slice-major, row-major within a slice
    payload = np.ascontiguousarray(a.transpose(2, 0, 1), dtype=_DTYPE).tobytes()
    return header + payload


def from_bytes(buf):
    nl = buf.find(b"\n")
    if nl < 0:
        raise FormatError("missing TNS3 header line")
    parts = buf[:nl].split()
    if len(parts) != 4 or parts[0] != _MAGIC:
        raise FormatError(f"bad TNS3 header: {buf[:nl][:64]!r}")
    try:
        n1, n2, n3 = (int(p) for p in parts[1:])
    except ValueError:
        raise FormatError(f"bad TNS3 dimensions: {buf[:nl]!r}") from None
    if min(n1, n2, n3) < 1:
        raise FormatError(f"TNS3 dimensions must be positive, got {(n1, n2, n3)}")
    payload = buf[nl + 1:]
    expected = n1 * n2 * n3 * _DTYPE.itemsize
    if len(payload) != expected:
        raise FormatError(f"TNS3 payload has {len(payload)} bytes, expected {expected}")
    data = np.frombuffer(payload, dtype=_DTYPE).reshape(n3, n1, n2)
    return as_tensor3(data.transpose(1, 2, 0).astype(np.float64))


def write(path, a):
    with open(os.fspath(path), "wb") as fh:
        fh.write(to_bytes(a))


def read(path):
    with open(os.fspath(path), "rb") as fh:
        return from_bytes(fh.read())
