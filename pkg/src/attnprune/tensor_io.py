"""Bit-exact tensor interchange on disk.

The container is the NPY v1.0 layout restricted to little-endian
float32 in C order, so a stock ``numpy.save`` of such an array is
readable here and files written here open with ``numpy.load``. The
restriction keeps round-trips bit-exact and lets the loader reject
anything outside the contract with a typed error instead of guessing.
"""

from __future__ import annotations

import ast
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, RowSumWarning, ShapeError, ValueCheckError

_MAGIC = b"\x93NUMPY"
_DESCR = "<f4"
ROW_SUM_ATOL = 1e-4


@dataclass(frozen=True)
class AttentionMaps:
    """Multi-head attention maps of shape (heads, tokens, tokens).

    ``data`` holds finite, non-negative float32 weights indexed as
    (head, query, key). Construct through :meth:`from_array`, which
    enforces the invariants.
    """

    heads: int
    tokens: int
    data: np.ndarray

    @classmethod
    def from_array(cls, values) -> "AttentionMaps":
        arr = np.ascontiguousarray(values, dtype=np.float32)
        if arr.ndim != 3:
            raise ShapeError(f"attention tensor must be rank 3, got rank {arr.ndim}")
        heads, queries, keys = arr.shape
        if queries != keys:
            raise ShapeError(
                f"attention maps must be square, got trailing dims ({queries}, {keys})"
            )
        if heads < 1:
            raise ShapeError("attention tensor needs at least one head")
        if queries < 1:
            raise ShapeError("attention tensor needs at least one token")
        bad = ~(np.isfinite(arr) & (arr >= 0))
        if bad.any():
            h, q, k = np.unravel_index(int(np.argmax(bad)), arr.shape)
            raise ValueCheckError(
                f"attention value at (head={h}, query={q}, key={k}) is "
                f"invalid: {arr[h, q, k]!r} (must be finite and >= 0)"
            )
        arr.flags.writeable = False
        return cls(heads=heads, tokens=queries, data=arr)

    def row_sum_deviation(self) -> float:
        """Largest absolute deviation of any (head, query) row sum from 1."""
        sums = self.data.sum(axis=2, dtype=np.float64)
        return float(np.abs(sums - 1.0).max())


def write_tensor(values, path) -> None:
    """Write ``values`` as a little-endian float32 C-order NPY file."""
    arr = np.ascontiguousarray(values, dtype=np.float32)
    if arr.size and not np.all(np.isfinite(arr)):
        idx = np.unravel_index(int(np.argmax(~np.isfinite(arr))), arr.shape)
        raise ValueCheckError(f"non-finite value at index {tuple(int(i) for i in idx)}")
    header = (
        "{'descr': '%s', 'fortran_order': False, 'shape': %s, }"
        % (_DESCR, repr(arr.shape))
    )
    # pad so magic + version + length field + header ends on a 64-byte boundary
    unpadded = len(_MAGIC) + 2 + 2 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(b"\x01\x00")
        fh.write(struct.pack("<H", len(header)))
        fh.write(header.encode("latin1"))
        fh.write(arr.tobytes(order="C"))


def read_tensor(path) -> np.ndarray:
    """Read an NPY file, enforcing the float32/C-order restriction."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(_MAGIC) + 4 or blob[: len(_MAGIC)] != _MAGIC:
        raise FormatError(f"{path}: not a tensor file (bad magic)")
    major, minor = blob[6], blob[7]
    if (major, minor) == (1, 0):
        (hlen,) = struct.unpack_from("<H", blob, 8)
        body = 10
    elif (major, minor) in ((2, 0), (3, 0)):
        (hlen,) = struct.unpack_from("<I", blob, 8)
        body = 12
    else:
        raise FormatError(f"{path}: unsupported container version {major}.{minor}")
    if len(blob) < body + hlen:
        raise FormatError(f"{path}: truncated header")
    try:
        header = ast.literal_eval(blob[body : body + hlen].decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: unparseable header ({exc})") from exc
    if not isinstance(header, dict) or not {"descr", "fortran_order", "shape"} <= set(header):
        raise FormatError(f"{path}: header missing descr/fortran_order/shape")
    if header["descr"] != _DESCR:
        raise FormatError(
            f"{path}: dtype must be little-endian float32 ({_DESCR!r}), "
            f"got {header['descr']!r}"
        )
    if header["fortran_order"] is not False:
        raise FormatError(f"{path}: payload must be C-order")
    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(
        isinstance(d, int) and d >= 0 for d in shape
    ):
        raise FormatError(f"{path}: bad shape {shape!r}")
    payload = blob[body + hlen :]
    expected = int(np.prod(shape, dtype=np.int64)) * 4
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, shape {shape} needs {expected}"
        )
    return np.frombuffer(payload, dtype=_DESCR).reshape(shape)


def save_vector(values, path) -> None:
    """Write a rank-1 float32 tensor; rejects non-finite entries."""
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 1:
        raise ShapeError(f"expected a rank-1 vector, got rank {arr.ndim}")
    write_tensor(arr, path)


def load_vector(path) -> np.ndarray:
    arr = read_tensor(path)
    if arr.ndim != 1:
        raise ShapeError(f"{path}: expected a rank-1 vector, got rank {arr.ndim}")
    return arr


def load_attention(
    path,
    *,
    cls_token: str = "none",
    check_row_stochastic: bool = False,
) -> AttentionMaps:
    """Load attention maps from ``path``.

    ``cls_token="first"`` strips row 0 and column 0 of every head before
    validation, for encoders that export a leading class token. With
    ``check_row_stochastic`` set, rows deviating from unit sum by more
    than ``ROW_SUM_ATOL`` trigger a :class:`RowSumWarning` (never an
    error; the downstream math does not require normalization).
    """
    arr = read_tensor(path)
    if arr.ndim != 3:
        raise ShapeError(f"{path}: expected rank-3 attention tensor, got rank {arr.ndim}")
    if arr.shape[1] != arr.shape[2]:
        raise ShapeError(
            f"{path}: attention maps must be square, got trailing dims "
            f"({arr.shape[1]}, {arr.shape[2]})"
        )
    if cls_token not in ("none", "first"):
        raise ValueError(f"cls_token must be 'none' or 'first', got {cls_token!r}")
    if cls_token == "first":
        if arr.shape[1] < 2:
            raise ShapeError(f"{path}: cannot strip a class token from a 1-token map")
        arr = arr[:, 1:, 1:]
    maps = AttentionMaps.from_array(arr)
    if check_row_stochastic:
        dev = maps.row_sum_deviation()
        if dev > ROW_SUM_ATOL:
            warnings.warn(
                f"{path}: attention rows deviate from unit sum by up to {dev:.3g}",
                RowSumWarning,
                stacklevel=2,
            )
    return maps
