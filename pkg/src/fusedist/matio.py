"""Matrix file formats.

Two on-disk layouts for point clouds:

``csv``
    Comma-separated rows, one point per line, no header. Values are
    written with 17 significant digits so float64 round-trips exactly.
``raw_f64``
    16-byte header (magic ``FDM1``, u32 little-endian n, u32
    little-endian d, 4 reserved zero bytes) followed by n*d float64
    little-endian values in row-major order.

Parse errors name the offending location (1-indexed row and column for
CSV, row and column of the decoded matrix for binary payloads).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .cloud import PointCloud
from .errors import InvalidInputError, ParseError

RAW_MAGIC = b"FDM1"
FORMATS = ("csv", "raw_f64")

_HEADER = struct.Struct("<4sII4s")


def format_value(x: float) -> str:
    """Shortest decimal with 17 significant digits (exact round-trip)."""
    return f"{x:.17g}"


def _parse_csv(path: Path) -> np.ndarray:
    lines = path.read_text(encoding="utf-8").split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{path}: file is empty")
    rows: list[list[float]] = []
    width: int | None = None
    for i, line in enumerate(lines, start=1):
        if line.strip() == "":
            raise ParseError(f"{path}: row {i}: empty row")
        tokens = line.split(",")
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(
                f"{path}: row {i}: expected {width} columns, "
                f"found {len(tokens)}"
            )
        row = []
        for j, tok in enumerate(tokens, start=1):
            try:
                row.append(float(tok))
            except ValueError:
                raise ParseError(
                    f"{path}: row {i}, column {j}: "
                    f"cannot parse {tok.strip()!r} as a number"
                ) from None
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def _parse_raw(path: Path) -> np.ndarray:
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise ParseError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, n, d, reserved = _HEADER.unpack_from(blob, 0)
    if magic != RAW_MAGIC:
        raise ParseError(f"{path}: bad magic {magic!r}, expected {RAW_MAGIC!r}")
    if reserved != b"\x00" * 4:
        raise ParseError(f"{path}: reserved header bytes must be zero")
    if n == 0 or d == 0:
        raise ParseError(f"{path}: header declares an empty matrix ({n}x{d})")
    expected = _HEADER.size + n * d * 8
    if len(blob) != expected:
        raise ParseError(
            f"{path}: payload length mismatch: header implies "
            f"{expected} bytes, file has {len(blob)}"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    return flat.astype(np.float64).reshape(n, d)


def _check_finite(arr: np.ndarray, path: Path) -> None:
    if not np.isfinite(arr).all():
        r, c = np.argwhere(~np.isfinite(arr))[0]
        raise ParseError(
            f"{path}: row {int(r) + 1}, column {int(c) + 1}: "
            f"non-finite value {arr[r, c]!r}"
        )


def load_matrix(path, fmt: str | None = None) -> PointCloud:
    """Read a cloud; ``fmt`` None sniffs raw_f64 by magic, else CSV."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"no such file: {path}")
    if fmt is None:
        with path.open("rb") as fh:
            fmt = "raw_f64" if fh.read(4) == RAW_MAGIC else "csv"
    if fmt not in FORMATS:
        raise InvalidInputError(
            f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}"
        )
    arr = _parse_raw(path) if fmt == "raw_f64" else _parse_csv(path)
    _check_finite(arr, path)
    return PointCloud(arr)


def save_matrix(path, data, fmt: str = "csv") -> None:
    """Write a cloud (or bare array) in the chosen format."""
    path = Path(path)
    arr = data.data if isinstance(data, PointCloud) else \
        np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError("matrix to save must be 2-D")
    if fmt == "csv":
        lines = [",".join(format_value(v) for v in row) for row in arr]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "raw_f64":
        n, d = arr.shape
        header = _HEADER.pack(RAW_MAGIC, n, d, b"\x00" * 4)
        path.write_bytes(header + np.ascontiguousarray(arr, dtype="<f8").tobytes())
    else:
        raise InvalidInputError(
            f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}"
        )
