"""Host-array boundary.

Normalizes anything that speaks the buffer protocol into a borrowed
(n, d) float64 matrix:

- 2-D float64 buffers carry their own shape; 1-D buffers need an
  explicit ``shape=(n, d)`` whose product matches the buffer length.
- C-contiguous row-major buffers are wrapped without copying. Anything
  else (Fortran order, strided slices) is copied once, and the copy is
  recorded on the view so callers can see it in result metadata.
- Only 64-bit float buffers (format ``d``) are accepted; the boundary
  never reinterprets or converts element types.
- Values must be finite; rejection names the offending row and column.

Errors are the core library's structured exception types, so host code
can branch on ``err.code`` the same way it would for any core call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fusedist import InvalidInputError, PointCloud


@dataclass(frozen=True)
class BoundView:
    """Borrowed (n, d) float64 matrix plus whether normalizing copied it."""

    cloud: PointCloud
    copied: bool
    data: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "data", self.cloud.data)

    @property
    def n(self) -> int:
        return self.cloud.n

    @property
    def d(self) -> int:
        return self.cloud.d


def _shape_pair(shape) -> tuple[int, int]:
    try:
        n, d = shape
        n, d = int(n), int(d)
    except (TypeError, ValueError):
        raise InvalidInputError(
            f"shape must be a pair of integers (n, d), got {shape!r}"
        ) from None
    if n < 1 or d < 1:
        raise InvalidInputError(f"shape must be positive, got ({n}, {d})")
    return n, d


def as_view(obj, shape=None) -> BoundView:
    """Bind a host buffer as a validated point-cloud view.

    ``shape`` is required for 1-D buffers and optional for 2-D buffers,
    where it must agree with the buffer's own shape if given.
    """
    try:
        mv = memoryview(obj)
    except TypeError:
        raise InvalidInputError(
            f"{type(obj).__name__} does not support the buffer protocol"
        ) from None
    if mv.format != "d":
        raise InvalidInputError(
            f"expected a float64 buffer (format 'd'), got format "
            f"{mv.format!r}"
        )
    if mv.ndim == 1:
        if shape is None:
            raise InvalidInputError(
                "1-D buffer needs an explicit shape=(n, d)"
            )
        n, d = _shape_pair(shape)
        if n * d != mv.shape[0]:
            raise InvalidInputError(
                f"shape ({n}, {d}) needs {n * d} values, buffer holds "
                f"{mv.shape[0]}"
            )
        arr = np.asarray(mv).reshape(n, d)
    elif mv.ndim == 2:
        if shape is not None and _shape_pair(shape) != mv.shape:
            raise InvalidInputError(
                f"shape {tuple(shape)!r} does not match the buffer's own "
                f"shape {mv.shape!r}"
            )
        arr = np.asarray(mv)
    else:
        raise InvalidInputError(
            f"expected a 1-D or 2-D buffer, got {mv.ndim} dimensions"
        )
    copied = not arr.flags.c_contiguous
    if copied:
        arr = np.ascontiguousarray(arr)
    else:
        arr = arr.view()
    # The view is borrowed either way; never let core or callers write
    # through it.
    arr.flags.writeable = False
    return BoundView(PointCloud(arr), copied)
