"""Blocked pairwise-distance kernels shared by the distance metrics.

Everything here is the plain O(n^2 d) scan, evaluated in fixed-size row
blocks so peak memory stays bounded at large n; there is no spatial
indexing. Squared distances use the expansion

    ||x - y||^2 = ||x||^2 + ||y||^2 - 2 x.y

clamped at zero, which keeps the inner loop inside BLAS. Block order is
fixed, so every function here is deterministic for a given input.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, NumericalError

# One block of the distance matrix holds at most this many float64 cells
# (128 MB). Row-block height adapts to the column count.
_BLOCK_ELEMENTS = 1 << 24

# Condensed off-diagonal squared distances are materialized whole up to
# this many pairs (~256 MB); beyond that the order statistics needed for
# the median are located by histogram refinement passes instead.
_DIRECT_MEDIAN_PAIRS = 1 << 25

_HIST_BINS = 8192
_COLLECT_LIMIT = 1 << 22  # candidates gathered in the final pass
_MAX_REFINE_PASSES = 12


def _block_rows(n_cols: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(1, n_cols))


def _row_sq_norms(x: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", x, x)


def sq_dists(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Full squared-distance matrix. Only for sizes that fit comfortably."""
    d2 = _row_sq_norms(x)[:, None] + _row_sq_norms(y)[None, :]
    d2 -= 2.0 * (x @ y.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def min_sq_both(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row nearest-neighbor squared distances in both directions.

    Returns ``(min over y for each x row, min over x for each y row)``
    from a single blocked sweep of the cross matrix.
    """
    yy = _row_sq_norms(y)
    xx = _row_sq_norms(x)
    min_x = np.empty(len(x))
    min_y = np.full(len(y), np.inf)
    step = _block_rows(len(y))
    for i0 in range(0, len(x), step):
        i1 = min(i0 + step, len(x))
        d2 = xx[i0:i1, None] + yy[None, :]
        d2 -= 2.0 * (x[i0:i1] @ y.T)
        np.maximum(d2, 0.0, out=d2)
        min_x[i0:i1] = d2.min(axis=1)
        np.minimum(min_y, d2.min(axis=0), out=min_y)
    return min_x, min_y


# Exponents below this underflow to values that add nothing to a kernel
# sum but can hit slow denormal handling; clamp before exp.
_EXP_FLOOR = -700.0


def kernel_sum(x: np.ndarray, y: np.ndarray, gamma: float) -> float:
    """Sum of exp(-gamma * ||x_i - y_j||^2) over all (i, j) pairs."""
    yy = _row_sq_norms(y)
    xx = _row_sq_norms(x)
    step = _block_rows(len(y))
    total = 0.0
    for i0 in range(0, len(x), step):
        i1 = min(i0 + step, len(x))
        d2 = xx[i0:i1, None] + yy[None, :]
        d2 -= 2.0 * (x[i0:i1] @ y.T)
        np.maximum(d2, 0.0, out=d2)
        d2 *= -gamma
        np.maximum(d2, _EXP_FLOOR, out=d2)
        np.exp(d2, out=d2)
        total += float(d2.sum())
    return total


def _upper_block(z: np.ndarray, zz: np.ndarray, i0: int, i1: int):
    """Squared distances from rows [i0, i1) to all later rows, as the
    flattened strict upper-triangle slice of that block."""
    d2 = zz[i0:i1, None] + zz[None, :]
    d2 -= 2.0 * (z[i0:i1] @ z.T)
    np.maximum(d2, 0.0, out=d2)
    rows = np.arange(i0, i1)[:, None]
    cols = np.arange(z.shape[0])[None, :]
    return d2[cols > rows]


def _condensed_sq(z: np.ndarray) -> np.ndarray:
    p = len(z)
    zz = _row_sq_norms(z)
    out = np.empty(p * (p - 1) // 2)
    step = _block_rows(p)
    pos = 0
    for i0 in range(0, p, step):
        i1 = min(i0 + step, p)
        vals = _upper_block(z, zz, i0, i1)
        out[pos:pos + vals.size] = vals
        pos += vals.size
    return out


def _offdiag_sq_order_stats(z: np.ndarray, ranks: tuple[int, int]) -> tuple[float, float]:
    """Exact order statistics (0-indexed ranks) of the off-diagonal squared
    distances, found by histogram refinement without materializing them."""
    p = len(z)
    zz = _row_sq_norms(z)
    step = _block_rows(p)
    max_norm = float(np.sqrt(zz.max()))
    lo, hi = 0.0, (2.0 * max_norm) ** 2 + 1.0
    below_lo = 0

    def _blocks():
        for i0 in range(0, p, step):
            yield _upper_block(z, zz, i0, min(i0 + step, p))

    for _ in range(_MAX_REFINE_PASSES):
        edges = np.linspace(lo, hi, _HIST_BINS + 1)
        counts = np.zeros(_HIST_BINS, dtype=np.int64)
        for vals in _blocks():
            window = vals[(vals >= lo) & (vals <= hi)]
            counts += np.histogram(window, bins=edges)[0]
        cum = np.cumsum(counts)
        local = [r - below_lo for r in ranks]
        bins = [int(np.searchsorted(cum, rl, side="right")) for rl in local]
        b_lo, b_hi = min(bins), max(bins)
        span = int(cum[b_hi] - (cum[b_lo - 1] if b_lo > 0 else 0))
        new_lo = float(edges[b_lo])
        new_hi = float(edges[b_hi + 1])
        shrunk = (new_lo, new_hi) != (lo, hi)
        if span <= _COLLECT_LIMIT or not shrunk:
            target_lo, target_hi = new_lo, new_hi
            include_hi = (b_hi == _HIST_BINS - 1)  # np.histogram closes the last bin
            gathered = []
            n_below = 0
            for vals in _blocks():
                n_below += int((vals < target_lo).sum())
                if include_hi and target_hi == hi:
                    mask = (vals >= target_lo) & (vals <= target_hi)
                else:
                    mask = (vals >= target_lo) & (vals < target_hi)
                gathered.append(vals[mask])
            cand = np.sort(np.concatenate(gathered))
            if cand.size == 0:
                raise NumericalError("median refinement lost its candidates")
            idx = [min(max(r - n_below, 0), cand.size - 1) for r in ranks]
            return float(cand[idx[0]]), float(cand[idx[1]])
        below_lo += int(cum[b_lo - 1]) if b_lo > 0 else 0
        lo, hi = new_lo, new_hi
    raise NumericalError("median refinement did not converge")


def median_pairwise_distance(z: np.ndarray) -> float:
    """Exact median of the p(p-1)/2 off-diagonal pairwise Euclidean
    distances of the rows of ``z``.

    Selection runs on squared distances (sqrt is monotone); for an even
    pair count the two middle distances are averaged after the sqrt.
    """
    p = len(z)
    if p < 2:
        raise InvalidInputError("median needs at least two points")
    m = p * (p - 1) // 2
    k1, k2 = (m - 1) // 2, m // 2
    if m <= _DIRECT_MEDIAN_PAIRS:
        d2 = _condensed_sq(z)
        d2.partition((k1, k2))
        s1, s2 = float(d2[k1]), float(d2[k2])
    else:
        s1, s2 = _offdiag_sq_order_stats(z, (k1, k2))
    return 0.5 * (np.sqrt(s1) + np.sqrt(s2))
