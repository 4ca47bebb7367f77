"""Distributional distances between point clouds.

Besides the cross-fusion distance (see :mod:`fusedist.cloud`), five
standard metrics are provided, all reading a cloud as a uniform discrete
distribution over its rows:

``wasserstein2_exact``
    2-Wasserstein distance with squared-Euclidean ground cost, solved
    exactly. Equal sizes reduce to a linear assignment problem; unequal
    sizes are solved as the transportation LP. The reported value is the
    square root of the optimal cost.
``sinkhorn``
    Entropy-regularized transport cost, log-domain iterations. To keep
    the value symmetric in its arguments to machine precision, both
    potentials are refreshed simultaneously from the previous iterate
    (not alternately in place), with 0.5 averaging to damp the
    two-cycle that plain simultaneous updates can fall into. No
    debiasing; the value is sqrt(<plan, cost>), flagged unconverged
    when the marginal tolerance is not reached within the budget.
``mmd_rbf``
    Biased (V-statistic) maximum mean discrepancy estimate under the
    Gaussian kernel k(x, y) = exp(-||x - y||^2 / (2 h^2)). The default
    bandwidth h is the exact median of all pooled pairwise distances
    (both clouds concatenated, off-diagonal pairs).
``hausdorff``
    Symmetric Hausdorff distance, brute force over all pairs.
``chamfer``
    Average nearest-neighbor distance, symmetrized:
    0.5 * (mean_a min_b ||a - b|| + mean_b min_a ||a - b||).

Each public function returns a :class:`MetricResult` carrying the value,
wall time, and the configuration snapshot it ran under.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse
from scipy.optimize import linear_sum_assignment, linprog

from . import pairwise
from .cloud import as_cloud, cfd as _cfd_breakdown, _check_pair
from .errors import InvalidInputError, NumericalError, SolverFailureError

METRIC_IDS = (
    "cfd",
    "wasserstein2_exact",
    "sinkhorn",
    "mmd_rbf",
    "hausdorff",
    "chamfer",
)

_BANDWIDTH_POLICIES = ("median_heuristic", "fixed")

_SINKHORN_CHECK_EVERY = 10


@dataclass(frozen=True)
class MetricConfig:
    """Identifier plus the knobs of the configurable metrics.

    Fields irrelevant to ``metric_id`` are carried but ignored, so one
    config type serves every metric uniformly in sweeps and manifests.
    """

    metric_id: str
    sinkhorn_epsilon: float = 0.1
    sinkhorn_max_iter: int = 1000
    sinkhorn_tol: float = 1e-9
    mmd_bandwidth_policy: str = "median_heuristic"
    mmd_fixed_bandwidth: float = 1.0

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise InvalidInputError(
                f"unknown metric id {self.metric_id!r}; "
                f"expected one of {', '.join(METRIC_IDS)}"
            )
        if not (self.sinkhorn_epsilon > 0.0):
            raise InvalidInputError("sinkhorn_epsilon must be positive")
        if self.sinkhorn_max_iter < 1:
            raise InvalidInputError("sinkhorn_max_iter must be at least 1")
        if not (self.sinkhorn_tol > 0.0):
            raise InvalidInputError("sinkhorn_tol must be positive")
        if self.mmd_bandwidth_policy not in _BANDWIDTH_POLICIES:
            raise InvalidInputError(
                f"unknown bandwidth policy {self.mmd_bandwidth_policy!r}"
            )
        if not (self.mmd_fixed_bandwidth > 0.0):
            raise InvalidInputError("mmd_fixed_bandwidth must be positive")


@dataclass(frozen=True)
class MetricResult:
    """One metric evaluation: value, timing, and provenance.

    ``degenerate`` marks inputs the metric cannot separate meaningfully
    (e.g. identical pooled points under mmd_rbf). ``converged`` is only
    ever False for iterative solvers that hit their budget.
    """

    metric_id: str
    value: float
    wall_time: float
    config_snapshot: MetricConfig
    degenerate: bool = False
    converged: bool = True

    def __post_init__(self):
        if np.isnan(self.value) or self.value < 0.0:
            raise NumericalError(
                f"{self.metric_id} produced an invalid value {self.value!r}"
            )
        if not np.isfinite(self.value) and not self.degenerate:
            raise NumericalError(
                f"{self.metric_id} produced a non-finite value"
            )
        if self.wall_time < 0.0:
            raise InvalidInputError("wall_time must be nonnegative")


def _pair_arrays(a, b) -> tuple[np.ndarray, np.ndarray]:
    ca, cb = as_cloud(a), as_cloud(b)
    _check_pair(ca, cb)
    return ca.data, cb.data


def _check_costs(cost_matrix: np.ndarray, metric_id: str) -> None:
    # Finite inputs can still overflow when squared; fail before the
    # solver chokes on inf entries.
    if not np.isfinite(cost_matrix).all():
        raise NumericalError(
            f"{metric_id}: squared distances overflow; rescale the inputs"
        )


def cfd_metric(a, b, cfg: MetricConfig | None = None) -> MetricResult:
    """Cross-fusion distance packaged as a MetricResult."""
    cfg = cfg if cfg is not None else MetricConfig("cfd")
    t0 = time.perf_counter()
    br = _cfd_breakdown(a, b)
    return MetricResult("cfd", br.cfd, time.perf_counter() - t0,
                        replace(cfg, metric_id="cfd"),
                        degenerate=br.degenerate)


def wasserstein2_exact(a, b) -> MetricResult:
    """Exact 2-Wasserstein distance between uniform empirical measures."""
    xa, xb = _pair_arrays(a, b)
    t0 = time.perf_counter()
    cost_matrix = pairwise.sq_dists(xa, xb)
    _check_costs(cost_matrix, "wasserstein2_exact")
    n_a, n_b = len(xa), len(xb)
    if n_a == n_b:
        rows, cols = linear_sum_assignment(cost_matrix)
        cost = float(cost_matrix[rows, cols].sum()) / n_a
    else:
        cost = _transport_lp(cost_matrix, n_a, n_b)
    value = float(np.sqrt(max(cost, 0.0)))
    return MetricResult("wasserstein2_exact", value,
                        time.perf_counter() - t0,
                        MetricConfig("wasserstein2_exact"))


def _transport_lp(cost_matrix: np.ndarray, n_a: int, n_b: int) -> float:
    # Transportation polytope with uniform marginals 1/n_a and 1/n_b.
    row_sum = scipy.sparse.kron(
        scipy.sparse.identity(n_a, format="csr"),
        np.ones((1, n_b)),
        format="csr",
    )
    col_sum = scipy.sparse.kron(
        np.ones((1, n_a)),
        scipy.sparse.identity(n_b, format="csr"),
        format="csr",
    )
    a_eq = scipy.sparse.vstack([row_sum, col_sum], format="csr")
    b_eq = np.concatenate([
        np.full(n_a, 1.0 / n_a),
        np.full(n_b, 1.0 / n_b),
    ])
    res = linprog(cost_matrix.ravel(), A_eq=a_eq, b_eq=b_eq,
                  bounds=(0.0, None), method="highs")
    if not res.success:
        raise SolverFailureError(
            f"transport LP failed: {res.message}",
            iterations=int(getattr(res, "nit", 0) or 0),
        )
    return float(res.fun)


# Shifted exponents are clamped here before exp: anything smaller
# underflows toward the subnormal range, which contributes nothing to
# the sums (< 1e-304 against a leading term of 1) but can be orders of
# magnitude slower on hardware that traps on denormals.
_EXP_FLOOR = -700.0


def _lse_rows(m: np.ndarray) -> np.ndarray:
    # logsumexp along axis 1 with max subtraction.
    mx = m.max(axis=1)
    m = m - mx[:, None]
    np.maximum(m, _EXP_FLOOR, out=m)
    np.exp(m, out=m)
    out = np.log(m.sum(axis=1))
    out += mx
    return out


def _lse_cols(m: np.ndarray) -> np.ndarray:
    mx = m.max(axis=0)
    m = m - mx[None, :]
    np.maximum(m, _EXP_FLOOR, out=m)
    np.exp(m, out=m)
    out = np.log(m.sum(axis=0))
    out += mx
    return out


def sinkhorn(a, b, cfg: MetricConfig) -> MetricResult:
    """Entropy-regularized transport distance, log-domain."""
    xa, xb = _pair_arrays(a, b)
    if cfg.metric_id != "sinkhorn":
        cfg = replace(cfg, metric_id="sinkhorn")
    t0 = time.perf_counter()
    eps = cfg.sinkhorn_epsilon
    cost_matrix = pairwise.sq_dists(xa, xb)
    _check_costs(cost_matrix, "sinkhorn")
    n_a, n_b = len(xa), len(xb)
    log_mu = -np.log(n_a)
    log_nu = -np.log(n_b)
    # Work with potentials pre-divided by eps; kernel = -C/eps.
    kernel = cost_matrix / -eps
    f = np.zeros(n_a)
    g = np.zeros(n_b)
    converged = False
    iterations = 0

    def _plan():
        t = kernel + f[:, None]
        t += g[None, :]
        np.maximum(t, _EXP_FLOOR, out=t)
        np.exp(t, out=t)
        return t

    for it in range(1, cfg.sinkhorn_max_iter + 1):
        f_upd = log_mu - _lse_rows(kernel + g[None, :])
        g_upd = log_nu - _lse_cols(kernel + f[:, None])
        f = 0.5 * (f + f_upd)
        g = 0.5 * (g + g_upd)
        iterations = it
        if it % _SINKHORN_CHECK_EVERY == 0 or it == cfg.sinkhorn_max_iter:
            if not (np.isfinite(f).all() and np.isfinite(g).all()):
                raise NumericalError(
                    "sinkhorn potentials went non-finite; "
                    "try a larger epsilon"
                )
            plan = _plan()
            row_err = np.abs(plan.sum(axis=1) - 1.0 / n_a).max()
            col_err = np.abs(plan.sum(axis=0) - 1.0 / n_b).max()
            if max(row_err, col_err) < cfg.sinkhorn_tol:
                converged = True
                break
    cost = float((_plan() * cost_matrix).sum())
    if not np.isfinite(cost):
        raise NumericalError(
            f"sinkhorn cost non-finite after {iterations} iterations"
        )
    value = float(np.sqrt(max(cost, 0.0)))
    return MetricResult("sinkhorn", value, time.perf_counter() - t0,
                        cfg, converged=converged)


def mmd_rbf(a, b, cfg: MetricConfig) -> MetricResult:
    """Gaussian-kernel MMD, biased estimate, pooled-median bandwidth."""
    xa, xb = _pair_arrays(a, b)
    if cfg.metric_id != "mmd_rbf":
        cfg = replace(cfg, metric_id="mmd_rbf")
    t0 = time.perf_counter()
    if cfg.mmd_bandwidth_policy == "median_heuristic":
        pooled = np.concatenate([xa, xb], axis=0)
        h = pairwise.median_pairwise_distance(pooled)
        if h == 0.0:
            # Every pooled point identical: the kernel cannot resolve
            # anything, and the discrepancy of identical data is zero.
            return MetricResult("mmd_rbf", 0.0, time.perf_counter() - t0,
                                cfg, degenerate=True)
    else:
        h = cfg.mmd_fixed_bandwidth
    denom = 2.0 * h * h
    if denom == 0.0 or not np.isfinite(denom):
        raise NumericalError(
            f"mmd_rbf bandwidth {h!r} under- or overflows when squared"
        )
    gamma = 1.0 / denom
    n_a, n_b = len(xa), len(xb)
    k_aa = pairwise.kernel_sum(xa, xa, gamma) / (n_a * n_a)
    k_bb = pairwise.kernel_sum(xb, xb, gamma) / (n_b * n_b)
    k_ab = pairwise.kernel_sum(xa, xb, gamma) / (n_a * n_b)
    mmd2 = k_aa + k_bb - 2.0 * k_ab
    value = float(np.sqrt(max(mmd2, 0.0)))
    return MetricResult("mmd_rbf", value, time.perf_counter() - t0, cfg)


def hausdorff(a, b) -> MetricResult:
    """Symmetric Hausdorff distance (max of the two directed values)."""
    xa, xb = _pair_arrays(a, b)
    t0 = time.perf_counter()
    min_a, min_b = pairwise.min_sq_both(xa, xb)
    value = float(np.sqrt(max(min_a.max(), min_b.max())))
    return MetricResult("hausdorff", value, time.perf_counter() - t0,
                        MetricConfig("hausdorff"))


def chamfer(a, b) -> MetricResult:
    """Symmetrized mean nearest-neighbor distance (not squared)."""
    xa, xb = _pair_arrays(a, b)
    t0 = time.perf_counter()
    min_a, min_b = pairwise.min_sq_both(xa, xb)
    value = 0.5 * (float(np.sqrt(min_a).mean()) + float(np.sqrt(min_b).mean()))
    return MetricResult("chamfer", value, time.perf_counter() - t0,
                        MetricConfig("chamfer"))


def compute_metric(a, b, cfg: MetricConfig) -> MetricResult:
    """Dispatch one metric evaluation by ``cfg.metric_id``."""
    if cfg.metric_id == "cfd":
        return cfd_metric(a, b, cfg)
    if cfg.metric_id == "wasserstein2_exact":
        return wasserstein2_exact(a, b)
    if cfg.metric_id == "sinkhorn":
        return sinkhorn(a, b, cfg)
    if cfg.metric_id == "mmd_rbf":
        return mmd_rbf(a, b, cfg)
    if cfg.metric_id == "hausdorff":
        return hausdorff(a, b)
    if cfg.metric_id == "chamfer":
        return chamfer(a, b)
    raise InvalidInputError(f"unknown metric id {cfg.metric_id!r}")
