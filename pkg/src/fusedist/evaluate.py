"""Evaluation protocols: resampling ratio, directional drop ratio, and
runtime benchmarking.

Relative Deviation under Resampling (RDR) asks how much of a metric's
reading between two related clouds is noise: the cloud of interest is
split into random halves, the metric is evaluated between the halves
(pure sampling noise), and that numerator is divided by the metric's
value on a fixed reference pair. Low RDR means readings are dominated
by signal rather than resampling jitter.

The cross-setting drop ratio (CDDR) compares a quality measurement
between two settings, ``(m_within - m_cross) / m_within``, and
:func:`distance_cddr_correlation` checks how well a distance tracks
those drops across settings (plain Pearson correlation).

:func:`runtime_bench` times metrics over a size ladder and fits log-log
slopes, which is how the package checks its own O(n d) claim for the
cross-fusion distance against the quadratic baselines.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud, as_cloud
from .errors import (FusedistError, InvalidInputError, ProtocolError,
                     UndefinedCorrelationError)
from .metrics import MetricConfig, MetricResult, compute_metric
from .rng import derive_seed, make_rng
from .synth import base_mixture, sample_gmm

# Denominators below this are reported but flagged: the ratio is
# formally defined yet numerically meaningless.
NEAR_ZERO_DENOMINATOR = 1e-9


@dataclass(frozen=True)
class EvalRecord:
    """One RDR split: numerator, denominator, and their ratio."""

    split_id: str
    numerator: float
    denominator: float
    rdr: float

    def __post_init__(self):
        if self.numerator < 0.0 or not np.isfinite(self.numerator):
            raise InvalidInputError("numerator must be finite and >= 0")
        if not (self.denominator > 0.0) or not np.isfinite(self.denominator):
            raise InvalidInputError("denominator must be finite and positive")
        expected = self.numerator / self.denominator
        if not (self.rdr == expected):
            raise InvalidInputError("rdr must equal numerator/denominator")


@dataclass(frozen=True)
class RdrReport:
    metric_id: str
    records: tuple[EvalRecord, ...]
    failures: tuple[tuple[str, str], ...]
    denominator: float
    near_zero_denominator: bool
    mean: float
    std: float


def rdr_protocol(cloud, reference_pair, metric_cfg: MetricConfig,
                 splits: int, seed: int) -> RdrReport:
    """Half-split resampling ratio of one metric on one cloud.

    Split s permutes the rows with the Philox stream seeded
    ``seed + s`` and cuts them into floor(n/2) / ceil(n/2) halves. The
    denominator is the metric on ``reference_pair``, evaluated once.
    """
    cloud = as_cloud(cloud)
    if cloud.n < 4:
        raise InvalidInputError("rdr needs at least 4 points to split")
    if splits < 1:
        raise InvalidInputError("splits must be at least 1")
    ref_a, ref_b = reference_pair
    den_res = compute_metric(ref_a, ref_b, metric_cfg)
    if den_res.degenerate or den_res.value <= 0.0:
        raise ProtocolError(
            f"reference pair gives no usable denominator for "
            f"{metric_cfg.metric_id} (value {den_res.value!r})"
        )
    den = den_res.value
    near_zero = den < NEAR_ZERO_DENOMINATOR
    half = cloud.n // 2
    records: list[EvalRecord] = []
    failures: list[tuple[str, str]] = []
    for s in range(splits):
        split_id = f"split-{s:03d}"
        perm = make_rng(seed + s).permutation(cloud.n)
        first = PointCloud(cloud.data[perm[:half]])
        second = PointCloud(cloud.data[perm[half:]])
        try:
            num = compute_metric(first, second, metric_cfg).value
            records.append(EvalRecord(split_id, num, den, num / den))
        except FusedistError as err:
            failures.append((split_id, err.code))
    ratios = np.array([r.rdr for r in records])
    mean = float(ratios.mean()) if ratios.size else float("nan")
    std = float(ratios.std()) if ratios.size else float("nan")
    return RdrReport(metric_cfg.metric_id, tuple(records), tuple(failures),
                     den, near_zero, mean, std)


@dataclass(frozen=True)
class CddrRecord:
    """Relative drop of a quality measurement across two settings."""

    setting: str
    m_within: float
    m_cross: float
    cddr: float

    def __post_init__(self):
        if not np.isfinite(self.m_within) or not np.isfinite(self.m_cross):
            raise InvalidInputError("measurements must be finite")
        if self.m_within == 0.0:
            raise InvalidInputError("m_within must be nonzero")
        if self.cddr != (self.m_within - self.m_cross) / self.m_within:
            raise InvalidInputError("cddr must equal its defining ratio")


def cddr(setting: str, m_within: float, m_cross: float) -> CddrRecord:
    if m_within == 0.0:
        raise ProtocolError(f"setting {setting!r}: m_within is zero")
    return CddrRecord(setting, float(m_within), float(m_cross),
                      (m_within - m_cross) / m_within)


def distance_cddr_correlation(distances, drops) -> float:
    """Pearson correlation between per-setting distances and drops."""
    x = np.asarray(distances, dtype=np.float64)
    y = np.asarray(drops, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInputError("inputs must be 1-D sequences of equal length")
    if x.size < 2:
        raise UndefinedCorrelationError(
            "correlation needs at least two settings"
        )
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise InvalidInputError("correlation inputs must be finite")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError(
            "correlation undefined for constant inputs"
        )
    return float(dx @ dy) / (sx * sy)


@dataclass(frozen=True)
class BenchRecord:
    """Median-of-repeats wall time for one (metric, n) cell."""

    metric_id: str
    n: int
    d: int
    wall_time: float
    repeats: int

    def __post_init__(self):
        if self.repeats < 3:
            raise InvalidInputError("bench repeats must be at least 3")
        if not (self.wall_time > 0.0):
            raise InvalidInputError("wall_time must be positive")


@dataclass(frozen=True)
class BenchReport:
    records: tuple[BenchRecord, ...]
    slopes: dict[str, float]
    suspect_timings: tuple[BenchRecord, ...]


# Timings below 10 microseconds are too close to timer resolution to
# trust for slope fitting; they are reported but flagged.
_MIN_TRUSTED_TIME = 10e-6


def runtime_bench(metric_cfgs, sizes, d: int, repeats: int,
                  seed: int) -> BenchReport:
    """Wall times over a size ladder plus per-metric log-log slopes.

    Clouds are regenerated per size from seeds derived from
    ``(seed, n, label)``; each (metric, n) cell reports the median of
    ``repeats`` runs of the same evaluation.
    """
    metric_cfgs = tuple(metric_cfgs)
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2:
        raise InvalidInputError("need at least two sizes for slopes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidInputError("sizes must be strictly increasing")
    if repeats < 3:
        raise InvalidInputError("repeats must be at least 3")
    spec = base_mixture(d)
    records: list[BenchRecord] = []
    suspect: list[BenchRecord] = []
    for n in sizes:
        a = sample_gmm(spec, n, derive_seed(seed, n, "bench-a"))
        b = sample_gmm(spec, n, derive_seed(seed, n, "bench-b"))
        for cfg in metric_cfgs:
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                compute_metric(a, b, cfg)
                times.append(time.perf_counter() - t0)
            rec = BenchRecord(cfg.metric_id, n, d,
                              float(np.median(times)), repeats)
            records.append(rec)
            if rec.wall_time < _MIN_TRUSTED_TIME:
                suspect.append(rec)
    slopes: dict[str, float] = {}
    for cfg in metric_cfgs:
        pts = [(r.n, r.wall_time) for r in records
               if r.metric_id == cfg.metric_id]
        logs_n = np.log([p[0] for p in pts])
        logs_t = np.log([p[1] for p in pts])
        slopes[cfg.metric_id] = float(np.polyfit(logs_n, logs_t, 1)[0])
    return BenchReport(tuple(records), slopes, tuple(suspect))
