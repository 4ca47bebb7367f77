"""Synthetic point-cloud generators and controlled deformation sweeps.

Five studies probe how each distance metric responds to a single
controlled deformation between two sampled clouds A and B:

``displacement``
    A and B drawn from the same mixture, B rigidly shifted by delta
    along the first axis. Grid: the shift delta.
``dispersion``
    A and B drawn from the same mixture at a fixed centroid offset of
    10 along the first axis; the mixture's component scale sigma is
    swept. Grid: sigma.
``scaling``
    A fixed displacement pair, both clouds multiplied by alpha.
    Positive homogeneity makes every true metric scale linearly here
    while the cross-fusion distance stays put. Grid: alpha.
``topology``
    A is a fixed unimodal Gaussian; B is a symmetric mixture whose
    component count K is swept at constant total placement scale.
    Grid: K.
``outliers``
    A displacement pair at delta = 2 where a fraction eps percent of
    each cloud is replaced by wide noise (scale tau = 5) without
    re-centering. Grid: eps in percent.

Reproducibility contract: trial t of any experiment samples group A
with seed ``base_seed + t``; every other stream (group B, outlier
replacement) uses a seed derived from ``(base_seed, t, label)`` via
:func:`fusedist.rng.derive_seed`. Rerunning a configuration reproduces
every cell bit for bit, and the sampler consumes one "components" and
one "noise" substream per cloud so resampling with a different
component count or sigma reuses the same underlying normal draws
(common random numbers across sweep levels).
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .errors import FusedistError, InvalidInputError
from .metrics import METRIC_IDS, MetricConfig, compute_metric
from .rng import derive_seed, make_rng

EXPERIMENTS = ("displacement", "dispersion", "scaling", "topology", "outliers")

# Base mixture used by displacement, dispersion, scaling, and outliers:
# four components at +-BASE_MEAN_SCALE along the first two axes
# (zero-sum placement), spherical scale BASE_SIGMA.
BASE_MEAN_SCALE = 2.0
BASE_SIGMA = 2.5

DISPERSION_OFFSET = 10.0
SCALING_BASE_DELTA = 2.0
TOPOLOGY_SIGMA = 1.0
TOPOLOGY_MEAN_SCALE = 2.0
OUTLIER_TAU = 5.0
OUTLIER_DELTA = 2.0

DEFAULT_GRIDS: dict[str, tuple[float, ...]] = {
    "displacement": (0.25, 0.5, 1.0, 2.0, 3.0, 4.0),
    "dispersion": (0.1, 0.3, 0.6, 0.9, 1.2),
    "scaling": (1.0, 2.0, 4.0, 8.0),
    "topology": (1.0, 2.0, 4.0, 8.0),
    "outliers": (0.0, 1.0, 2.0, 5.0),
}

_GROUP_B = "group-b"
_OUTLIERS_A = "outliers-a"
_OUTLIERS_B = "outliers-b"


@dataclass(frozen=True)
class GmmSpec:
    """Isotropic Gaussian mixture: rows of ``means`` are component
    centers, all components share scale ``sigma`` and equal weight."""

    means: np.ndarray
    sigma: float

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        if means.ndim != 2 or means.shape[0] < 1 or means.shape[1] < 1:
            raise InvalidInputError("means must be a nonempty (k, d) matrix")
        if not np.isfinite(means).all():
            raise InvalidInputError("component means must be finite")
        if not (self.sigma > 0.0) or not np.isfinite(self.sigma):
            raise InvalidInputError("sigma must be positive and finite")
        object.__setattr__(self, "means", means)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]


def base_mixture(d: int, sigma: float = BASE_SIGMA) -> GmmSpec:
    """The four-component zero-sum base mixture in d >= 2 dimensions."""
    if d < 2:
        raise InvalidInputError("base mixture needs d >= 2")
    means = np.zeros((4, d))
    means[0, 0] = BASE_MEAN_SCALE
    means[1, 0] = -BASE_MEAN_SCALE
    means[2, 1] = BASE_MEAN_SCALE
    means[3, 1] = -BASE_MEAN_SCALE
    return GmmSpec(means, sigma)


def symmetric_mixture(k: int, d: int, sigma: float,
                      scale: float = TOPOLOGY_MEAN_SCALE) -> GmmSpec:
    """K components placed as antipodal pairs +-scale*e_j (one pair per
    axis), plus a component at the origin when K is odd. Zero-sum by
    construction."""
    if k < 1:
        raise InvalidInputError("component count must be at least 1")
    pairs = k // 2
    if pairs > d:
        raise InvalidInputError(
            f"{k} components need at least {pairs} axes, got d={d}"
        )
    means = np.zeros((k, d))
    for j in range(pairs):
        means[2 * j, j] = scale
        means[2 * j + 1, j] = -scale
    return GmmSpec(means, sigma)


def single_gaussian(d: int, sigma: float) -> GmmSpec:
    return GmmSpec(np.zeros((1, d)), sigma)


def sample_gmm(spec: GmmSpec, n: int, seed: int) -> PointCloud:
    """Draw n points: component labels and unit normals come from two
    separate labeled substreams of ``seed``, so the same seed yields the
    same normal draws regardless of spec.k or spec.sigma."""
    if n < 1:
        raise InvalidInputError(f"sample size must be positive, got {n}")
    comp = make_rng(seed, "components").integers(0, spec.k, size=n)
    noise = make_rng(seed, "noise").standard_normal((n, spec.d))
    return PointCloud(spec.means[comp] + spec.sigma * noise)


def _default_metrics() -> tuple[MetricConfig, ...]:
    return tuple(MetricConfig(mid) for mid in METRIC_IDS)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: which deformation, at what scale, over which metrics."""

    experiment: str
    d: int = 32
    n: int = 300
    trials: int = 50
    base_seed: int = 42
    parameter_grid: tuple[float, ...] | None = None
    metrics: tuple[MetricConfig, ...] | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidInputError(
                f"unknown experiment {self.experiment!r}; "
                f"expected one of {', '.join(EXPERIMENTS)}"
            )
        if self.d < 2:
            raise InvalidInputError("d must be at least 2")
        if self.n < 2:
            raise InvalidInputError("n must be at least 2")
        if self.trials < 1:
            raise InvalidInputError("trials must be at least 1")
        if self.base_seed < 0:
            raise InvalidInputError("base_seed must be nonnegative")
        grid = self.parameter_grid
        if grid is None:
            grid = DEFAULT_GRIDS[self.experiment]
        grid = tuple(float(v) for v in grid)
        if len(grid) == 0:
            raise InvalidInputError("parameter grid must be nonempty")
        if any(not np.isfinite(v) for v in grid):
            raise InvalidInputError("parameter grid must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidInputError("parameter grid must be strictly increasing")
        object.__setattr__(self, "parameter_grid", grid)
        metrics = self.metrics
        if metrics is None:
            metrics = _default_metrics()
        metrics = tuple(metrics)
        if len(metrics) == 0:
            raise InvalidInputError("at least one metric is required")
        object.__setattr__(self, "metrics", metrics)


@dataclass(frozen=True)
class SweepCell:
    """One successful metric evaluation inside a sweep."""

    metric_id: str
    level: float
    trial: int
    value: float


@dataclass(frozen=True)
class SweepFailure:
    """A cell that raised; the value is recorded as missing."""

    metric_id: str
    level: float
    trial: int
    code: str
    message: str


@dataclass(frozen=True)
class SweepAggregate:
    """Per (metric, level) summary. ``normalized_mean`` is the mean
    divided by the mean at the first grid level (None when undefined)."""

    metric_id: str
    level: float
    mean: float
    std: float
    count: int
    normalized_mean: float | None


@dataclass(frozen=True)
class SweepResult:
    experiment: str
    d: int
    n: int
    trials: int
    base_seed: int
    grid: tuple[float, ...]
    metric_ids: tuple[str, ...]
    cells: tuple[SweepCell, ...]
    failures: tuple[SweepFailure, ...] = ()

    def values(self, metric_id: str, level: float) -> np.ndarray:
        """Successful values for one (metric, level), in trial order."""
        return np.array([c.value for c in self.cells
                         if c.metric_id == metric_id and c.level == level])

    def mean_curve(self, metric_id: str) -> np.ndarray:
        return np.array([self.values(metric_id, lv).mean()
                         for lv in self.grid])

    def aggregates(self) -> tuple[SweepAggregate, ...]:
        rows = []
        for mid in self.metric_ids:
            first_mean: float | None = None
            for i, level in enumerate(self.grid):
                vals = self.values(mid, level)
                if vals.size == 0:
                    mean, std = float("nan"), float("nan")
                else:
                    mean, std = float(vals.mean()), float(vals.std())
                if i == 0:
                    first_mean = mean if vals.size else None
                norm: float | None
                if (first_mean is None or first_mean == 0.0
                        or vals.size == 0):
                    norm = None
                else:
                    norm = mean / first_mean
                rows.append(SweepAggregate(mid, level, mean, std,
                                           int(vals.size), norm))
        return tuple(rows)


def _shift(data: np.ndarray, delta: float) -> PointCloud:
    out = data.copy()
    out[:, 0] += delta
    return PointCloud(out)


def _contaminate(data: np.ndarray, m: int, seed: int,
                 tau: float = OUTLIER_TAU) -> PointCloud:
    """Replace m uniformly chosen rows with N(0, tau^2 I) draws. The
    cloud is deliberately not re-centered afterwards."""
    if m == 0:
        return PointCloud(data)
    rng = make_rng(seed)
    idx = rng.choice(len(data), size=m, replace=False)
    out = data.copy()
    out[idx] = tau * rng.standard_normal((m, data.shape[1]))
    return PointCloud(out)


def _run(cfg: ExperimentConfig, pairs_for_trial, threads: int = 1) -> SweepResult:
    """Shared sweep loop. ``pairs_for_trial(t)`` yields
    (level, cloud_a, cloud_b) for every grid level of trial t."""

    def one_trial(t: int):
        cells: list[SweepCell] = []
        fails: list[SweepFailure] = []
        for level, a, b in pairs_for_trial(t):
            for mcfg in cfg.metrics:
                try:
                    res = compute_metric(a, b, mcfg)
                    cells.append(SweepCell(mcfg.metric_id, level, t,
                                           res.value))
                except FusedistError as err:
                    fails.append(SweepFailure(mcfg.metric_id, level, t,
                                              err.code, str(err)))
        return cells, fails

    if threads <= 1:
        per_trial = [one_trial(t) for t in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(one_trial, range(cfg.trials)))
    cells = tuple(itertools.chain.from_iterable(c for c, _ in per_trial))
    failures = tuple(itertools.chain.from_iterable(f for _, f in per_trial))
    return SweepResult(cfg.experiment, cfg.d, cfg.n, cfg.trials,
                       cfg.base_seed, cfg.parameter_grid,
                       tuple(m.metric_id for m in cfg.metrics),
                       cells, failures)


def _expect(cfg: ExperimentConfig, name: str) -> None:
    if cfg.experiment != name:
        raise InvalidInputError(
            f"config is for {cfg.experiment!r}, expected {name!r}"
        )


def run_displacement(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """B is A's twin distribution rigidly shifted by delta along e1."""
    _expect(cfg, "displacement")
    spec = base_mixture(cfg.d)

    def pairs(t: int):
        a = sample_gmm(spec, cfg.n, cfg.base_seed + t)
        b0 = sample_gmm(spec, cfg.n, derive_seed(cfg.base_seed, t, _GROUP_B))
        for delta in cfg.parameter_grid:
            yield delta, a, _shift(b0.data, delta)

    return _run(cfg, pairs, threads)


def run_dispersion(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Component scale sigma sweeps at a fixed centroid offset of 10."""
    _expect(cfg, "dispersion")
    if any(v <= 0 for v in cfg.parameter_grid):
        raise InvalidInputError("dispersion grid values must be positive")

    def pairs(t: int):
        seed_b = derive_seed(cfg.base_seed, t, _GROUP_B)
        for sigma in cfg.parameter_grid:
            spec = base_mixture(cfg.d, sigma)
            a = sample_gmm(spec, cfg.n, cfg.base_seed + t)
            b0 = sample_gmm(spec, cfg.n, seed_b)
            yield sigma, a, _shift(b0.data, DISPERSION_OFFSET)

    return _run(cfg, pairs, threads)


def run_scaling(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """A fixed displacement pair, both clouds multiplied by alpha."""
    _expect(cfg, "scaling")
    if any(v <= 0 for v in cfg.parameter_grid):
        raise InvalidInputError("scaling grid values must be positive")
    spec = base_mixture(cfg.d)

    def pairs(t: int):
        a0 = sample_gmm(spec, cfg.n, cfg.base_seed + t)
        b0 = _shift(
            sample_gmm(spec, cfg.n,
                       derive_seed(cfg.base_seed, t, _GROUP_B)).data,
            SCALING_BASE_DELTA,
        )
        for alpha in cfg.parameter_grid:
            yield alpha, PointCloud(alpha * a0.data), PointCloud(alpha * b0.data)

    return _run(cfg, pairs, threads)


def run_topology(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """A stays unimodal; B's component count K sweeps the grid."""
    _expect(cfg, "topology")
    ks = []
    for v in cfg.parameter_grid:
        if v != int(v) or int(v) < 1:
            raise InvalidInputError(
                f"topology grid values must be positive integers, got {v}"
            )
        ks.append(int(v))

    def pairs(t: int):
        a = sample_gmm(single_gaussian(cfg.d, TOPOLOGY_SIGMA), cfg.n,
                       cfg.base_seed + t)
        seed_b = derive_seed(cfg.base_seed, t, _GROUP_B)
        for level, k in zip(cfg.parameter_grid, ks):
            spec = symmetric_mixture(k, cfg.d, TOPOLOGY_SIGMA)
            yield level, a, sample_gmm(spec, cfg.n, seed_b)

    return _run(cfg, pairs, threads)


def run_outliers(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """eps percent of each cloud replaced by N(0, tau^2 I) noise."""
    _expect(cfg, "outliers")
    if any(v < 0 or v > 100 for v in cfg.parameter_grid):
        raise InvalidInputError("outlier percentages must lie in [0, 100]")
    spec = base_mixture(cfg.d)

    def pairs(t: int):
        a0 = sample_gmm(spec, cfg.n, cfg.base_seed + t)
        b0 = _shift(
            sample_gmm(spec, cfg.n,
                       derive_seed(cfg.base_seed, t, _GROUP_B)).data,
            OUTLIER_DELTA,
        )
        seed_a = derive_seed(cfg.base_seed, t, _OUTLIERS_A)
        seed_b = derive_seed(cfg.base_seed, t, _OUTLIERS_B)
        for eps in cfg.parameter_grid:
            m = int(np.floor(eps * cfg.n / 100.0))
            yield eps, _contaminate(a0.data, m, seed_a), \
                _contaminate(b0.data, m, seed_b)

    return _run(cfg, pairs, threads)


_RUNNERS = {
    "displacement": run_displacement,
    "dispersion": run_dispersion,
    "scaling": run_scaling,
    "topology": run_topology,
    "outliers": run_outliers,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Dispatch on ``cfg.experiment``."""
    return _RUNNERS[cfg.experiment](cfg, threads=threads)
