"""Generators, seed contracts, and the deformation sweeps."""

import numpy as np
import pytest

from fusedist import (
    DEFAULT_GRIDS,
    EXPERIMENTS,
    ExperimentConfig,
    GmmSpec,
    InvalidInputError,
    MetricConfig,
    base_mixture,
    cfd,
    run_displacement,
    run_dispersion,
    run_experiment,
    run_outliers,
    run_scaling,
    run_topology,
    sample_gmm,
    single_gaussian,
    symmetric_mixture,
)
from fusedist.rng import derive_seed
from fusedist.synth import OUTLIER_DELTA, _contaminate


FAST = dict(d=4, n=24, trials=3, base_seed=11)


def fast_cfg(experiment, **overrides):
    kwargs = dict(FAST)
    kwargs.setdefault("metrics", (MetricConfig("cfd"),
                                  MetricConfig("chamfer")))
    kwargs.update(overrides)
    return ExperimentConfig(experiment, **kwargs)


# -------------------------------------------------------------- generators


def test_base_mixture_layout():
    spec = base_mixture(5)
    assert spec.k == 4 and spec.d == 5
    assert spec.means.sum() == 0.0
    assert spec.means[0, 0] == 2.0 and spec.means[1, 0] == -2.0
    assert spec.means[2, 1] == 2.0 and spec.means[3, 1] == -2.0


def test_base_mixture_needs_two_axes():
    with pytest.raises(InvalidInputError):
        base_mixture(1)


@pytest.mark.parametrize("k,pairs", [(1, 0), (2, 1), (5, 2), (8, 4)])
def test_symmetric_mixture_antipodal_pairs(k, pairs):
    spec = symmetric_mixture(k, d=6, sigma=1.0)
    assert spec.k == k
    assert np.allclose(spec.means.sum(axis=0), 0.0)
    # each pair occupies one axis with +-scale
    for j in range(pairs):
        assert spec.means[2 * j, j] == 2.0
        assert spec.means[2 * j + 1, j] == -2.0
    if k % 2 == 1:
        assert not spec.means[k - 1].any()


def test_symmetric_mixture_needs_enough_axes():
    with pytest.raises(InvalidInputError):
        symmetric_mixture(8, d=3, sigma=1.0)


def test_single_gaussian_is_origin_component():
    spec = single_gaussian(3, 0.5)
    assert spec.k == 1
    assert not spec.means.any()


@pytest.mark.parametrize("kwargs", [
    {"means": np.zeros((0, 2)), "sigma": 1.0},
    {"means": np.array([[np.nan, 0.0]]), "sigma": 1.0},
    {"means": np.zeros((2, 2)), "sigma": 0.0},
    {"means": np.zeros((2, 2)), "sigma": -1.0},
])
def test_gmm_spec_rejects_bad_fields(kwargs):
    with pytest.raises(InvalidInputError):
        GmmSpec(**kwargs)


def test_sample_gmm_deterministic():
    spec = base_mixture(3)
    a = sample_gmm(spec, 50, 7).data
    b = sample_gmm(spec, 50, 7).data
    assert np.array_equal(a, b)
    assert a.shape == (50, 3)
    assert not np.array_equal(a, sample_gmm(spec, 50, 8).data)


def test_sample_gmm_rejects_empty():
    with pytest.raises(InvalidInputError):
        sample_gmm(base_mixture(2), 0, 1)


def test_sample_gmm_shares_noise_across_sigma():
    # Same seed, doubled sigma: identical underlying normals, so the
    # zero-mean cloud doubles exactly.
    one = sample_gmm(single_gaussian(4, 1.0), 30, 5).data
    two = sample_gmm(single_gaussian(4, 2.0), 30, 5).data
    assert np.array_equal(two, 2.0 * one)


# --------------------------------------------------------------- config


def test_config_fills_default_grid_and_metrics():
    cfg = ExperimentConfig("displacement")
    assert cfg.parameter_grid == DEFAULT_GRIDS["displacement"]
    assert [m.metric_id for m in cfg.metrics] == [
        "cfd", "wasserstein2_exact", "sinkhorn", "mmd_rbf",
        "hausdorff", "chamfer",
    ]


@pytest.mark.parametrize("kwargs", [
    {"experiment": "unknown"},
    {"experiment": "displacement", "d": 1},
    {"experiment": "displacement", "n": 1},
    {"experiment": "displacement", "trials": 0},
    {"experiment": "displacement", "base_seed": -1},
    {"experiment": "displacement", "parameter_grid": ()},
    {"experiment": "displacement", "parameter_grid": (1.0, 1.0)},
    {"experiment": "displacement", "parameter_grid": (2.0, 1.0)},
    {"experiment": "displacement", "parameter_grid": (1.0, np.inf)},
    {"experiment": "displacement", "metrics": ()},
])
def test_config_rejects_bad_fields(kwargs):
    with pytest.raises(InvalidInputError):
        ExperimentConfig(**kwargs)


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_every_experiment_has_a_default_grid(experiment):
    cfg = ExperimentConfig(experiment)
    assert cfg.parameter_grid == DEFAULT_GRIDS[experiment]


def test_runner_rejects_mismatched_config():
    with pytest.raises(InvalidInputError, match="expected"):
        run_dispersion(fast_cfg("displacement"))


@pytest.mark.parametrize("experiment,grid", [
    ("dispersion", (0.0, 1.0)),
    ("scaling", (-1.0, 1.0)),
    ("topology", (1.0, 2.5)),
    ("outliers", (0.0, 101.0)),
])
def test_runners_validate_their_grids(experiment, grid):
    with pytest.raises(InvalidInputError):
        run_experiment(fast_cfg(experiment, parameter_grid=grid))


# ------------------------------------------------------------ determinism


def test_sweep_rerun_is_identical():
    cfg = fast_cfg("displacement")
    assert run_displacement(cfg) == run_displacement(cfg)


def test_threaded_sweep_matches_serial():
    cfg = fast_cfg("outliers")
    serial = run_outliers(cfg, threads=1)
    threaded = run_outliers(cfg, threads=4)
    assert serial == threaded


def test_displacement_seed_contract():
    """Cell values must reproduce from the documented seed recipe."""
    cfg = fast_cfg("displacement", parameter_grid=(0.5, 2.0),
                   metrics=(MetricConfig("cfd"),))
    result = run_displacement(cfg)
    spec = base_mixture(cfg.d)
    for t in range(cfg.trials):
        a = sample_gmm(spec, cfg.n, cfg.base_seed + t)
        b0 = sample_gmm(spec, cfg.n,
                        derive_seed(cfg.base_seed, t, "group-b"))
        for level in cfg.parameter_grid:
            shifted = b0.data.copy()
            shifted[:, 0] += level
            expected = cfd(a.data, shifted).cfd
            got = [c.value for c in result.cells
                   if c.trial == t and c.level == level]
            assert got == [expected]


def test_outliers_at_zero_match_displacement_at_base_delta():
    metrics = (MetricConfig("cfd"), MetricConfig("hausdorff"))
    out = run_outliers(fast_cfg("outliers", metrics=metrics,
                                parameter_grid=(0.0, 5.0)))
    disp = run_displacement(fast_cfg("displacement", metrics=metrics,
                                     parameter_grid=(OUTLIER_DELTA,)))
    for mid in ("cfd", "hausdorff"):
        assert np.array_equal(out.values(mid, 0.0),
                              disp.values(mid, OUTLIER_DELTA))


# ----------------------------------------------------------- contamination


def test_contaminate_replaces_exactly_m_rows():
    rng = np.random.default_rng(0)
    data = rng.normal(size=(40, 3))
    out = _contaminate(data, 5, seed=9).data
    changed = (out != data).any(axis=1)
    assert changed.sum() == 5
    assert np.array_equal(out[~changed], data[~changed])


def test_contaminate_zero_rows_is_identity():
    data = np.ones((10, 2))
    assert np.array_equal(_contaminate(data, 0, seed=1).data, data)


def test_contaminate_deterministic_per_seed():
    data = np.zeros((30, 2))
    a = _contaminate(data, 3, seed=4).data
    b = _contaminate(data, 3, seed=4).data
    assert np.array_equal(a, b)
    assert not np.array_equal(a, _contaminate(data, 3, seed=5).data)


# ------------------------------------------------------- sweep behavior


def test_dispersion_widening_lowers_cfd():
    cfg = fast_cfg("dispersion", n=60, parameter_grid=(0.5, 5.0),
                   metrics=(MetricConfig("cfd"),))
    curve = run_dispersion(cfg).mean_curve("cfd")
    assert curve[1] < curve[0]


def test_scaling_leaves_cfd_cells_identical():
    cfg = fast_cfg("scaling", metrics=(MetricConfig("cfd"),))
    result = run_scaling(cfg)
    for t in range(cfg.trials):
        per_trial = [c.value for c in result.cells if c.trial == t]
        assert len(set(per_trial)) == 1  # exact, powers of two


def test_topology_keeps_group_a_fixed():
    cfg = fast_cfg("topology", parameter_grid=(1.0, 2.0, 4.0),
                   metrics=(MetricConfig("cfd"),))
    result = run_topology(cfg)
    assert len(result.cells) == cfg.trials * 3
    assert all(np.isfinite(c.value) for c in result.cells)


def test_sweep_failures_are_recorded_not_raised():
    # A bandwidth whose square underflows makes every mmd cell fail;
    # the cfd cells must be unaffected.
    bad = MetricConfig("mmd_rbf", mmd_bandwidth_policy="fixed",
                       mmd_fixed_bandwidth=1e-200)
    cfg = fast_cfg("displacement", parameter_grid=(1.0,),
                   metrics=(MetricConfig("cfd"), bad))
    result = run_displacement(cfg)
    assert len(result.values("cfd", 1.0)) == cfg.trials
    assert len(result.failures) == cfg.trials
    assert {f.code for f in result.failures} == {"numerical-failure"}
    assert all(f.metric_id == "mmd_rbf" for f in result.failures)


# -------------------------------------------------------------- aggregates


def test_aggregates_summarize_cells():
    cfg = fast_cfg("displacement", parameter_grid=(1.0, 3.0),
                   metrics=(MetricConfig("cfd"),))
    result = run_displacement(cfg)
    aggs = {(a.metric_id, a.level): a for a in result.aggregates()}
    for level in (1.0, 3.0):
        vals = result.values("cfd", level)
        agg = aggs[("cfd", level)]
        assert agg.count == cfg.trials
        assert agg.mean == pytest.approx(vals.mean(), rel=1e-15)
        assert agg.std == pytest.approx(np.std(vals), rel=1e-12)  # ddof=0
    assert aggs[("cfd", 1.0)].normalized_mean == 1.0
    expected = aggs[("cfd", 3.0)].mean / aggs[("cfd", 1.0)].mean
    assert aggs[("cfd", 3.0)].normalized_mean == pytest.approx(expected)


def test_values_preserve_trial_order():
    cfg = fast_cfg("displacement", parameter_grid=(1.0,),
                   metrics=(MetricConfig("cfd"),))
    result = run_displacement(cfg)
    trials = [c.trial for c in result.cells]
    assert trials == sorted(trials)


def test_mean_curve_tracks_grid_order():
    cfg = fast_cfg("displacement", parameter_grid=(0.5, 1.0, 4.0),
                   metrics=(MetricConfig("cfd"),))
    result = run_displacement(cfg)
    curve = result.mean_curve("cfd")
    assert curve.shape == (3,)
    assert curve[2] > curve[0]  # wide shifts dominate
