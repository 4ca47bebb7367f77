"""Array-in, map-out wrappers around the core distances.

Each function binds host buffers through the boundary, computes with the
core library, and returns a plain dict of Python scalars and lists, so
results serialize directly and survive any host-side marshalling. Every
result carries a ``copied`` entry reporting which inputs had to be
copied to reach contiguous row-major layout.

Only distance computation (with the full cross-fusion breakdown) and
the half-split ratio protocol cross this boundary; sweeps and benches
stay on the command line. The wrapped core functions are pure and the
heavy lifting happens inside kernels that release the interpreter lock,
so concurrent calls from host threads are safe.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from fusedist import (CfdBreakdown, InvalidInputError, MetricConfig, cfd,
                      compute_metric, rdr_protocol)

from .boundary import as_view

_OPTION_FIELDS = frozenset(
    f.name for f in dataclasses.fields(MetricConfig)
) - {"metric_id"}


def _config(metric_name: str, options) -> MetricConfig:
    options = dict(options or {})
    unknown = sorted(set(options) - _OPTION_FIELDS)
    if unknown:
        raise InvalidInputError(
            f"unknown metric options {unknown}; expected a subset of "
            f"{sorted(_OPTION_FIELDS)}"
        )
    return MetricConfig(metric_id=metric_name, **options)


def _plain(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def distance(a, b, metric_name: str = "cfd", options=None, *,
             shape_a=None, shape_b=None) -> dict:
    """One metric value between two host buffers.

    Returns ``{"metric", "value", "wall_time", "degenerate",
    "converged", "copied"}``. ``options`` holds solver knobs by their
    config field names (for example ``{"sinkhorn_epsilon": 0.05}``).
    """
    cfg = _config(metric_name, options)
    va = as_view(a, shape_a)
    vb = as_view(b, shape_b)
    res = compute_metric(va.cloud, vb.cloud, cfg)
    return {
        "metric": res.metric_id,
        "value": res.value,
        "wall_time": res.wall_time,
        "degenerate": res.degenerate,
        "converged": res.converged,
        "copied": {"a": va.copied, "b": vb.copied},
    }


def cfd_breakdown(a, b, *, shape_a=None, shape_b=None) -> dict:
    """Full cross-fusion decomposition as a map.

    Carries every breakdown field (group moments, weights, pooled
    dispersion, displacement terms, score, distance, degeneracy flag)
    with centroids as lists, plus the ``copied`` metadata entry.
    """
    va = as_view(a, shape_a)
    vb = as_view(b, shape_b)
    br = cfd(va.cloud, vb.cloud)
    out = {f.name: _plain(getattr(br, f.name))
           for f in dataclasses.fields(CfdBreakdown)}
    out["copied"] = {"a": va.copied, "b": vb.copied}
    return out


def rdr(cloud, ref_a, ref_b, metric_name: str = "cfd", splits: int = 50,
        seed: int = 42, options=None, *, shape=None, shape_ref_a=None,
        shape_ref_b=None) -> dict:
    """Half-split ratio protocol on one host buffer.

    ``cloud`` is permuted and cut in half ``splits`` times; each split
    distance is divided by the metric on the reference pair. Returns
    the per-split records plus their mean and standard deviation.
    """
    cfg = _config(metric_name, options)
    vc = as_view(cloud, shape)
    va = as_view(ref_a, shape_ref_a)
    vb = as_view(ref_b, shape_ref_b)
    rep = rdr_protocol(vc.cloud, (va.cloud, vb.cloud), cfg,
                       splits=splits, seed=seed)
    return {
        "metric": rep.metric_id,
        "mean": rep.mean,
        "std": rep.std,
        "denominator": rep.denominator,
        "near_zero_denominator": rep.near_zero_denominator,
        "records": [
            {"split_id": r.split_id, "numerator": r.numerator,
             "denominator": r.denominator, "rdr": r.rdr}
            for r in rep.records
        ],
        "failures": [
            {"split_id": split_id, "code": code}
            for split_id, code in rep.failures
        ],
        "copied": {"input": vc.copied, "ref_a": va.copied,
                   "ref_b": vb.copied},
    }
