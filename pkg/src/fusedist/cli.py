"""Command-line interface.

Subcommands: dist, sweep, rdr, cddr, bench. Exit status is 0 on
success, 1 on any input problem (bad flags, unreadable or malformed
files), and 2 on numerical failure inside a computation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .cloud import cfd as cfd_breakdown
from .errors import FusedistError, InvalidInputError
from .evaluate import distance_cddr_correlation, rdr_protocol, runtime_bench
from .evaluate import cddr as cddr_ratio
from .manifest import RunManifest
from .matio import FORMATS, load_matrix
from .metrics import METRIC_IDS, MetricConfig, compute_metric
from .reports import bench_csv, bench_json, cddr_json, rdr_json, write_sweep
from .synth import EXPERIMENTS, ExperimentConfig, run_experiment

THREADS_ENV = "FUSEDIST_THREADS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract here is
    # that every input problem exits 1, so route through an exception.
    def error(self, message):
        raise _UsageError(message)


def _metric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=None,
                   help="sinkhorn regularization strength")
    p.add_argument("--max-iter", type=int, default=None,
                   help="sinkhorn iteration budget")
    p.add_argument("--tol", type=float, default=None,
                   help="sinkhorn marginal tolerance")
    p.add_argument("--mmd-bandwidth-policy", default=None,
                   choices=["median_heuristic", "fixed"])
    p.add_argument("--mmd-bandwidth", type=float, default=None,
                   help="bandwidth used when the policy is 'fixed'")


def _metric_config(metric_id: str, args) -> MetricConfig:
    kwargs = {}
    if getattr(args, "epsilon", None) is not None:
        kwargs["sinkhorn_epsilon"] = args.epsilon
    if getattr(args, "max_iter", None) is not None:
        kwargs["sinkhorn_max_iter"] = args.max_iter
    if getattr(args, "tol", None) is not None:
        kwargs["sinkhorn_tol"] = args.tol
    if getattr(args, "mmd_bandwidth_policy", None) is not None:
        kwargs["mmd_bandwidth_policy"] = args.mmd_bandwidth_policy
    if getattr(args, "mmd_bandwidth", None) is not None:
        kwargs["mmd_fixed_bandwidth"] = args.mmd_bandwidth
    return MetricConfig(metric_id, **kwargs)


def _parse_metric_list(text: str, args) -> tuple[MetricConfig, ...]:
    ids = [t.strip() for t in text.split(",") if t.strip()]
    if not ids:
        raise InvalidInputError("empty metric list")
    return tuple(_metric_config(mid, args) for mid in ids)


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as err:
        raise InvalidInputError(f"bad grid value: {err}") from None


def _resolve_threads(args) -> int:
    if getattr(args, "serial", False):
        return 1
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return 1
        try:
            n = int(env)
        except ValueError:
            raise InvalidInputError(
                f"{THREADS_ENV} must be an integer, got {env!r}"
            ) from None
    if n < 1:
        raise InvalidInputError(f"thread count must be positive, got {n}")
    return n


def _threading_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")
    p.add_argument("--serial", action="store_true",
                   help="force the single-threaded deterministic path")


def _cmd_dist(args) -> int:
    fmt = None if args.format == "auto" else args.format
    a = load_matrix(args.cloud_a, fmt=fmt)
    b = load_matrix(args.cloud_b, fmt=fmt)
    cfg = _metric_config(args.metric, args)
    res = compute_metric(a, b, cfg)
    doc = {
        "metric": res.metric_id,
        "value": res.value,
        "wall_time": res.wall_time,
        "degenerate": res.degenerate,
        "converged": res.converged,
        "inputs": {"cloud_a": str(args.cloud_a), "cloud_b": str(args.cloud_b)},
    }
    if args.breakdown:
        if args.metric != "cfd":
            raise InvalidInputError("--breakdown applies to the cfd metric")
        br = cfd_breakdown(a, b)
        doc["breakdown"] = {
            "n_a": br.n_a, "n_b": br.n_b, "w_a": br.w_a, "w_b": br.w_b,
            "mu_a": br.mu_a.tolist(), "mu_b": br.mu_b.tolist(),
            "mu_ab": br.mu_ab.tolist(),
            "sigma2_a": br.sigma2_a, "sigma2_b": br.sigma2_b,
            "sigma2_ab": br.sigma2_ab, "within": br.within,
            "displacement_a": br.displacement_a,
            "displacement_b": br.displacement_b,
            "cfs": br.cfs, "cfd": br.cfd, "degenerate": br.degenerate,
        }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_sweep(args) -> int:
    threads = _resolve_threads(args)
    base: dict = {}
    if args.manifest is not None:
        m = RunManifest.from_json(Path(args.manifest).read_text(encoding="utf-8"))
        if m.task != "sweep":
            raise InvalidInputError(f"manifest task is {m.task!r}, not sweep")
        for name in ("experiment", "d", "n", "trials", "base_seed",
                     "parameter_grid", "metrics"):
            if getattr(m, name) is not None:
                base[name] = getattr(m, name)
        if m.output_dir is not None and args.output_dir is None:
            args.output_dir = m.output_dir
    if args.experiment is not None:
        base["experiment"] = args.experiment
    if "experiment" not in base:
        raise InvalidInputError("an experiment is required (flag or manifest)")
    if args.d is not None:
        base["d"] = args.d
    if args.n is not None:
        base["n"] = args.n
    if args.trials is not None:
        base["trials"] = args.trials
    if args.seed is not None:
        base["base_seed"] = args.seed
    if args.grid is not None:
        base["parameter_grid"] = _parse_grid(args.grid)
    if args.metrics is not None:
        base["metrics"] = _parse_metric_list(args.metrics, args)
    if args.output_dir is None:
        raise InvalidInputError("--output-dir is required (flag or manifest)")
    cfg = ExperimentConfig(**base)
    result = run_experiment(cfg, threads=threads)
    paths = write_sweep(result, args.output_dir)
    manifest = RunManifest(
        task="sweep", experiment=cfg.experiment, d=cfg.d, n=cfg.n,
        trials=cfg.trials, base_seed=cfg.base_seed,
        parameter_grid=cfg.parameter_grid, metrics=cfg.metrics,
        output_dir=str(args.output_dir),
    )
    mpath = Path(args.output_dir) / f"{cfg.experiment}_manifest.json"
    mpath.write_text(manifest.to_json() + "\n", encoding="utf-8")
    for name in sorted(paths):
        print(f"{name}: {paths[name]}")
    print(f"manifest: {mpath}")
    return 0


def _cmd_rdr(args) -> int:
    cloud = load_matrix(args.input)
    ref_a = load_matrix(args.ref_a)
    ref_b = load_matrix(args.ref_b)
    cfg = _metric_config(args.metric, args)
    report = rdr_protocol(cloud, (ref_a, ref_b), cfg,
                          splits=args.splits, seed=args.seed)
    text = rdr_json(report)
    if args.output is not None:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        print(f"report: {args.output}")
    else:
        print(text)
    return 0


def _cmd_cddr(args) -> int:
    m = RunManifest.from_json(Path(args.manifest).read_text(encoding="utf-8"))
    if m.task != "cddr":
        raise InvalidInputError(f"manifest task is {m.task!r}, not cddr")
    if not m.settings:
        raise InvalidInputError("cddr manifest has no settings")
    records = [cddr_ratio(s.setting, s.m_within, s.m_cross)
               for s in m.settings]
    drops = [r.cddr for r in records]
    metric_ids: list[str] = []
    for s in m.settings:
        for mid, _ in s.distances:
            if mid not in metric_ids:
                metric_ids.append(mid)
    correlations: dict[str, float] = {}
    for mid in metric_ids:
        per_setting = []
        for s in m.settings:
            table = dict(s.distances)
            if mid not in table:
                raise InvalidInputError(
                    f"setting {s.setting!r} lacks a distance for {mid!r}"
                )
            per_setting.append(table[mid])
        correlations[mid] = distance_cddr_correlation(per_setting, drops)
    text = cddr_json(records, correlations)
    if args.output is not None:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        print(f"report: {args.output}")
    else:
        print(text)
    return 0


def _cmd_bench(args) -> int:
    sizes = tuple(int(t) for t in args.sizes.split(",") if t.strip())
    cfgs = _parse_metric_list(args.metrics, args)
    report = runtime_bench(cfgs, sizes, d=args.d, repeats=args.repeats,
                           seed=args.seed)
    sys.stdout.write(bench_csv(report))
    for mid, slope in report.slopes.items():
        print(f"slope {mid}: {slope:.4f}", file=sys.stderr)
    if args.output_dir is not None:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(bench_csv(report), encoding="utf-8")
        (out / "bench.json").write_text(bench_json(report) + "\n",
                                        encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fusedist",
                     description="Distributional distances between point clouds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two cloud files")
    p.add_argument("cloud_a")
    p.add_argument("cloud_b")
    p.add_argument("--metric", default="cfd", choices=list(METRIC_IDS))
    p.add_argument("--format", default="auto",
                   choices=["auto", *FORMATS])
    p.add_argument("--breakdown", action="store_true",
                   help="include the full cfd decomposition")
    _metric_flags(p)
    p.set_defaults(handler=_cmd_dist)

    p = sub.add_parser("sweep", help="run one synthetic experiment")
    p.add_argument("--experiment", default=None, choices=list(EXPERIMENTS))
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--grid", default=None,
                   help="comma-separated sweep levels")
    p.add_argument("--metrics", default=None,
                   help="comma-separated metric ids")
    p.add_argument("--manifest", default=None,
                   help="sweep manifest JSON (flags override it)")
    p.add_argument("--output-dir", default=None)
    _metric_flags(p)
    _threading_flags(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("rdr", help="resampling ratio of a metric")
    p.add_argument("--input", required=True, help="cloud to split")
    p.add_argument("--ref-a", required=True)
    p.add_argument("--ref-b", required=True)
    p.add_argument("--metric", default="cfd", choices=list(METRIC_IDS))
    p.add_argument("--splits", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", default=None)
    _metric_flags(p)
    p.set_defaults(handler=_cmd_rdr)

    p = sub.add_parser("cddr", help="cross-setting drop ratios and correlations")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_cddr)

    p = sub.add_parser("bench", help="runtime ladder and log-log slopes")
    p.add_argument("--sizes", default="1000,2000,4000,8000,16000")
    p.add_argument("--d", type=int, default=128)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--metrics", default="cfd,hausdorff,mmd_rbf")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output-dir", default=None)
    _metric_flags(p)
    p.set_defaults(handler=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error [invalid-input]: {err}", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except FusedistError as err:
        print(f"error [{err.code}]: {err}", file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
