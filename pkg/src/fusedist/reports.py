"""Serialization of sweep, resampling, and benchmark results.

Sweeps write three files per experiment into an output directory:

``<experiment>_raw.csv``
    Long format, one successful cell per row:
    ``experiment,metric,level,trial,value``.
``<experiment>_aggregate.csv``
    One row per (metric, level):
    ``experiment,metric,level,mean,std,count,normalized_mean``.
``<experiment>_sweep.json``
    Full-fidelity record (config echo, cells, failures, aggregates);
    :func:`read_sweep_json` reconstructs the SweepResult exactly.

Failed cells, if any, land in ``<experiment>_errors.csv``. All floats
are written with 17 significant digits, so every emitted number parses
back to the identical float64. Nothing time-dependent is written, which
makes sweep outputs byte-identical across reruns.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import ParseError
from .evaluate import BenchReport, CddrRecord, RdrReport
from .matio import format_value
from .synth import SweepCell, SweepFailure, SweepResult

_RAW_HEADER = ["experiment", "metric", "level", "trial", "value"]
_AGG_HEADER = ["experiment", "metric", "level", "mean", "std", "count",
               "normalized_mean"]
_ERR_HEADER = ["experiment", "metric", "level", "trial", "code", "message"]
_BENCH_HEADER = ["metric", "n", "d", "wall_time", "repeats"]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_sweep(result: SweepResult, out_dir) -> dict[str, Path]:
    """Write the three (or four) sweep files; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = result.experiment
    paths = {
        "raw": out_dir / f"{prefix}_raw.csv",
        "aggregate": out_dir / f"{prefix}_aggregate.csv",
        "json": out_dir / f"{prefix}_sweep.json",
    }
    with paths["raw"].open("w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(_RAW_HEADER)
        for c in result.cells:
            w.writerow([result.experiment, c.metric_id,
                        format_value(c.level), c.trial,
                        format_value(c.value)])
    with paths["aggregate"].open("w", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(_AGG_HEADER)
        for row in result.aggregates():
            w.writerow([
                result.experiment, row.metric_id, format_value(row.level),
                format_value(row.mean), format_value(row.std), row.count,
                "" if row.normalized_mean is None
                else format_value(row.normalized_mean),
            ])
    if result.failures:
        paths["errors"] = out_dir / f"{prefix}_errors.csv"
        with paths["errors"].open("w", encoding="utf-8") as fh:
            w = _writer(fh)
            w.writerow(_ERR_HEADER)
            for f in result.failures:
                w.writerow([result.experiment, f.metric_id,
                            format_value(f.level), f.trial, f.code,
                            f.message])
    paths["json"].write_text(sweep_json(result), encoding="utf-8")
    return paths


def sweep_json(result: SweepResult) -> str:
    doc = {
        "experiment": result.experiment,
        "d": result.d,
        "n": result.n,
        "trials": result.trials,
        "base_seed": result.base_seed,
        "grid": list(result.grid),
        "metric_ids": list(result.metric_ids),
        "cells": [
            {"metric": c.metric_id, "level": c.level, "trial": c.trial,
             "value": c.value}
            for c in result.cells
        ],
        "failures": [
            {"metric": f.metric_id, "level": f.level, "trial": f.trial,
             "code": f.code, "message": f.message}
            for f in result.failures
        ],
        "aggregates": [
            {"metric": a.metric_id, "level": a.level, "mean": a.mean,
             "std": a.std, "count": a.count,
             "normalized_mean": a.normalized_mean}
            for a in result.aggregates()
        ],
    }
    return json.dumps(doc, indent=2)


def read_sweep_json(path) -> SweepResult:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: invalid JSON: {err}") from None
    try:
        cells = tuple(
            SweepCell(c["metric"], float(c["level"]), int(c["trial"]),
                      float(c["value"]))
            for c in doc["cells"]
        )
        failures = tuple(
            SweepFailure(f["metric"], float(f["level"]), int(f["trial"]),
                         f["code"], f["message"])
            for f in doc.get("failures", [])
        )
        return SweepResult(doc["experiment"], int(doc["d"]), int(doc["n"]),
                           int(doc["trials"]), int(doc["base_seed"]),
                           tuple(float(v) for v in doc["grid"]),
                           tuple(doc["metric_ids"]), cells, failures)
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"{path}: malformed sweep document: {err}") from None


def read_sweep_csv(path) -> SweepResult:
    """Rebuild a minimal SweepResult from a raw-cells CSV.

    Only what the CSV itself carries is recovered: grid and metric order
    come from first appearance, and the sampling configuration (d, n,
    base_seed) is set to zero.
    """
    path = Path(path)
    cells: list[SweepCell] = []
    experiment = None
    metric_ids: list[str] = []
    levels: list[float] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _RAW_HEADER:
            raise ParseError(f"{path}: row 1: expected header "
                             f"{','.join(_RAW_HEADER)}")
        for i, row in enumerate(reader, start=2):
            if len(row) != len(_RAW_HEADER):
                raise ParseError(
                    f"{path}: row {i}: expected {len(_RAW_HEADER)} "
                    f"columns, found {len(row)}"
                )
            try:
                cell = SweepCell(row[1], float(row[2]), int(row[3]),
                                 float(row[4]))
            except ValueError as err:
                raise ParseError(f"{path}: row {i}: {err}") from None
            experiment = experiment if experiment is not None else row[0]
            if row[1] not in metric_ids:
                metric_ids.append(row[1])
            if cell.level not in levels:
                levels.append(cell.level)
            cells.append(cell)
    if experiment is None:
        raise ParseError(f"{path}: no data rows")
    trials = 1 + max(c.trial for c in cells)
    return SweepResult(experiment, 0, 0, trials, 0,
                       tuple(sorted(levels)), tuple(metric_ids),
                       tuple(cells))


def rdr_json(report: RdrReport) -> str:
    doc = {
        "metric": report.metric_id,
        "denominator": report.denominator,
        "near_zero_denominator": report.near_zero_denominator,
        "mean": report.mean,
        "std": report.std,
        "records": [
            {"split": r.split_id, "numerator": r.numerator,
             "denominator": r.denominator, "rdr": r.rdr}
            for r in report.records
        ],
        "failures": [
            {"split": split, "code": code} for split, code in report.failures
        ],
    }
    return json.dumps(doc, indent=2)


def cddr_json(records: list[CddrRecord],
              correlations: dict[str, float | None]) -> str:
    doc = {
        "records": [
            {"setting": r.setting, "m_within": r.m_within,
             "m_cross": r.m_cross, "cddr": r.cddr}
            for r in records
        ],
        "correlations": correlations,
    }
    return json.dumps(doc, indent=2)


def bench_csv(report: BenchReport) -> str:
    lines = [",".join(_BENCH_HEADER)]
    for r in report.records:
        lines.append(",".join([
            r.metric_id, str(r.n), str(r.d), format_value(r.wall_time),
            str(r.repeats),
        ]))
    return "\n".join(lines) + "\n"


def bench_json(report: BenchReport) -> str:
    doc = {
        "records": [
            {"metric": r.metric_id, "n": r.n, "d": r.d,
             "wall_time": r.wall_time, "repeats": r.repeats}
            for r in report.records
        ],
        "slopes": report.slopes,
        "suspect_timings": [
            {"metric": r.metric_id, "n": r.n} for r in report.suspect_timings
        ],
    }
    return json.dumps(doc, indent=2)
