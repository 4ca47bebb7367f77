"""Cross-fusion distance and baseline distributional distances between
point-cloud embeddings, with deterministic synthetic studies and an
evaluation harness."""

from .cloud import (CfdBreakdown, PointCloud, as_cloud, centroid, cfd,
                    cfd_union_oracle, dispersion)
from .errors import (FusedistError, InvalidInputError, NumericalError,
                     ParseError, ProtocolError, SolverFailureError,
                     UndefinedCorrelationError)
from .evaluate import (BenchRecord, BenchReport, CddrRecord, EvalRecord,
                       RdrReport, cddr, distance_cddr_correlation,
                       rdr_protocol, runtime_bench)
from .manifest import CddrSetting, RunManifest
from .matio import load_matrix, save_matrix
from .metrics import (METRIC_IDS, MetricConfig, MetricResult, cfd_metric,
                      chamfer, compute_metric, hausdorff, mmd_rbf, sinkhorn,
                      wasserstein2_exact)
from .rng import derive_seed, label_entropy, make_rng
from .synth import (DEFAULT_GRIDS, EXPERIMENTS, ExperimentConfig, GmmSpec,
                    SweepAggregate, SweepCell, SweepFailure, SweepResult,
                    base_mixture, run_displacement, run_dispersion,
                    run_experiment, run_outliers, run_scaling, run_topology,
                    sample_gmm, single_gaussian, symmetric_mixture)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord", "BenchReport", "CddrRecord", "CddrSetting",
    "CfdBreakdown", "DEFAULT_GRIDS", "EXPERIMENTS", "EvalRecord",
    "ExperimentConfig", "FusedistError", "GmmSpec", "InvalidInputError",
    "METRIC_IDS", "MetricConfig", "MetricResult", "NumericalError",
    "ParseError", "PointCloud", "ProtocolError", "RdrReport",
    "RunManifest", "SolverFailureError", "SweepAggregate", "SweepCell",
    "SweepFailure", "SweepResult", "UndefinedCorrelationError",
    "as_cloud", "base_mixture", "cddr", "centroid", "cfd",
    "cfd_metric", "cfd_union_oracle", "chamfer", "compute_metric",
    "derive_seed", "dispersion",
    "distance_cddr_correlation", "hausdorff", "label_entropy",
    "load_matrix", "make_rng", "mmd_rbf",
    "rdr_protocol", "run_displacement", "run_dispersion", "run_experiment",
    "run_outliers", "run_scaling", "run_topology", "runtime_bench",
    "sample_gmm", "save_matrix", "single_gaussian", "sinkhorn",
    "symmetric_mixture", "wasserstein2_exact",
]
