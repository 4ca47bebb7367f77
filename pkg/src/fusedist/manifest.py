"""Run manifests: a JSON snapshot of everything a run needs to be
reproduced (task, experiment knobs, metric configurations, input paths).

``RunManifest.from_json(m.to_json()) == m`` holds exactly; floats pass
through JSON's repr round-trip unharmed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import InvalidInputError, ParseError
from .metrics import MetricConfig

TASKS = ("dist", "sweep", "rdr", "cddr", "bench")


@dataclass(frozen=True)
class CddrSetting:
    """One evaluation setting: the two quality measurements plus the
    per-metric distances measured for that setting."""

    setting: str
    m_within: float
    m_cross: float
    distances: tuple[tuple[str, float], ...]

    def __post_init__(self):
        # Canonical key order so JSON round-trips compare equal.
        object.__setattr__(
            self, "distances",
            tuple(sorted((str(k), float(v)) for k, v in self.distances)),
        )


@dataclass(frozen=True)
class RunManifest:
    """Union of the knobs of all tasks; unused fields stay None."""

    task: str
    experiment: str | None = None
    d: int | None = None
    n: int | None = None
    trials: int | None = None
    base_seed: int | None = None
    parameter_grid: tuple[float, ...] | None = None
    metrics: tuple[MetricConfig, ...] | None = None
    inputs: tuple[tuple[str, str], ...] | None = None
    output_dir: str | None = None
    splits: int | None = None
    seed: int | None = None
    sizes: tuple[int, ...] | None = None
    repeats: int | None = None
    settings: tuple[CddrSetting, ...] | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise InvalidInputError(
                f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}"
            )
        for name in ("parameter_grid", "metrics", "inputs", "sizes",
                     "settings"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(val))
        if self.inputs is not None:
            object.__setattr__(
                self, "inputs",
                tuple(sorted((str(k), str(v)) for k, v in self.inputs)),
            )

    def to_json(self) -> str:
        doc: dict = {"task": self.task}
        for name in ("experiment", "d", "n", "trials", "base_seed",
                     "output_dir", "splits", "seed", "repeats"):
            val = getattr(self, name)
            if val is not None:
                doc[name] = val
        if self.parameter_grid is not None:
            doc["parameter_grid"] = list(self.parameter_grid)
        if self.metrics is not None:
            doc["metrics"] = [asdict(m) for m in self.metrics]
        if self.inputs is not None:
            doc["inputs"] = {k: v for k, v in self.inputs}
        if self.sizes is not None:
            doc["sizes"] = list(self.sizes)
        if self.settings is not None:
            doc["settings"] = [
                {
                    "setting": s.setting,
                    "m_within": s.m_within,
                    "m_cross": s.m_cross,
                    "distances": {k: v for k, v in s.distances},
                }
                for s in self.settings
            ]
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(f"manifest: invalid JSON: {err}") from None
        if not isinstance(doc, dict) or "task" not in doc:
            raise ParseError("manifest: top level must be an object with a task")
        kwargs: dict = {"task": doc["task"]}
        for name in ("experiment", "d", "n", "trials", "base_seed",
                     "output_dir", "splits", "seed", "repeats"):
            if name in doc:
                kwargs[name] = doc[name]
        if "parameter_grid" in doc:
            kwargs["parameter_grid"] = tuple(doc["parameter_grid"])
        if "metrics" in doc:
            try:
                kwargs["metrics"] = tuple(
                    MetricConfig(**m) for m in doc["metrics"]
                )
            except TypeError as err:
                raise ParseError(f"manifest: bad metric entry: {err}") from None
        if "inputs" in doc:
            kwargs["inputs"] = tuple(sorted(doc["inputs"].items()))
        if "sizes" in doc:
            kwargs["sizes"] = tuple(int(s) for s in doc["sizes"])
        if "settings" in doc:
            settings = []
            for s in doc["settings"]:
                try:
                    settings.append(CddrSetting(
                        s["setting"], s["m_within"], s["m_cross"],
                        tuple(sorted(s.get("distances", {}).items())),
                    ))
                except (KeyError, TypeError) as err:
                    raise ParseError(
                        f"manifest: bad setting entry: {err}"
                    ) from None
            kwargs["settings"] = tuple(settings)
        return cls(**kwargs)
