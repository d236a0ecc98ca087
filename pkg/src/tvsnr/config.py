"""Experiment records: schedule, data mixture, solver and batch settings.

A config is plain JSON::

    {"schedule": {"family": "ISSNR", "vp": true, "params": {...}} | "VP-ISSNR",
     "mixture": "three-delta" | {"weights": [...], "centers": [...]},
     "solver": "heun", "lambda": 0.0, "steps": 512, "grid": "default",
     "batch": 1000, "seed": 0, "output_dir": "tvsnr_run"}

``schedule`` and ``mixture`` may also name a JSON file holding the record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import InvalidParameterError
from .samplers import TimeGrid, default_grid, edm_grid, uniform_grid
from .schedules import Family, ScheduleSpec, get_schedule
from .score import MixtureData

__all__ = ["ExperimentConfig", "load_config", "resolve_schedule", "resolve_mixture"]

SOLVERS = ("euler", "heun", "sde")
GRIDS = ("default", "uniform", "edm_rho")
MIXTURE_PRESETS = ("three-delta", "single-delta")
_FIELDS = {"schedule", "mixture", "solver", "lambda", "steps", "grid", "batch", "seed", "output_dir"}


def _load_json_file(ref: str, what: str) -> Any:
    path = Path(ref)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"{what} file {ref}: line {exc.lineno} col {exc.colno}: {exc.msg}") from None


def resolve_schedule(value: ScheduleSpec | str | Mapping[str, Any]) -> ScheduleSpec:
    """Catalog name, inline record, or path to a JSON record."""
    if isinstance(value, ScheduleSpec):
        return value
    if isinstance(value, Mapping):
        return ScheduleSpec.from_dict(value)
    if isinstance(value, str):
        if value.endswith(".json") or Path(value).is_file():
            return ScheduleSpec.from_dict(_load_json_file(value, "schedule"))
        return get_schedule(value)
    raise InvalidParameterError(f"schedule must be a name, record or file, got {type(value).__name__}")


def resolve_mixture(value: MixtureData | str | Mapping[str, Any]) -> str | MixtureData:
    """Preset names stay names (so configs keep reading well); files are loaded."""
    if isinstance(value, MixtureData):
        return value
    if isinstance(value, Mapping):
        return MixtureData.from_dict(value)
    if isinstance(value, str):
        if value in MIXTURE_PRESETS:
            return value
        if value.endswith(".json") or Path(value).is_file():
            return MixtureData.from_dict(_load_json_file(value, "mixture"))
        raise InvalidParameterError(f"unknown mixture {value!r}; presets are {list(MIXTURE_PRESETS)}")
    raise InvalidParameterError(f"mixture must be a preset, record or file, got {type(value).__name__}")


@dataclass(frozen=True)
class ExperimentConfig:
    schedule: ScheduleSpec = field(default_factory=lambda: get_schedule("issnr-mol"))
    mixture: str | MixtureData = "three-delta"
    solver: str = "heun"
    lam: float = 0.0
    steps: int = 512
    grid: str = "default"
    batch: int = 1000
    seed: int = 0
    output_dir: str = "tvsnr_run"

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", resolve_schedule(self.schedule))
        object.__setattr__(self, "mixture", resolve_mixture(self.mixture))
        if self.solver not in SOLVERS:
            raise InvalidParameterError(f"solver: expected one of {list(SOLVERS)}, got {self.solver!r}")
        if self.grid not in GRIDS:
            raise InvalidParameterError(f"grid: expected one of {list(GRIDS)}, got {self.grid!r}")
        for name in ("steps", "batch", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                if isinstance(value, float) and value.is_integer():
                    object.__setattr__(self, name, int(value))
                else:
                    raise InvalidParameterError(f"{name}: expected an integer, got {value!r}")
        if self.steps < 1:
            raise InvalidParameterError("steps: must be >= 1")
        if self.batch < 1:
            raise InvalidParameterError("batch: must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("seed: must be a 64-bit unsigned integer")
        object.__setattr__(self, "lam", float(self.lam))
        if not self.lam >= 0.0:
            raise InvalidParameterError("lambda: must be >= 0")
        if self.lam > 0.0 and self.solver != "sde":
            raise InvalidParameterError("lambda > 0 requires solver 'sde'")
        if self.grid == "edm_rho" and self.schedule.family is not Family.EDM:
            raise InvalidParameterError("grid 'edm_rho' needs an EDM (sigma-time) schedule")

    @property
    def mixture_data(self) -> MixtureData:
        if isinstance(self.mixture, str):
            return MixtureData.preset(self.mixture)
        return self.mixture

    def time_grid(self, steps: int | None = None) -> TimeGrid:
        steps = self.steps if steps is None else steps
        spec = self.schedule
        if self.grid == "default":
            return default_grid(spec, steps)
        if self.grid == "edm_rho":
            p = spec.params
            return edm_grid(steps, p["sigma_min"], p["sigma_max"], p["rho"], p["eps"])
        lo, hi = spec.interval
        return uniform_grid(steps, lo, hi)

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        mix = self.mixture if isinstance(self.mixture, str) else self.mixture.to_dict()
        return {
            "schedule": self.schedule.to_dict(),
            "mixture": mix,
            "solver": self.solver,
            "lambda": self.lam,
            "steps": self.steps,
            "grid": self.grid,
            "batch": self.batch,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise InvalidParameterError("config must be a JSON object")
        unknown = set(data) - _FIELDS
        if unknown:
            raise InvalidParameterError(f"config: unknown field(s) {sorted(unknown)}")
        kwargs = {("lam" if k == "lambda" else k): v for k, v in data.items()}
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"config: line {exc.lineno} col {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)


def load_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_json(Path(path).read_text(encoding="utf-8"))
