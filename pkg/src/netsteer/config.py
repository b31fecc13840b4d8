"""Run configuration schema: strict JSON validated by pydantic.

A config fully describes one run: node matrices, coupling topology, the
perturbation (with either a declared Hölder constant or an estimation
recipe), the time horizon, optional steering endpoints, and output paths.
Unknown fields are rejected; structural problems (ragged matrices, rho out
of range, odd K) fail at parse time with the offending location named.
Cross-field dimensional consistency is checked later by network validation.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .perturbation import FAMILY_PARAMS
from .reports import render_json

__all__ = [
    "ConfigError",
    "NodeConfig",
    "TopologyConfig",
    "FamilyConfig",
    "EstimationConfig",
    "PerturbationConfig",
    "HorizonConfig",
    "SteeringConfig",
    "OutputsConfig",
    "RunConfig",
    "parse_config",
    "load_config",
    "dump_config",
]


class ConfigError(Exception):
    """A config failed to parse or validate; message names the location."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _require_rectangular(owner, name, rows):
    if not rows or not rows[0]:
        raise ValueError(f"{owner}: matrix {name} must be non-empty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{owner}: matrix {name} has rows of unequal length")


class NodeConfig(_Strict):
    index: int = Field(ge=1)
    A: list[list[float]]
    B: list[list[float]]
    C: list[list[float]]
    H: list[list[float]]

    @model_validator(mode="after")
    def _rectangular(self):
        for name in ("A", "B", "C", "H"):
            _require_rectangular(f"node {self.index}", name, getattr(self, name))
        return self


class TopologyConfig(_Strict):
    beta: list[list[float]]
    delta: list[float]
    m: int

    @model_validator(mode="after")
    def _rectangular(self):
        _require_rectangular("topology", "beta", self.beta)
        return self


class FamilyConfig(_Strict):
    family: Literal["zero", "scaled-sine", "saturation", "sqrt-sublinear", "affine-bounded"]
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _params_match_family(self):
        required = set(FAMILY_PARAMS[self.family])
        got = set(self.params)
        if got != required:
            raise ValueError(
                f"family {self.family!r} takes parameters {sorted(required)}, got {sorted(got)}"
            )
        if self.family == "saturation" and not self.params["limit"] > 0:
            raise ValueError(f"saturation limit must be positive, got {self.params['limit']}")
        return self


class EstimationConfig(_Strict):
    box_low: Union[float, list[float]] = -1.0
    box_high: Union[float, list[float]] = 1.0
    samples: int = Field(default=10000, ge=2)
    seed: int = 0


class PerturbationConfig(_Strict):
    rho: float = Field(gt=0.0, le=1.0)
    alpha_declared: Optional[float] = Field(default=None, ge=0.0)
    per_node: list[FamilyConfig] = Field(min_length=1)
    estimation: Optional[EstimationConfig] = None

    @model_validator(mode="after")
    def _alpha_available(self):
        if self.alpha_declared is None and self.estimation is None:
            raise ValueError("either alpha_declared or an estimation block is required")
        return self


class HorizonConfig(_Strict):
    t0: float = 0.0
    t1: float
    K: int = 200

    @model_validator(mode="after")
    def _well_formed(self):
        if not self.t1 > self.t0:
            raise ValueError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if self.K < 2 or self.K % 2 != 0:
            raise ValueError(f"K must be an even integer >= 2, got {self.K}")
        return self


class SteeringConfig(_Strict):
    x0: list[float] = Field(min_length=1)
    x1: list[float] = Field(min_length=1)
    fp_tolerance: float = Field(default=1e-9, gt=0.0)
    max_iterations: int = Field(default=100, ge=1)
    sim_refinement: int = Field(default=10, ge=1)


class OutputsConfig(_Strict):
    report: str = "report.json"
    trajectory: str = "trajectory.csv"
    control: str = "control.csv"
    plot_data: Optional[str] = None


class RunConfig(_Strict):
    nodes: list[NodeConfig] = Field(min_length=1)
    topology: TopologyConfig
    perturbation: PerturbationConfig
    horizon: HorizonConfig
    steering: Optional[SteeringConfig] = None
    outputs: OutputsConfig = Field(default_factory=OutputsConfig)


def parse_config(text):
    """Parse JSON text into a RunConfig; raises ConfigError naming problems."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"]) or "<root>"
            lines.append(f"  {loc}: {err['msg']}")
        raise ConfigError("invalid config:\n" + "\n".join(lines)) from exc


def load_config(path):
    """Read and parse a config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def dump_config(cfg):
    """Normalized config text: defaults filled in, deterministic formatting.

    The output re-parses to a RunConfig equal to the input (round-trip
    identity); floats are printed with 17 significant digits.
    """
    return render_json(cfg.model_dump(mode="python"))
