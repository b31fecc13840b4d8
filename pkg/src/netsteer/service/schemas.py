"""Request and response models of the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import RunConfig
from ..reports import AnalysisReport, ContractionReport

__all__ = [
    "AnalyzeRequest",
    "SteerRequest",
    "ContractionRequest",
    "NormalizeRequest",
    "SteerResponse",
    "NormalizeResponse",
    "HealthResponse",
    "AnalysisReport",
    "ContractionReport",
]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AnalyzeRequest(_Strict):
    config: RunConfig
    quadrature_check: bool = False
    seed: Optional[int] = None


class SteerRequest(AnalyzeRequest):
    pass


class ContractionRequest(_Strict):
    config: RunConfig
    pairs: int = Field(default=200, ge=1)
    seed: Optional[int] = None


class NormalizeRequest(_Strict):
    config: RunConfig


class SteerResponse(_Strict):
    report: AnalysisReport
    grid: Optional[list[float]]
    states: Optional[list[list[float]]]
    controls: Optional[list[list[float]]]
    successive_deltas: Optional[list[float]]


class NormalizeResponse(_Strict):
    config: RunConfig


class HealthResponse(_Strict):
    status: str
    version: str
