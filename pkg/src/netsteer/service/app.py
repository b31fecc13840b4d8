"""FastAPI application wrapping the analysis pipeline.

Validation diagnostics surface as HTTP 400 with a diagnostics list; schema
violations are FastAPI's usual 422. Verdicts (not controllable, iteration
did not converge, contraction condition unsatisfied) are ordinary 200
responses carrying the verdict inside the report.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from .. import pipeline
from ..network import NetworkValidationError
from ..reports import AnalysisReport, ContractionReport
from .schemas import (
    AnalyzeRequest,
    ContractionRequest,
    HealthResponse,
    NormalizeRequest,
    NormalizeResponse,
    SteerRequest,
    SteerResponse,
)

__all__ = ["create_app"]


def _diagnostics_400(exc):
    return HTTPException(status_code=400, detail={"diagnostics": [str(d) for d in exc.diagnostics]})


def create_app():
    app = FastAPI(
        title="netsteer",
        version=__version__,
        description="Controllability analysis and Gramian-based steering for nonlinearly perturbed networked LTI systems.",
    )

    @app.get("/health", response_model=HealthResponse)
    def health():
        """Liveness probe with the package version."""
        return HealthResponse(status="ok", version=__version__)

    @app.post("/analyze", response_model=AnalysisReport)
    def analyze(req: AnalyzeRequest):
        """Controllability, bounds, contraction constant, and verdict."""
        try:
            return pipeline.analyze(req.config, quadrature_check=req.quadrature_check, seed_override=req.seed)
        except NetworkValidationError as exc:
            raise _diagnostics_400(exc) from exc

    @app.post("/steer", response_model=SteerResponse)
    def steer(req: SteerRequest):
        """Analysis plus Picard steering and RK4 verification."""
        try:
            report, artifacts = pipeline.steer(
                req.config, quadrature_check=req.quadrature_check, seed_override=req.seed
            )
        except NetworkValidationError as exc:
            raise _diagnostics_400(exc) from exc
        if artifacts is None:
            return SteerResponse(report=report, grid=None, states=None, controls=None, successive_deltas=None)
        return SteerResponse(
            report=report,
            grid=[float(t) for t in artifacts.grid],
            states=[[float(v) for v in row] for row in artifacts.states],
            controls=[[float(v) for v in row] for row in artifacts.controls],
            successive_deltas=[float(d) for d in artifacts.successive_deltas],
        )

    @app.post("/contraction", response_model=ContractionReport)
    def contraction(req: ContractionRequest):
        """Empirical contraction-ratio check over random trajectory pairs."""
        try:
            return pipeline.contraction(req.config, pairs=req.pairs, seed_override=req.seed)
        except NetworkValidationError as exc:
            raise _diagnostics_400(exc) from exc

    @app.post("/config/normalize", response_model=NormalizeResponse)
    def normalize(req: NormalizeRequest):
        """Echo the config with all defaults filled in."""
        return NormalizeResponse(config=req.config)

    return app
