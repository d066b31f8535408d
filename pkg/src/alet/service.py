"""HTTP service exposing the run executor.

One stateless endpoint accepts a full run configuration and returns the
deterministic report plus every artifact payload; clients (including the
bundled CLI) decide where to write them. Request validation errors come
back as 422 responses with field paths.
"""
from __future__ import annotations

import time
from typing import List

from fastapi import FastAPI, Query
from pydantic import BaseModel

from . import __version__
from .config import RunConfig
from .runner import execute


class ArtifactPayload(BaseModel):
    path: str
    content: str


class RunResponse(BaseModel):
    status: str
    exit_code: int
    report: dict
    artifacts: List[ArtifactPayload]
    timing: dict


class HealthResponse(BaseModel):
    status: str
    version: str


class ValidateResponse(BaseModel):
    valid: bool
    config: dict


def create_app() -> FastAPI:
    app = FastAPI(title="alet", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/validate", response_model=ValidateResponse)
    def validate(config: RunConfig):
        return {"valid": True, "config": config.model_dump(mode="json", by_alias=True)}

    @app.post("/run", response_model=RunResponse)
    def run(config: RunConfig, workers: int = Query(default=1, ge=1)):
        started = time.monotonic()
        outcome = execute(config, workers=workers)
        elapsed = time.monotonic() - started
        return {
            "status": outcome.report["status"],
            "exit_code": outcome.exit_code,
            "report": outcome.report,
            "artifacts": [
                {"path": path, "content": content}
                for path, content in sorted(outcome.artifacts.items())
            ],
            "timing": {"wall_seconds": elapsed},
        }

    return app


app = create_app()
