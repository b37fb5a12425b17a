"""HTTP service exposing scenario runs over a small versioned API."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .errors import ScgtError
from .runner import run_scenario, run_sweep
from .schemas import (
    REPORT_SCHEMA_ID,
    SCENARIO_SCHEMA_ID,
    HealthResponse,
    Report,
    ScenarioConfig,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(title="scgt", version=__version__)


@app.exception_handler(ScgtError)
async def _scgt_error(request: Request, exc: ScgtError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": [{"type": type(exc).__name__, "msg": str(exc)}]},
    )


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": [{"type": "ValueError", "msg": str(exc)}]},
    )


@app.get("/v1/health", response_model=HealthResponse)
async def health() -> HealthResponse:
    return HealthResponse(
        status="ok",
        version=__version__,
        scenario_schema=SCENARIO_SCHEMA_ID,
        report_schema=REPORT_SCHEMA_ID,
    )


@app.post("/v1/run", response_model=Report)
async def run(config: ScenarioConfig) -> Report:
    return run_scenario(config)


@app.post("/v1/sweep-epsilon", response_model=SweepResponse)
async def sweep_epsilon(request: SweepRequest) -> SweepResponse:
    return run_sweep(request.config, request.epsilons)
