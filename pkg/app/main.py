from __future__ import annotations

import logging
import os
import uuid
from typing import Any, Dict

from fastapi import FastAPI, HTTPException
from pydantic import ValidationError

from app.cli import solve_command
from app.config import RUNS_DIR, TrackerConfig
from app.errors import InvalidArgumentError, ParseError
from app.schemas import SolveRequest, SolveResponse
from app.solution_store import load_solution, load_system, save_run
from app.tracker import NUMERIC_ERRORS

logger = logging.getLogger(__name__)

app = FastAPI(title="padetrack (homotopy continuation service)")


def _runs_dir() -> str:
    return os.getenv("RUNS_DIR", RUNS_DIR)


def _valid_run_id(run_id: str) -> bool:
    try:
        uuid.UUID(run_id)
    except ValueError:
        return False
    return True


@app.get("/health")
def health():
    return {"ok": True}


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    try:
        cfg = TrackerConfig(**req.config)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=f"Invalid tracker config: {e.errors()[0]['msg']}")

    run_id = str(uuid.uuid4())
    logger.info(f"run_id={run_id}: {len(req.system.variables)} variables, workers={req.workers}")
    try:
        solution = solve_command(req.system, cfg, req.seed, req.workers)
    except (ParseError, InvalidArgumentError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except NUMERIC_ERRORS as e:
        logger.warning(f"run_id={run_id}: numerical failure: {e}")
        raise HTTPException(status_code=422, detail=f"Numerical failure: {e}")

    save_run(_runs_dir(), run_id, req.system.model_dump(mode="json"), solution.model_dump(mode="json"))
    logger.info(f"run_id={run_id}: summary={solution.summary}")
    return SolveResponse(run_id=run_id, solution=solution)


@app.get("/runs/{run_id}")
def get_run(run_id: str) -> Dict[str, Any]:
    solution = load_solution(_runs_dir(), run_id) if _valid_run_id(run_id) else None
    if solution is None:
        raise HTTPException(status_code=404, detail="Run not found")
    return {"run_id": run_id, "solution": solution}


@app.get("/runs/{run_id}/system")
def get_run_system(run_id: str) -> Dict[str, Any]:
    system = load_system(_runs_dir(), run_id) if _valid_run_id(run_id) else None
    if system is None:
        raise HTTPException(status_code=404, detail="Run not found")
    return system
