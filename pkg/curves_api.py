# curves_api.py

import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import Field

from errors import TransportError
from schemas import Curve, ProblemConfig, SweepConfig, TableRow, WireModel
from sweeps import check_table, cmd_curve, cmd_table, is_reference_problem, summary
from utils import http_status, problem_from_config

logger = logging.getLogger(__name__)

router = APIRouter()


# ---------------------------------------------------------------------
# POST /curve → sweep one scheme over its control axis
# ---------------------------------------------------------------------
class CurveRequest(WireModel):
    problem: Optional[ProblemConfig] = None
    sweep: SweepConfig
    threshold: bool = False
    jobs: int = Field(default=1, ge=1)


@router.post("/curve", response_model=Curve, tags=["Curves"])
def curve(payload: CurveRequest):
    try:
        p = problem_from_config(payload.problem)
        return cmd_curve(payload.sweep, p, jobs=payload.jobs, with_threshold=payload.threshold)
    except TransportError as e:
        logger.warning("Curve request failed: %s", e)
        raise HTTPException(status_code=http_status(e), detail=str(e))


# ---------------------------------------------------------------------
# POST /table → CR and NoCR allocations at R = 0.1, 2.1, 4.1
# ---------------------------------------------------------------------
class TableRequest(WireModel):
    problem: Optional[ProblemConfig] = None
    rates: List[float] = Field(default_factory=lambda: [0.1, 2.1, 4.1])
    check: bool = False


@router.post("/table", response_model=List[TableRow], tags=["Curves"])
def table(payload: TableRequest):
    try:
        p = problem_from_config(payload.problem)
        rows = cmd_table(p, payload.rates)
        if payload.check:
            if is_reference_problem(p):
                check_table(rows)
            else:
                logger.warning("Table check only applies to the reference configuration; skipped")
        return rows
    except TransportError as e:
        raise HTTPException(status_code=http_status(e), detail=str(e))


# ---------------------------------------------------------------------
# POST /summary → canonical eigenpairs and envelopes
# ---------------------------------------------------------------------
class SummaryRequest(WireModel):
    problem: Optional[ProblemConfig] = None


@router.post("/summary", tags=["Curves"])
def problem_summary(payload: SummaryRequest):
    try:
        return summary(problem_from_config(payload.problem))
    except TransportError as e:
        raise HTTPException(status_code=http_status(e), detail=str(e))
