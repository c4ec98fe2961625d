# simulation_api.py

import logging
from typing import Literal, Optional

from fastapi import APIRouter, HTTPException
from pydantic import Field

from configs import simulation_config
from errors import TransportError
from schemas import ProblemConfig, SimReport, WireModel
from sweeps import cmd_simulate
from utils import http_status, problem_from_config, problem_specs

logger = logging.getLogger(__name__)

router = APIRouter()


# ---------------------------------------------------------------------
# POST /simulate → Monte Carlo run checked against the closed form
# ---------------------------------------------------------------------
class SimulateRequest(WireModel):
    problem: Optional[ProblemConfig] = None
    scheme: Literal["coupling", "uncoded", "dim", "optimal-map"]
    samples: int = Field(default=simulation_config.default_samples, ge=1)
    seed: int = Field(default=simulation_config.default_seed, ge=0)
    rate: Optional[float] = None
    power: Optional[float] = None
    keep: Optional[int] = None
    allocation: Literal["cr", "ncr"] = "cr"
    jobs: int = Field(default=1, ge=1)


@router.post("/simulate", response_model=SimReport, tags=["Simulation"])
def simulate(payload: SimulateRequest):
    # Gate failures are reported in the body (distortionPass / marginalPass), not as errors
    try:
        p = problem_from_config(payload.problem)
        specs = problem_specs(payload.problem) if payload.problem is not None else None
        report = cmd_simulate(
            payload.scheme, p, payload.samples, payload.seed,
            rate=payload.rate, power=payload.power, keep=payload.keep,
            allocation=payload.allocation, specs=specs, jobs=payload.jobs,
        )
    except TransportError as e:
        logger.warning("Simulation request failed: %s", e)
        raise HTTPException(status_code=http_status(e), detail=str(e))
    return report
