"""
Wire models for problem files, sweeps, curve points, tables and simulation reports.

All models serialize with camelCase aliases; their JSON schemas are printed by
`python cli.py schema <name>`.
"""

from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic.alias_generators import to_camel


class WireModel(BaseModel):
    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)


# ---------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------
class GaussianConfig(WireModel):
    mean: Optional[List[float]] = None
    cov: List[List[float]]


class ProblemConfig(WireModel):
    """
    One of three equivalent forms:

        {"lambda": [...], "lambdaHat": [...]}
        {"meanA": [...], "covA": [[...]], "meanB": [...], "covB": [[...]]}
        {"source": {"mean": [...], "cov": [[...]]}, "reconstruction": {...}}
    """
    lam: Optional[List[float]] = Field(default=None, alias="lambda")
    lam_hat: Optional[List[float]] = Field(default=None, alias="lambdaHat")
    mean_a: Optional[List[float]] = None
    cov_a: Optional[List[List[float]]] = None
    mean_b: Optional[List[float]] = None
    cov_b: Optional[List[List[float]]] = None
    source: Optional[GaussianConfig] = None
    reconstruction: Optional[GaussianConfig] = None

    @model_validator(mode="after")
    def check_single_form(self):
        forms = [
            self.lam is not None or self.lam_hat is not None,
            self.cov_a is not None or self.cov_b is not None,
            self.source is not None or self.reconstruction is not None,
        ]
        if sum(forms) != 1:
            raise ValueError("Problem must use exactly one of the eigenvalue, covA/covB or source/reconstruction forms")
        if forms[0] and (self.lam is None or self.lam_hat is None):
            raise ValueError("Both lambda and lambdaHat are required")
        if forms[1] and (self.cov_a is None or self.cov_b is None):
            raise ValueError("Both covA and covB are required")
        if forms[2] and (self.source is None or self.reconstruction is None):
            raise ValueError("Both source and reconstruction are required")
        return self


# ---------------------------------------------------------------------
# Sweeps and curves
# ---------------------------------------------------------------------
class SweepScheme(str, Enum):
    RATE_CR = "rate-cr"
    RATE_NCR = "rate-ncr"
    RATE_GREEDY = "rate-greedy"
    DIM = "dim"
    CHANNEL_ENVELOPE = "channel-envelope"
    CHANNEL_SEP = "channel-sep"
    CHANNEL_UNCODED = "channel-uncoded"
    CHANNEL_HYBRID = "channel-hybrid"


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class SweepConfig(WireModel):
    scheme: SweepScheme
    start: float
    stop: float
    points: int = Field(ge=2)
    spacing: Spacing = Spacing.LINEAR

    @model_validator(mode="after")
    def check_range(self):
        if not self.start < self.stop:
            raise ValueError(f"start ({self.start}) must be below stop ({self.stop})")
        if self.spacing == Spacing.LOG and self.start <= 0.0:
            raise ValueError("log spacing requires start > 0")
        if self.start < 0.0:
            raise ValueError("control values must be nonnegative")
        return self


class CurvePoint(WireModel):
    control: float
    distortion: float
    extras: Dict[str, Union[int, float]] = Field(default_factory=dict)


class Curve(WireModel):
    scheme: SweepScheme
    d_min: float
    d_max: float
    points: List[CurvePoint]


# ---------------------------------------------------------------------
# Allocation table
# ---------------------------------------------------------------------
class TableRow(WireModel):
    rate: float
    cr_rates: List[float]
    no_cr_rates: List[float]


# ---------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------
class SimReport(WireModel):
    scheme: str
    samples: int
    seed: int
    empirical_distortion: float
    theoretical_distortion: float
    stderr: float
    empirical_recon_cov: List[List[float]]
    max_marginal_deviation: float
    distortion_pass: bool
    marginal_pass: bool

    @property
    def passed(self) -> bool:
        return self.distortion_pass and self.marginal_pass


SCHEMAS = {
    "problem": ProblemConfig,
    "sweep": SweepConfig,
    "curve-point": CurvePoint,
    "curve": Curve,
    "table-row": TableRow,
    "sim-report": SimReport,
}
