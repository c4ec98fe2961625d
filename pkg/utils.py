"""
Utility functions for loading problems and emitting results
"""

import os
import sys
import logging
from typing import Any, List, Optional, Tuple

import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError

from canonical import CanonicalProblem, GaussianSpec, canonicalize
from configs import app_config
from errors import InvalidProblemConfig, TransportError
from schemas import CurvePoint, ProblemConfig, TableRow
from shared import reference_problem

logger = logging.getLogger(__name__)


# Logging Functions
def configure_logging(level: Optional[str] = None) -> None:
    """
    Send log records to stderr so stdout stays reserved for CSV/JSON output

    Args:
        level: Logging level name (default from app_config)
    """
    logging.basicConfig(
        stream=sys.stderr,
        level=(level or app_config.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


# Problem Loading Functions
def parse_problem_config(data: Any) -> ProblemConfig:
    """
    Validate a problem description

    Args:
        data: Decoded JSON object

    Returns:
        ProblemConfig

    Raises:
        InvalidProblemConfig: If the object matches none of the accepted forms
    """
    try:
        return ProblemConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidProblemConfig(f"Invalid problem config: {e}") from e


def load_problem_config(path: str) -> ProblemConfig:
    """
    Read and validate a problem JSON file

    Args:
        path: Path to the JSON file

    Returns:
        ProblemConfig

    Raises:
        InvalidProblemConfig: If the file is missing, not JSON, or malformed
    """
    try:
        with open(path, "rb") as problem_file:
            data = orjson.loads(problem_file.read())
    except (OSError, orjson.JSONDecodeError) as e:
        raise InvalidProblemConfig(f"Could not read problem file {path}: {e}") from e
    return parse_problem_config(data)


def problem_specs(config: ProblemConfig) -> Tuple[GaussianSpec, GaussianSpec]:
    """Turn a problem config into the source and reconstruction Gaussians"""
    if config.lam is not None:
        return GaussianSpec.diagonal(config.lam), GaussianSpec.diagonal(config.lam_hat)

    if config.cov_a is not None:
        pairs = ((config.mean_a, config.cov_a), (config.mean_b, config.cov_b))
    else:
        pairs = ((config.source.mean, config.source.cov), (config.reconstruction.mean, config.reconstruction.cov))

    specs = []
    for mean, cov in pairs:
        cov = np.asarray(cov, dtype=float)
        if mean is None:
            mean = np.zeros(cov.shape[0] if cov.ndim == 2 else 0)
        specs.append(GaussianSpec(mean=np.asarray(mean, dtype=float), covariance=cov))
    return specs[0], specs[1]


def load_problem(path: Optional[str] = None) -> CanonicalProblem:
    """
    Load and canonicalize a problem file, falling back to the reference configuration

    Args:
        path: Path to the JSON problem file, or None

    Returns:
        CanonicalProblem
    """
    if path is None:
        return reference_problem
    return problem_from_config(load_problem_config(path))


def problem_from_config(config: Optional[ProblemConfig] = None) -> CanonicalProblem:
    """Canonicalize an already-validated problem config; None means the reference configuration"""
    if config is None:
        return reference_problem
    return canonicalize(*problem_specs(config))


# HTTP Functions
def http_status(error: TransportError) -> int:
    """400 for bad input, 422 for a failed check or gate"""
    return 422 if error.exit_code == 2 else 400


# Output Formatting Functions
def dumps_json(payload: Any) -> str:
    """Serialize to stable, indented JSON (sorted keys, numpy arrays supported)"""
    options = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
    return orjson.dumps(payload, option=options).decode() + "\n"


def curve_frame(points: List[CurvePoint]) -> pd.DataFrame:
    """Flatten curve points into a frame: control, distortion, then extras in first-seen order"""
    rows = [{"control": pt.control, "distortion": pt.distortion, **pt.extras} for pt in points]
    frame = pd.DataFrame(rows)
    if frame.empty:
        frame = pd.DataFrame(columns=["control", "distortion"])
    return frame


def curve_to_csv(points: List[CurvePoint]) -> str:
    """
    Format curve points as CSV with a header row and 12 significant digits

    Args:
        points: Curve points in control order

    Returns:
        CSV text
    """
    float_format = f"%.{app_config.significant_digits}g"
    return curve_frame(points).to_csv(index=False, float_format=float_format, lineterminator="\n")


def format_table(rows: List[TableRow]) -> str:
    """
    Format CR / NoCR allocations as a fixed-width text table

    Args:
        rows: One row per total rate

    Returns:
        Formatted table string
    """
    decimals = app_config.table_decimals
    dim = len(rows[0].cr_rates) if rows else 0
    columns = {}
    for row in rows:
        header = f"R={row.rate:g}"
        columns[header] = [round(r, decimals) for r in row.cr_rates] + [round(r, decimals) for r in row.no_cr_rates]
    index = [f"CR R_{i + 1}" for i in range(dim)] + [f"NoCR R_{i + 1}" for i in range(dim)]
    frame = pd.DataFrame(columns, index=index)
    return frame.to_string(float_format=lambda v: f"{v:.{decimals}f}") + "\n"


# File Handling Functions
def write_output(text: str, path: Optional[str] = None) -> None:
    """
    Write text to a file, or to stdout when no path is given

    Args:
        text: Content to write
        path: Destination file (parent directories are created)
    """
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as out_file:
        out_file.write(text)
    logger.info("Wrote %s", path)
