"""
Configuration file for the constrained Gaussian transport toolkit
"""

import os
import logging
from dotenv import load_dotenv
from dataclasses import dataclass

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


@dataclass
class ToleranceConfig:
    """Numerical tolerances for validating and canonicalizing Gaussian pairs"""
    sym_tol: float = _env_float("GWOT_SYM_TOL", 1e-10)                    # relative
    pd_tol: float = _env_float("GWOT_PD_TOL", 1e-12)                      # absolute
    commute_tol: float = _env_float("GWOT_COMMUTE_TOL", 1e-9)
    ortho_tol: float = _env_float("GWOT_ORTHO_TOL", 1e-9)
    reconstruct_tol: float = _env_float("GWOT_RECONSTRUCT_TOL", 1e-9)
    eig_cluster_tol: float = _env_float("GWOT_EIG_CLUSTER_TOL", 1e-8)     # relative
    rate_tol: float = _env_float("GWOT_RATE_TOL", 1e-9)


@dataclass
class SolverConfig:
    """Root finding and power-split search settings"""
    root_tol: float = _env_float("GWOT_ROOT_TOL", 1e-12)
    width_tol: float = _env_float("GWOT_WIDTH_TOL", 1e-15)                # relative
    max_bisection_iterations: int = _env_int("GWOT_MAX_BISECTION_ITERATIONS", 500)
    delta_tol: float = _env_float("GWOT_DELTA_TOL", 1e-10)
    delta_scan_points: int = _env_int("GWOT_DELTA_SCAN_POINTS", 32)
    delta_tie_tol: float = _env_float("GWOT_DELTA_TIE_TOL", 1e-12)


@dataclass
class SimulationConfig:
    """Monte Carlo settings"""
    min_samples: int = _env_int("GWOT_MIN_SAMPLES", 1000)
    chunk_size: int = _env_int("GWOT_CHUNK_SIZE", 131072)
    ci_multiplier: float = _env_float("GWOT_CI_MULTIPLIER", 3.0)
    marginal_sigmas: float = _env_float("GWOT_MARGINAL_SIGMAS", 5.0)
    abs_tol: float = _env_float("GWOT_SIM_ABS_TOL", 1e-12)
    default_seed: int = _env_int("GWOT_DEFAULT_SEED", 20240611)
    default_samples: int = _env_int("GWOT_DEFAULT_SAMPLES", 1_000_000)
    jobs: int = _env_int("GWOT_JOBS", 1)


@dataclass
class AppConfig:
    """Application configuration"""
    # Output
    significant_digits: int = _env_int("GWOT_SIGNIFICANT_DIGITS", 12)
    table_decimals: int = 3
    table_check_tol: float = 5e-4
    monotone_tol: float = _env_float("GWOT_MONOTONE_TOL", 1e-9)

    # API settings
    api_title: str = "Constrained Gaussian Transport API"
    api_description: str = "Distortion curves and allocations for Gaussian optimal transport under rate, dimension and channel constraints"
    api_version: str = "1.0.0"

    # Logging
    log_level: str = os.getenv("GWOT_LOG_LEVEL", "WARNING")


# Initialize configuration instances
tolerance_config = ToleranceConfig()
solver_config = SolverConfig()
simulation_config = SimulationConfig()
app_config = AppConfig()


# Validation functions
def validate_tolerances():
    """Validate that every tolerance is a positive finite number"""
    bad = [
        name for name, value in vars(tolerance_config).items()
        if not (value > 0.0 and value < 1.0)
    ]
    if solver_config.root_tol <= 0.0 or solver_config.delta_tol <= 0.0:
        bad.append("root_tol/delta_tol")
    if bad:
        raise ValueError(f"Invalid tolerances: {', '.join(bad)}")


def validate_simulation():
    """Validate sampling settings"""
    if simulation_config.chunk_size < 1:
        raise ValueError("GWOT_CHUNK_SIZE must be at least 1")
    if simulation_config.min_samples < 2:
        raise ValueError("GWOT_MIN_SAMPLES must be at least 2")
    if solver_config.delta_scan_points < 3:
        raise ValueError("GWOT_DELTA_SCAN_POINTS must be at least 3")


# Initialize on import
try:
    validate_tolerances()
    validate_simulation()
    logger.info("Configuration loaded successfully")
except Exception as e:
    logger.error(f"Configuration error: {e}")
    raise
