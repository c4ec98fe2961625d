"""
Curve sweeps, allocation tables, summaries and simulation dispatch shared by
the command line and the HTTP API.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from canonical import CanonicalProblem, GaussianSpec
from channel import capacity, d_hybrid, d_lower_envelope, d_separation, d_uncoded, hybrid_threshold
from configs import app_config
from dimension import dim_curve
from errors import CheckFailed, InvalidRange, MonotonicityViolation, SchemeRequiresL2
from schemas import Curve, CurvePoint, SimReport, Spacing, SweepConfig, SweepScheme, TableRow
from shared import REFERENCE_LAMBDA, REFERENCE_LAMBDA_HAT, REFERENCE_TABLE
from simulate import coupling_from_allocation, simulate_coupling, simulate_dim_plan, simulate_optimal_map, simulate_uncoded
from transport_core import d_max, d_min, w2sq
from waterfill import RateAllocation, rate_cr, rate_greedy, rate_no_cr

logger = logging.getLogger(__name__)

TABLE_RATES = (0.1, 2.1, 4.1)
SIMULATION_SCHEMES = ("coupling", "uncoded", "dim", "optimal-map")


# ---------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------
def make_sweep_config(**fields) -> SweepConfig:
    try:
        return SweepConfig.model_validate(fields)
    except ValidationError as e:
        raise InvalidRange(f"Invalid sweep: {e}") from e


def control_values(config: SweepConfig) -> np.ndarray:
    if config.spacing == Spacing.LOG:
        return np.geomspace(config.start, config.stop, config.points)
    return np.linspace(config.start, config.stop, config.points)


def _rate_extras(allocation: RateAllocation, multiplier_name: str) -> Dict[str, float]:
    extras = {f"rate_{i + 1}": float(r) for i, r in enumerate(allocation.rates)}
    extras[multiplier_name] = float(allocation.multiplier)
    return extras


def evaluate_point(p: CanonicalProblem, scheme: SweepScheme, control: float, with_threshold: bool = False) -> CurvePoint:
    """Evaluate one scheme at one control value (R, Gamma or P)"""
    control = float(control)
    extras: Dict[str, float] = {}

    if scheme == SweepScheme.RATE_CR:
        allocation = rate_cr(p, control)
        distortion, extras = allocation.distortion, _rate_extras(allocation, "alpha")
    elif scheme == SweepScheme.RATE_NCR:
        allocation = rate_no_cr(p, control)
        distortion, extras = allocation.distortion, _rate_extras(allocation, "beta")
    elif scheme == SweepScheme.RATE_GREEDY:
        allocation = rate_greedy(p, control)
        distortion = allocation.distortion
        extras = {f"rate_src_{i + 1}": float(r) for i, r in enumerate(allocation.rates)}
        extras.update({f"rate_recon_{i + 1}": float(r) for i, r in enumerate(allocation.recon_rates)})
        extras.update(water_level=allocation.multiplier, water_level_hat=allocation.recon_multiplier)
    elif scheme == SweepScheme.DIM:
        distortion = dim_curve(p, control)
    elif scheme == SweepScheme.CHANNEL_ENVELOPE:
        allocation = rate_cr(p, capacity(control))
        distortion, extras = allocation.distortion, _rate_extras(allocation, "alpha")
    elif scheme == SweepScheme.CHANNEL_SEP:
        allocation = rate_no_cr(p, capacity(control))
        distortion, extras = allocation.distortion, _rate_extras(allocation, "beta")
    elif scheme == SweepScheme.CHANNEL_UNCODED:
        distortion = d_uncoded(p, control)
    elif scheme == SweepScheme.CHANNEL_HYBRID:
        solution = d_hybrid(p, control)
        distortion = solution.total
        extras = {"delta_star": solution.delta_star, "kappa": solution.kappa}
        if solution.beta_at_delta is not None:
            extras["beta"] = solution.beta_at_delta
    else:
        raise InvalidRange(f"Unknown scheme {scheme}")

    if with_threshold:
        if p.dim < 2:
            raise SchemeRequiresL2("Threshold extras need at least two components")
        extras["p_star"] = hybrid_threshold(p)
    return CurvePoint(control=control, distortion=distortion, extras=extras)


def check_monotone(points: Sequence[CurvePoint]) -> None:
    """Raise MonotonicityViolation if distortion increases along the control axis"""
    for prev, cur in zip(points[:-1], points[1:]):
        if cur.distortion > prev.distortion + app_config.monotone_tol * max(abs(prev.distortion), 1.0):
            raise MonotonicityViolation(
                f"Distortion rises from {prev.distortion:.12g} at {prev.control:.6g} "
                f"to {cur.distortion:.12g} at {cur.control:.6g}"
            )


def cmd_curve(config: SweepConfig, p: CanonicalProblem, jobs: int = 1, with_threshold: bool = False) -> Curve:
    """
    Evaluate the selected scheme on every control value of the sweep.

    Points are returned in control order regardless of how many workers ran them.
    """
    if with_threshold and p.dim < 2:
        raise SchemeRequiresL2("Threshold extras need at least two components")
    controls = control_values(config)

    def run(control: float) -> CurvePoint:
        return evaluate_point(p, config.scheme, control, with_threshold)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(run, controls))
    else:
        points = [run(c) for c in controls]

    check_monotone(points)
    logger.info("Evaluated %d points of %s", len(points), config.scheme.value)
    return Curve(scheme=config.scheme, d_min=d_min(p), d_max=d_max(p), points=points)


# ---------------------------------------------------------------------
# Allocation table
# ---------------------------------------------------------------------
def cmd_table(p: CanonicalProblem, rates: Sequence[float] = TABLE_RATES) -> List[TableRow]:
    rows = []
    for rate in rates:
        rows.append(TableRow(
            rate=rate,
            cr_rates=rate_cr(p, rate).rates.tolist(),
            no_cr_rates=rate_no_cr(p, rate).rates.tolist(),
        ))
    return rows


def is_reference_problem(p: CanonicalProblem) -> bool:
    if p.dim != len(REFERENCE_LAMBDA) or p.mean_offset_sq != 0.0:
        return False
    return bool(
        np.allclose(p.lam, REFERENCE_LAMBDA, rtol=0.0, atol=1e-9)
        and np.allclose(p.lam_hat, REFERENCE_LAMBDA_HAT, rtol=0.0, atol=1e-9)
    )


def check_table(rows: Sequence[TableRow]) -> None:
    """
    Compare table rows with the known three-decimal reference allocations.

    Raises:
        CheckFailed: If any entry differs by more than the rounding tolerance
    """
    mismatches = []
    for row in rows:
        if row.rate not in REFERENCE_TABLE:
            continue
        expected_cr, expected_no_cr = REFERENCE_TABLE[row.rate]
        for label, got, expected in (("CR", row.cr_rates, expected_cr), ("NoCR", row.no_cr_rates, expected_no_cr)):
            for i, (g, e) in enumerate(zip(got, expected)):
                if abs(g - e) > app_config.table_check_tol:
                    mismatches.append(f"R={row.rate} {label} R_{i + 1}: got {g:.6f}, expected {e:.3f}")
    if mismatches:
        raise CheckFailed("Allocation table mismatch:\n  " + "\n  ".join(mismatches))


# ---------------------------------------------------------------------
# Summary
# ---------------------------------------------------------------------
def summary(p: CanonicalProblem) -> Dict[str, object]:
    result = {
        "dim": p.dim,
        "lambda": p.lam.tolist(),
        "lambdaHat": p.lam_hat.tolist(),
        "permutation": p.permutation.tolist(),
        "meanOffsetSq": p.mean_offset_sq,
        "w2sq": w2sq(p),
        "dMin": d_min(p),
        "dMax": d_max(p),
    }
    if p.dim >= 2:
        result["pStar"] = hybrid_threshold(p)
    return result


# ---------------------------------------------------------------------
# Simulation dispatch
# ---------------------------------------------------------------------
def cmd_simulate(
    scheme: str,
    p: CanonicalProblem,
    n: int,
    seed: int,
    rate: Optional[float] = None,
    power: Optional[float] = None,
    keep: Optional[int] = None,
    allocation: str = "cr",
    specs: Optional[tuple] = None,
    jobs: Optional[int] = None,
) -> SimReport:
    """
    Dispatch to a simulator.

    Args:
        scheme: coupling | uncoded | dim | optimal-map
        p: Canonical problem
        n: Number of samples
        seed: Master seed
        rate: Total rate for the coupling scheme
        power: Channel power for the uncoded scheme
        keep: Encoder dimension for the dim scheme
        allocation: "cr" or "ncr" rates feeding the coupling
        specs: (source, reconstruction) GaussianSpecs for the optimal-map scheme
        jobs: Worker threads
    """
    if scheme == "coupling":
        if rate is None:
            raise InvalidRange("coupling simulation needs a rate")
        solver = rate_cr if allocation == "cr" else rate_no_cr
        spec = coupling_from_allocation(p, solver(p, rate))
        return simulate_coupling(spec, n, seed, jobs)
    if scheme == "uncoded":
        if power is None:
            raise InvalidRange("uncoded simulation needs a power")
        return simulate_uncoded(p, power, n, seed, jobs)
    if scheme == "dim":
        if keep is None:
            raise InvalidRange("dim simulation needs a dimension")
        return simulate_dim_plan(p, keep, n, seed, jobs)
    if scheme == "optimal-map":
        if specs is None:
            lam, lam_hat = p.basis @ np.diag(p.lam) @ p.basis.T, p.basis @ np.diag(p.lam_hat) @ p.basis.T
            zeros = np.zeros(p.dim)
            specs = (GaussianSpec(mean=zeros, covariance=lam), GaussianSpec(mean=zeros, covariance=lam_hat))
        return simulate_optimal_map(specs[0], specs[1], n, seed, jobs)
    raise InvalidRange(f"Unknown simulation scheme {scheme!r}; expected one of {', '.join(SIMULATION_SCHEMES)}")
