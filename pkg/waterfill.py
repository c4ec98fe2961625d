"""
Rate allocation for rate-constrained Gaussian transport.

Rates are in bits per symbol. Four allocations are provided:

    CR         common randomness: R_l = 1/2 log((1 + sqrt(1 + alpha p_l)) / 2)
    NoCR       no common randomness: R_l = 1/2 log+(sqrt(p_l) / beta)
    Classical  reverse waterfilling on a single spectrum: R_l = 1/2 log+(lambda_l / rho)
    Greedy     classical waterfilling run separately on both spectra

where p_l = lambda_l * lambda_hat_l. All multipliers are found by bisection.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from canonical import CanonicalProblem
from configs import solver_config, tolerance_config
from errors import BracketDoesNotStraddle, NegativeRate
from transport_core import d_max

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


class Scheme(str, Enum):
    CR = "CR"
    NO_CR = "NoCR"
    GREEDY = "Greedy"
    CLASSICAL = "Classical"


@dataclass(frozen=True)
class RateAllocation:
    """
    Per-component rates with their multiplier and resulting distortion.

    For the greedy scheme `rates` are the source-side rates R'_l, `recon_rates`
    the reconstruction-side rates and `recon_multiplier` the second water level.
    """
    rates: np.ndarray
    multiplier: float
    total_rate: float
    distortion: float
    scheme: Scheme
    recon_rates: Optional[np.ndarray] = None
    recon_multiplier: Optional[float] = None
    component_distortions: Optional[np.ndarray] = None


# Root finding
def solve_monotone_root(
    f: Callable[[float], float],
    target: float,
    bracket: Tuple[float, float],
    root_tol: float = None,
    width_tol: float = None,
) -> float:
    """
    Bisection for f(x) = target on a bracket where f is continuous and monotone.

    Args:
        f: Monotone function (increasing or decreasing)
        target: Value to hit
        bracket: (lo, hi) interval with f(lo) - target and f(hi) - target of opposite sign
        root_tol: Stop when |f(x) - target| <= root_tol (default from solver_config)
        width_tol: Stop when the bracket is narrower than width_tol relative to its magnitude

    Returns:
        Approximate root x

    Raises:
        BracketDoesNotStraddle: If the target lies outside f(bracket)
    """
    root_tol = solver_config.root_tol if root_tol is None else root_tol
    width_tol = solver_config.width_tol if width_tol is None else width_tol
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo

    f_lo = f(lo) - target
    if abs(f_lo) <= root_tol:
        return lo
    f_hi = f(hi) - target
    if abs(f_hi) <= root_tol:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketDoesNotStraddle(
            f"f({lo:.6g}) - target = {f_lo:.3e} and f({hi:.6g}) - target = {f_hi:.3e} have the same sign"
        )

    mid = 0.5 * (lo + hi)
    for iteration in range(solver_config.max_bisection_iterations):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid) - target
        if abs(f_mid) <= root_tol:
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= width_tol * max(abs(lo), abs(hi), 1.0) or not (lo < 0.5 * (lo + hi) < hi):
            mid = 0.5 * (lo + hi)
            break
    else:
        logger.warning("Bisection hit the iteration cap (%d)", solver_config.max_bisection_iterations)
    logger.debug("Bisection finished after %d iterations at x=%.17g", iteration + 1, mid)
    return mid


def water_level(values: Sequence[float], rate: float) -> Tuple[float, np.ndarray]:
    """
    Reverse waterfilling kernel.

    Finds the level beta in (0, max(values)] with 1/2 sum log+(v_l / beta) = rate.
    The search runs on log2(beta) over [log2(v_max) - 2 rate - 4, log2(v_max)].

    Args:
        values: Positive per-component significances
        rate: Total rate in bits

    Returns:
        (beta, rates) with rates_l = 1/2 log+(v_l / beta)
    """
    values = np.asarray(values, dtype=float)
    log_values = np.log2(values)
    top = float(np.max(log_values))
    if rate == 0.0:
        return float(2.0 ** top), np.zeros_like(values)

    def rate_sum(t: float) -> float:
        return 0.5 * float(np.sum(np.maximum(log_values - t, 0.0)))

    t = solve_monotone_root(rate_sum, rate, (top - 2.0 * rate - 4.0, top))
    rates = 0.5 * np.maximum(log_values - t, 0.0)
    return float(2.0 ** t), rates


def _check_rate(R: float) -> float:
    R = float(R)
    if not R >= 0.0 or math.isinf(R):
        raise NegativeRate(f"Rate must be a finite nonnegative number, got {R}")
    return R


def _check_total(rates: np.ndarray, R: float, scheme: "Scheme") -> None:
    gap = abs(float(np.sum(rates)) - R)
    if gap > tolerance_config.rate_tol:
        logger.warning("%s rates sum to %.12g for R=%.12g (gap %.3e)", scheme.value, float(np.sum(rates)), R, gap)


def _one_minus_pow(rates: np.ndarray) -> np.ndarray:
    # 1 - 2^(-2R), accurate for small R
    return -np.expm1(-2.0 * LN2 * rates)


# Common randomness
_LOG_X_SPLIT = 60.0


def _cr_rates(log_alpha: float, log_products: np.ndarray) -> np.ndarray:
    # u = log2(alpha p); below the split (1 + sqrt(1 + x)) / 2 = 1 + x / (2 (sqrt(1 + x) + 1))
    u = log_alpha + log_products
    x = np.exp2(np.minimum(u, _LOG_X_SPLIT))
    near = 0.5 * np.log1p(x / (2.0 * (np.sqrt(1.0 + x) + 1.0))) / LN2
    # above it (1 + sqrt(1 + x)) / 2 = sqrt(x) / 2 * (1 + x^(-1/2)) to double precision
    far_u = np.maximum(u, _LOG_X_SPLIT)
    far = 0.25 * far_u - 0.5 + 0.5 * np.log1p(np.exp2(-0.5 * far_u)) / LN2
    return np.where(u < _LOG_X_SPLIT, near, far)


def cr_distortion(p: CanonicalProblem, rates: np.ndarray) -> float:
    rho_sq = _one_minus_pow(np.asarray(rates, dtype=float))
    return float(p.mean_offset_sq + np.sum(p.independent_terms - 2.0 * np.sqrt(rho_sq * p.products)))


def rate_cr(p: CanonicalProblem, R: float) -> RateAllocation:
    """
    Optimal allocation with common randomness.

    The search runs on t = log2(alpha). Every component rate lies between
    u/4 - 1/2 and x / (8 ln 2) with x = alpha p_l and u = log2(x), which gives
    a bracket that straddles R for any finite rate.

    Args:
        p: Canonical problem
        R: Total rate in bits per symbol

    Returns:
        RateAllocation with multiplier alpha (inf once alpha leaves the float range)

    Raises:
        NegativeRate: If R is negative or not finite
    """
    R = _check_rate(R)
    if R == 0.0:
        return RateAllocation(
            rates=np.zeros(p.dim), multiplier=0.0, total_rate=0.0, distortion=d_max(p), scheme=Scheme.CR
        )

    log_products = np.log2(p.products)

    def rate_sum(t: float) -> float:
        return float(np.sum(_cr_rates(t, log_products)))

    t_lo = math.log2(R) - float(np.max(log_products)) - math.log2(p.dim) - 1.0
    t_hi = 4.0 * (R / p.dim + 1.5) - float(np.min(log_products))
    logger.debug("CR bracket for R=%.6g is log2(alpha) in [%.6g, %.6g]", R, t_lo, t_hi)

    t = solve_monotone_root(rate_sum, R, (t_lo, t_hi))
    rates = _cr_rates(t, log_products)
    _check_total(rates, R, Scheme.CR)
    with np.errstate(over="ignore"):
        alpha = float(np.exp2(t))
    return RateAllocation(
        rates=rates,
        multiplier=alpha,
        total_rate=R,
        distortion=cr_distortion(p, rates),
        scheme=Scheme.CR,
    )


# No common randomness
def no_cr_distortion(p: CanonicalProblem, rates: np.ndarray) -> float:
    gain = _one_minus_pow(np.asarray(rates, dtype=float))
    return float(p.mean_offset_sq + np.sum(p.independent_terms - 2.0 * gain * p.sqrt_products))


def rate_no_cr(p: CanonicalProblem, R: float) -> RateAllocation:
    """
    Optimal allocation without common randomness.

    Args:
        p: Canonical problem
        R: Total rate in bits per symbol

    Returns:
        RateAllocation with multiplier beta in (0, sqrt(lambda_1 lambda_hat_1)]

    Raises:
        NegativeRate: If R is negative or not finite
    """
    R = _check_rate(R)
    beta, rates = water_level(p.sqrt_products, R)
    _check_total(rates, R, Scheme.NO_CR)
    return RateAllocation(
        rates=rates,
        multiplier=beta,
        total_rate=R,
        distortion=no_cr_distortion(p, rates),
        scheme=Scheme.NO_CR,
    )


# Classical reverse waterfilling and the greedy baseline
def classical_reverse_waterfill(eigs: Sequence[float], R: float) -> RateAllocation:
    """
    Classical reverse waterfilling for a Gaussian source with eigenvalues eigs.

    Returns:
        RateAllocation with water level rho, per-component distortions 2^(-2R_l) lambda_l
        and their sum as distortion
    """
    R = _check_rate(R)
    eigs = np.asarray(eigs, dtype=float)
    rho, rates = water_level(eigs, R)
    components = np.exp2(-2.0 * rates) * eigs
    return RateAllocation(
        rates=rates,
        multiplier=rho,
        total_rate=R,
        distortion=float(np.sum(components)),
        scheme=Scheme.CLASSICAL,
        component_distortions=components,
    )


def rate_greedy(p: CanonicalProblem, R: float) -> RateAllocation:
    """Quantize each side by classical reverse waterfilling, then transport between the quantized spectra"""
    source = classical_reverse_waterfill(p.lam, R)
    recon = classical_reverse_waterfill(p.lam_hat, R)
    gain = np.sqrt(_one_minus_pow(source.rates) * _one_minus_pow(recon.rates) * p.products)
    distortion = float(p.mean_offset_sq + np.sum(p.independent_terms - 2.0 * gain))
    return RateAllocation(
        rates=source.rates,
        multiplier=source.multiplier,
        total_rate=source.total_rate,
        distortion=distortion,
        scheme=Scheme.GREEDY,
        recon_rates=recon.rates,
        recon_multiplier=recon.multiplier,
    )


def solve_allocation(p: CanonicalProblem, R: float, scheme: Scheme) -> RateAllocation:
    if scheme == Scheme.CR:
        return rate_cr(p, R)
    if scheme == Scheme.NO_CR:
        return rate_no_cr(p, R)
    if scheme == Scheme.GREEDY:
        return rate_greedy(p, R)
    raise ValueError(f"Scheme {scheme} needs a single spectrum; use classical_reverse_waterfill")


# Stationarity checks
def kkt_residual(allocation: RateAllocation, p: CanonicalProblem) -> float:
    """
    Relative spread of the stationarity quantity across components.

    CR: (2 ln 2) 2^(-2R_l) / sqrt(1 - 2^(-2R_l)) sqrt(p_l) equal for all l.
    NoCR: 2^(-2R_l) sqrt(p_l) equal to beta on active components.
    """
    rates = allocation.rates
    if allocation.scheme == Scheme.CR:
        if np.any(rates <= 0.0):
            return 0.0
        marginal = 2.0 * LN2 * np.exp2(-2.0 * rates) / np.sqrt(_one_minus_pow(rates)) * p.sqrt_products
        return float((np.max(marginal) - np.min(marginal)) / np.mean(marginal))
    if allocation.scheme == Scheme.NO_CR:
        active = rates > 0.0
        if not np.any(active):
            return 0.0
        level = np.exp2(-2.0 * rates[active]) * p.sqrt_products[active]
        return float(np.max(np.abs(level - allocation.multiplier)) / allocation.multiplier)
    raise ValueError(f"No stationarity condition for scheme {allocation.scheme}")
