"""
Channel-constrained transport through a unit-variance AWGN channel.

    d_lower_envelope   separation with common randomness, D_r(1/2 log(1 + P))
    d_separation       separation without common randomness
    d_uncoded          analog transmission of the most significant component
    d_hybrid           analog first component superposed on a digital remainder,
                       optimized over the digital power fraction delta
    hybrid_threshold   power P* below which the hybrid scheme is purely analog
"""

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from canonical import CanonicalProblem
from configs import solver_config
from errors import NegativePower, RequiresAtLeastTwoComponents
from waterfill import rate_cr, rate_no_cr, water_level

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class HybridSolution:
    """
    Optimized hybrid scheme.

    analog_distortion and digital_distortion are the (negative) gains of the two
    branches; total = analog + digital + sum(lambda + lambda_hat) + mean offset.
    beta_at_delta is None when L = 1 (no digital components exist).
    """
    delta_star: float
    beta_at_delta: Optional[float]
    analog_distortion: float
    digital_distortion: float
    total: float
    kappa: int


def _check_power(P: float) -> float:
    P = float(P)
    if not P >= 0.0 or math.isinf(P):
        raise NegativePower(f"Power must be a finite nonnegative number, got {P}")
    return P


def capacity(P: float) -> float:
    """AWGN(1) capacity in bits per channel use"""
    return 0.5 * math.log1p(_check_power(P)) / math.log(2.0)


def d_lower_envelope(p: CanonicalProblem, P: float) -> float:
    """Minimum distortion with common randomness (separation is optimal there)"""
    return rate_cr(p, capacity(P)).distortion


def d_separation(p: CanonicalProblem, P: float) -> float:
    """Separation-based scheme without common randomness"""
    return rate_no_cr(p, capacity(P)).distortion


def _analog_gain(p1: float, analog_power: float) -> float:
    return math.sqrt(analog_power / (analog_power + 1.0) * p1)


def d_uncoded(p: CanonicalProblem, P: float) -> float:
    """Uncoded scheme; optimal among linear encoders"""
    P = _check_power(P)
    return float(p.mean_offset_sq + np.sum(p.independent_terms) - 2.0 * _analog_gain(float(p.products[0]), P))


def hybrid_threshold(p: CanonicalProblem) -> float:
    """
    Power threshold P* = (-1 + sqrt(1 + p_1 / p_2)) / 2.

    Raises:
        RequiresAtLeastTwoComponents: If L < 2
    """
    if p.dim < 2:
        raise RequiresAtLeastTwoComponents("Hybrid threshold needs at least two components")
    ratio = float(p.products[0] / p.products[1])
    return (-1.0 + math.sqrt(1.0 + ratio)) / 2.0


def threshold_slope(p: CanonicalProblem, P: float) -> float:
    """Upper bound on d(f1 + f2)/d delta at delta = 0; negative below P*, positive above"""
    if p.dim < 2:
        raise RequiresAtLeastTwoComponents("Threshold slope needs at least two components")
    P = _check_power(P)
    p1, p2 = float(p.products[0]), float(p.products[1])
    return -0.5 * math.sqrt(P / (P + 1.0) ** 3 * p1) + P / (P + 1.0) * math.sqrt(p2)


def effective_rate(P: float, delta: float) -> float:
    """Digital rate when a fraction delta of the power carries the digital branch"""
    return 0.5 * math.log2((P + 1.0) / ((1.0 - delta) * P + 1.0))


class _HybridObjective:
    """
    Closed-form hybrid objective.

    Digital component j (0-based over l >= 2) becomes active once the effective rate
    exceeds thresholds[j] = 1/2 sum_{i<j} log2(d_i / d_j); within a fixed active
    count kappa, beta = (prod_{i<kappa} d_i * 2^(-2 R_eff))^(1 / kappa).
    """

    def __init__(self, p: CanonicalProblem, P: float):
        self.P = P
        self.p1 = float(p.products[0])
        self.offset = float(p.mean_offset_sq + np.sum(p.independent_terms))
        digital = p.sqrt_products[1:]
        log_digital = np.log2(digital)
        self.cum_log = np.cumsum(log_digital).tolist()
        self.cum_values = np.cumsum(digital).tolist()
        self.thresholds = [
            0.5 * (float(np.sum(log_digital[:j])) - j * float(log_digital[j]))
            for j in range(digital.shape[0])
        ]

    def breakpoints(self) -> List[float]:
        """delta values in (0, 1) where the active digital count changes"""
        P = self.P
        points = set()
        for rate in self.thresholds[1:]:
            delta = 1.0 - ((P + 1.0) * 2.0 ** (-2.0 * rate) - 1.0) / P
            if 0.0 < delta < 1.0:
                points.add(delta)
        return sorted(points)

    def __call__(self, delta: float) -> float:
        analog_power = (1.0 - delta) * self.P
        gain = _analog_gain(self.p1, analog_power)
        rate = effective_rate(self.P, delta)
        kappa = bisect.bisect_left(self.thresholds, rate)
        if kappa > 0 and rate > 0.0:
            log_beta = (self.cum_log[kappa - 1] - 2.0 * rate) / kappa
            gain += self.cum_values[kappa - 1] - kappa * 2.0 ** log_beta
        return self.offset - 2.0 * gain


def golden_section(obj: Callable[[float], float], a: float, b: float, tol: float = None) -> Tuple[float, float]:
    """
    Golden section search for a minimum of obj on [a, b].

    Returns:
        (x, obj(x)) at the midpoint of the final bracket
    """
    tol = solver_config.delta_tol if tol is None else tol
    dist = b - a
    if dist <= tol:
        x = 0.5 * (a + b)
        return x, obj(x)

    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc, yd = obj(c), obj(d)
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            dist *= INV_PHI
            c = a + INV_PHI_SQ * dist
            yc = obj(c)
        else:
            a, c, yc = c, d, yd
            dist *= INV_PHI
            d = a + INV_PHI * dist
            yd = obj(d)
    x = 0.5 * (a + d) if yc < yd else 0.5 * (c + b)
    return x, obj(x)


def kappa_breakpoints(p: CanonicalProblem, P: float) -> List[float]:
    """Sorted delta values in (0, 1) where the number of active digital components changes"""
    P = _check_power(P)
    if p.dim < 2 or P == 0.0:
        return []
    return _HybridObjective(p, P).breakpoints()


def _minimize_delta(objective: _HybridObjective) -> float:
    edges = [0.0] + objective.breakpoints() + [1.0]
    zero_value = objective(0.0)
    best_delta, best_value = 0.0, zero_value
    points = solver_config.delta_scan_points

    for a, b in zip(edges[:-1], edges[1:]):
        grid = np.linspace(a, b, points)
        values = [objective(float(x)) for x in grid]
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_delta, best_value = float(grid[i]), values[i]
        lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, points - 1)])
        x, value = golden_section(objective, lo, hi)
        if value < best_value:
            best_delta, best_value = x, value

    # prefer the purely analog split when it is optimal up to rounding
    scale = max(abs(zero_value), 1.0)
    if zero_value <= best_value + solver_config.delta_tie_tol * scale:
        return 0.0
    return best_delta


def d_hybrid(p: CanonicalProblem, P: float) -> HybridSolution:
    """
    Optimized hybrid analog/digital scheme.

    Args:
        p: Canonical problem
        P: Channel input power

    Returns:
        HybridSolution at the optimal digital power fraction delta*

    Raises:
        NegativePower: If P is negative or not finite
    """
    P = _check_power(P)
    offset = float(p.mean_offset_sq + np.sum(p.independent_terms))
    p1 = float(p.products[0])

    if p.dim == 1 or P == 0.0:
        analog = -2.0 * _analog_gain(p1, P)
        beta = float(p.sqrt_products[1]) if p.dim > 1 else None
        return HybridSolution(
            delta_star=0.0, beta_at_delta=beta, analog_distortion=analog,
            digital_distortion=0.0, total=offset + analog, kappa=0,
        )

    delta = _minimize_delta(_HybridObjective(p, P))
    digital = p.sqrt_products[1:]
    beta, _ = water_level(digital, effective_rate(P, delta))
    analog = -2.0 * _analog_gain(p1, (1.0 - delta) * P)
    digital_term = -2.0 * float(np.sum(np.maximum(digital - beta, 0.0)))
    kappa = int(np.sum(digital > beta))
    logger.debug("Hybrid P=%.6g: delta*=%.10f kappa=%d beta=%.6g", P, delta, kappa, beta)
    return HybridSolution(
        delta_star=delta,
        beta_at_delta=beta,
        analog_distortion=analog,
        digital_distortion=digital_term,
        total=offset + analog + digital_term,
        kappa=kappa,
    )
