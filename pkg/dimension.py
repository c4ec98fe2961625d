"""
Dimension-constrained transport: the select-scale-generate plan for a K-dimensional
linear encoder and the asymptotic distortion curve D_d(Gamma).
"""

import math
import numbers
from dataclasses import dataclass

import numpy as np

from canonical import CanonicalProblem
from errors import NegativeDimension, NonIntegerDimension


@dataclass(frozen=True)
class DimReductionPlan:
    """Keep the first `keep` canonical components (scaled), generate the rest from scratch"""
    keep: int
    gains: np.ndarray
    generated_variances: np.ndarray
    distortion: float


def _distortion_with_kept(p: CanonicalProblem, keep: int) -> float:
    terms = np.where(np.arange(p.dim) < keep, p.transport_terms, p.independent_terms)
    return float(p.mean_offset_sq + np.sum(terms))


def one_shot_plan(p: CanonicalProblem, K: int) -> DimReductionPlan:
    """
    Optimal one-shot plan under a K-dimensional linear encoder.

    Args:
        p: Canonical problem
        K: Encoder output dimension

    Returns:
        DimReductionPlan retaining min(K, L) components in product order

    Raises:
        NonIntegerDimension: If K is not an integer
        NegativeDimension: If K < 0
    """
    if isinstance(K, bool) or not isinstance(K, numbers.Integral):
        raise NonIntegerDimension(f"One-shot dimension must be an integer, got {K!r}")
    if K < 0:
        raise NegativeDimension(f"Dimension must be nonnegative, got {K}")
    keep = min(int(K), p.dim)
    return DimReductionPlan(
        keep=keep,
        gains=np.sqrt(p.lam_hat[:keep] / p.lam[:keep]),
        generated_variances=p.lam_hat[keep:].copy(),
        distortion=_distortion_with_kept(p, keep),
    )


def dim_curve(p: CanonicalProblem, gamma: float) -> float:
    """
    Asymptotic distortion D_d(Gamma) under a normalized dimension budget Gamma.

    Fractional budgets time-share between floor(Gamma) and ceil(Gamma) retained
    components; the curve is constant for Gamma >= L.
    """
    gamma = float(gamma)
    if not gamma >= 0.0:
        raise NegativeDimension(f"Dimension must be nonnegative, got {gamma}")
    if gamma >= p.dim:
        return _distortion_with_kept(p, p.dim)

    whole = int(math.floor(gamma))
    frac = gamma - whole
    if frac == 0.0:
        return _distortion_with_kept(p, whole)

    # component `whole` (0-based) is kept a fraction `frac` of the time
    terms = np.where(np.arange(p.dim) < whole, p.transport_terms, p.independent_terms)
    terms[whole] = frac * p.transport_terms[whole] + (1.0 - frac) * p.independent_terms[whole]
    return float(p.mean_offset_sq + np.sum(terms))
