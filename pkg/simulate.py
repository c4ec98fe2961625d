"""
Monte Carlo verification of the closed-form distortions.

Samples are drawn in fixed-size chunks; chunk k uses the k-th child of
numpy's SeedSequence(seed), so serial and threaded runs produce bit-identical
reports. Simulations run on centered canonical coordinates, so theoretical
values exclude the mean offset term.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from canonical import CanonicalProblem, GaussianSpec, canonicalize
from channel import d_uncoded
from configs import simulation_config
from dimension import one_shot_plan
from errors import InvalidRange, NegativePower, TooFewSamples
from schemas import SimReport
from transport_core import map_transport, optimal_map, w2sq
from waterfill import RateAllocation, Scheme

logger = logging.getLogger(__name__)

Draw = Callable[[np.random.Generator, int], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class CouplingSpec:
    """Independent bivariate Gaussian pairs (S_l, S_hat_l) with correlation rho_l"""
    rho: np.ndarray
    source_var: np.ndarray
    recon_var: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        source_var = np.asarray(self.source_var, dtype=float)
        recon_var = np.asarray(self.recon_var, dtype=float)
        if not (rho.shape == source_var.shape == recon_var.shape) or rho.ndim != 1:
            raise InvalidRange("rho, sourceVar and reconVar must be vectors of equal length")
        if np.any(np.abs(rho) > 1.0):
            raise InvalidRange("Correlation coefficients must lie in [-1, 1]")
        if np.any(source_var <= 0.0) or np.any(recon_var <= 0.0):
            raise InvalidRange("Variances must be positive")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "source_var", source_var)
        object.__setattr__(self, "recon_var", recon_var)

    @property
    def theoretical_distortion(self) -> float:
        return float(np.sum(self.source_var + self.recon_var - 2.0 * self.rho * np.sqrt(self.source_var * self.recon_var)))


def rho_from_rates(rates: np.ndarray) -> np.ndarray:
    """rho_l = sqrt(1 - 2^(-2 R_l))"""
    return np.sqrt(-np.expm1(-2.0 * math.log(2.0) * np.asarray(rates, dtype=float)))


def rates_from_rho(rho: np.ndarray) -> np.ndarray:
    """R_l = 1/2 log2(1 / (1 - rho_l^2))"""
    return -0.5 * np.log2(1.0 - np.asarray(rho, dtype=float) ** 2)


def coupling_from_allocation(p: CanonicalProblem, allocation: RateAllocation) -> CouplingSpec:
    """
    Coupling whose closed-form distortion equals the allocation's (minus the mean offset).

    CR rates give rho_l = sqrt(1 - 2^(-2R_l)); NoCR rates give rho_l = 1 - 2^(-2R_l).
    """
    rho = rho_from_rates(allocation.rates)
    if allocation.scheme == Scheme.NO_CR:
        rho = rho ** 2
    elif allocation.scheme != Scheme.CR:
        raise InvalidRange(f"No coupling defined for {allocation.scheme.value} allocations")
    return CouplingSpec(rho=rho, source_var=p.lam, recon_var=p.lam_hat)


# Moment accumulation
@dataclass
class _Moments:
    count: int
    mean_d: float
    m2_d: float
    mean_y: np.ndarray
    co_y: np.ndarray

    @classmethod
    def of(cls, source: np.ndarray, recon: np.ndarray) -> "_Moments":
        d = np.sum((source - recon) ** 2, axis=1)
        mean_y = recon.mean(axis=0)
        centered = recon - mean_y
        mean_d = float(d.mean())
        return cls(
            count=d.shape[0],
            mean_d=mean_d,
            m2_d=float(np.sum((d - mean_d) ** 2)),
            mean_y=mean_y,
            co_y=centered.T @ centered,
        )

    def merge(self, other: "_Moments") -> "_Moments":
        # Chan et al. pairwise update
        n = self.count + other.count
        delta_d = other.mean_d - self.mean_d
        delta_y = other.mean_y - self.mean_y
        w = self.count * other.count / n
        return _Moments(
            count=n,
            mean_d=self.mean_d + delta_d * other.count / n,
            m2_d=self.m2_d + other.m2_d + delta_d ** 2 * w,
            mean_y=self.mean_y + delta_y * other.count / n,
            co_y=self.co_y + other.co_y + np.outer(delta_y, delta_y) * w,
        )


def _chunk_sizes(n: int) -> List[int]:
    size = simulation_config.chunk_size
    sizes = [size] * (n // size)
    if n % size:
        sizes.append(n % size)
    return sizes


def _run(draw: Draw, n: int, seed: int, jobs: int = None) -> _Moments:
    if n < simulation_config.min_samples:
        raise TooFewSamples(f"Need at least {simulation_config.min_samples} samples, got {n}")
    if seed < 0:
        raise InvalidRange(f"Seed must be nonnegative, got {seed}")
    jobs = jobs or simulation_config.jobs
    sizes = _chunk_sizes(n)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def run_chunk(args) -> _Moments:
        child, size = args
        return _Moments.of(*draw(np.random.default_rng(child), size))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run_chunk, zip(children, sizes)))
    else:
        parts = [run_chunk(args) for args in zip(children, sizes)]

    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def _report(scheme: str, moments: _Moments, seed: int, theoretical: float, target_cov: np.ndarray) -> SimReport:
    n = moments.count
    stderr = math.sqrt(moments.m2_d / (n - 1)) / math.sqrt(n)
    cov = moments.co_y / (n - 1)
    deviation = np.abs(cov - target_cov)
    diag = np.diag(target_cov)
    gate = simulation_config.marginal_sigmas * np.sqrt((target_cov ** 2 + np.outer(diag, diag)) / n)
    distortion_pass = abs(moments.mean_d - theoretical) <= simulation_config.ci_multiplier * stderr + simulation_config.abs_tol
    marginal_pass = bool(np.all(deviation <= gate + simulation_config.abs_tol))
    logger.info(
        "%s: n=%d empirical=%.6g theoretical=%.6g stderr=%.3g pass=%s/%s",
        scheme, n, moments.mean_d, theoretical, stderr, distortion_pass, marginal_pass,
    )
    return SimReport(
        scheme=scheme,
        samples=n,
        seed=seed,
        empirical_distortion=moments.mean_d,
        theoretical_distortion=theoretical,
        stderr=stderr,
        empirical_recon_cov=cov.tolist(),
        max_marginal_deviation=float(np.max(deviation)),
        distortion_pass=bool(distortion_pass),
        marginal_pass=marginal_pass,
    )


# Schemes
def _coupling_draw(spec: CouplingSpec) -> Draw:
    source_sd = np.sqrt(spec.source_var)
    gain = spec.rho * np.sqrt(spec.recon_var / spec.source_var)
    noise_sd = np.sqrt(spec.recon_var * (1.0 - spec.rho ** 2))

    def draw(rng: np.random.Generator, size: int):
        source = rng.standard_normal((size, source_sd.shape[0])) * source_sd
        noise = rng.standard_normal((size, source_sd.shape[0]))
        return source, gain * source + noise_sd * noise

    return draw


def simulate_coupling(spec: CouplingSpec, n: int, seed: int, jobs: int = None) -> SimReport:
    """
    Sample the coupling S_hat_l = rho_l sqrt(lambda_hat_l / lambda_l) S_l + sqrt(lambda_hat_l (1 - rho_l^2)) Z_l.

    Args:
        spec: Coupling to sample
        n: Number of i.i.d. vectors
        seed: Master seed
        jobs: Worker threads (default from simulation_config)

    Returns:
        SimReport against the coupling's closed-form distortion

    Raises:
        TooFewSamples: If n is below the configured minimum
    """
    moments = _run(_coupling_draw(spec), n, seed, jobs)
    return _report("coupling", moments, seed, spec.theoretical_distortion, np.diag(spec.recon_var))


def simulate_uncoded(p: CanonicalProblem, P: float, n: int, seed: int, jobs: int = None) -> SimReport:
    """
    Simulate S -> X = sqrt(P / lambda_1) S_1 -> Y = X + N(0, 1) -> S_hat_1 = sqrt(lambda_hat_1 / (P + 1)) Y,
    with the remaining reconstruction components generated independently.
    """
    if not P > 0.0:
        raise NegativePower(f"Uncoded simulation needs positive power, got {P}")
    source_sd = np.sqrt(p.lam)
    recon_sd = np.sqrt(p.lam_hat)
    encoder = math.sqrt(P / p.lam[0])
    decoder = math.sqrt(p.lam_hat[0] / (P + 1.0))

    def draw(rng: np.random.Generator, size: int):
        source = rng.standard_normal((size, p.dim)) * source_sd
        channel_out = encoder * source[:, 0] + rng.standard_normal(size)
        recon = rng.standard_normal((size, p.dim)) * recon_sd
        recon[:, 0] = decoder * channel_out
        return source, recon

    theoretical = d_uncoded(p, P) - p.mean_offset_sq
    moments = _run(draw, n, seed, jobs)
    return _report("uncoded", moments, seed, theoretical, np.diag(p.lam_hat))


def simulate_dim_plan(p: CanonicalProblem, K: int, n: int, seed: int, jobs: int = None) -> SimReport:
    """Run the select-scale-generate plan: kept components fully correlated, the rest independent"""
    plan = one_shot_plan(p, K)
    rho = (np.arange(p.dim) < plan.keep).astype(float)
    spec = CouplingSpec(rho=rho, source_var=p.lam, recon_var=p.lam_hat)
    moments = _run(_coupling_draw(spec), n, seed, jobs)
    return _report("dim", moments, seed, plan.distortion - p.mean_offset_sq, np.diag(p.lam_hat))


def simulate_optimal_map(a: GaussianSpec, b: GaussianSpec, n: int, seed: int, jobs: int = None) -> SimReport:
    """Push samples of N(mu, Sigma) through the optimal affine map in original coordinates"""
    problem = canonicalize(a, b)
    transport_map = optimal_map(problem)
    factor = np.linalg.cholesky(a.covariance)

    def draw(rng: np.random.Generator, size: int):
        source = a.mean + rng.standard_normal((size, a.dim)) @ factor.T
        return source, map_transport(transport_map, source)

    moments = _run(draw, n, seed, jobs)
    return _report("optimal-map", moments, seed, w2sq(problem), b.covariance)
