"""
Validation of Gaussian source pairs and reduction to canonical diagonal form.

Two Gaussians N(mu, Sigma) and N(mu_hat, Sigma_hat) with commuting positive
definite covariances share an eigenbasis Theta. The canonical problem keeps
the paired eigenvalues (lambda_l, lambda_hat_l) sorted by the product
lambda_l * lambda_hat_l in descending order, which is the order every
solver in this toolkit relies on.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from configs import tolerance_config
from errors import (
    DimensionMismatch,
    NotCommuting,
    NotPositiveDefinite,
    NotSymmetric,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianSpec:
    """A multivariate Gaussian given by its mean vector and covariance matrix"""
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] == 0:
            raise DimensionMismatch(f"Covariance must be a non-empty square matrix, got shape {cov.shape}")
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.shape[0] != cov.shape[0]:
            raise DimensionMismatch(
                f"Mean has length {mean.shape[0]} but covariance is {cov.shape[0]}x{cov.shape[0]}"
            )
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise NotPositiveDefinite("Mean and covariance entries must be finite")

        scale = max(np.linalg.norm(cov), 1.0)
        if np.linalg.norm(cov - cov.T) > tolerance_config.sym_tol * scale:
            raise NotSymmetric("Covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)

        smallest = np.linalg.eigvalsh(cov)[0]
        if smallest <= tolerance_config.pd_tol:
            raise NotPositiveDefinite(f"Covariance has eigenvalue {smallest:.3e}, expected > {tolerance_config.pd_tol}")

        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    @classmethod
    def diagonal(cls, variances: Sequence[float], mean: Sequence[float] = None) -> "GaussianSpec":
        variances = np.asarray(variances, dtype=float)
        if mean is None:
            mean = np.zeros_like(variances)
        return cls(mean=np.asarray(mean, dtype=float), covariance=np.diag(variances))


@dataclass(frozen=True)
class CanonicalProblem:
    """
    Normalized instance consumed by every solver.

    Attributes:
        lam: source eigenvalues, canonical order
        lam_hat: reconstruction eigenvalues, canonical order
        basis: orthonormal matrix whose columns are the shared eigenvectors
        permutation: permutation[k] is the original eigen-index of canonical component k
        mean_offset_sq: squared distance between the two means
    """
    lam: np.ndarray
    lam_hat: np.ndarray
    basis: np.ndarray
    permutation: np.ndarray
    mean_offset_sq: float = 0.0
    mean: np.ndarray = field(default=None, repr=False)
    mean_hat: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.lam.shape[0]

    @property
    def products(self) -> np.ndarray:
        return self.lam * self.lam_hat

    @property
    def sqrt_products(self) -> np.ndarray:
        return np.sqrt(self.lam * self.lam_hat)

    @property
    def independent_terms(self) -> np.ndarray:
        """Per-component distortion of independent generation, lambda + lambda_hat"""
        return self.lam + self.lam_hat

    @property
    def transport_terms(self) -> np.ndarray:
        """Per-component distortion of unconstrained transport, (sqrt(lambda) - sqrt(lambda_hat))^2"""
        return (np.sqrt(self.lam) - np.sqrt(self.lam_hat)) ** 2

    @classmethod
    def from_eigenvalues(cls, lam: Sequence[float], lam_hat: Sequence[float]) -> "CanonicalProblem":
        """Build a problem from pre-diagonal eigenvalues (identity basis, zero means)"""
        lam = np.asarray(lam, dtype=float)
        lam_hat = np.asarray(lam_hat, dtype=float)
        if lam.shape != lam_hat.shape:
            raise DimensionMismatch(f"lambda has length {lam.shape[0]} but lambdaHat has length {lam_hat.shape[0]}")
        return canonicalize(GaussianSpec.diagonal(lam), GaussianSpec.diagonal(lam_hat))


def check_commuting(a: GaussianSpec, b: GaussianSpec) -> Tuple[bool, float]:
    """
    Check whether two covariances commute.

    Args:
        a: Source Gaussian
        b: Reconstruction Gaussian

    Returns:
        (commutes, normalized Frobenius residual of the commutator)

    Raises:
        DimensionMismatch: If the two Gaussians live in different dimensions
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"Source has dimension {a.dim} but reconstruction has {b.dim}")
    sigma, sigma_hat = a.covariance, b.covariance
    commutator = sigma @ sigma_hat - sigma_hat @ sigma
    residual = float(np.linalg.norm(commutator) / (np.linalg.norm(sigma) * np.linalg.norm(sigma_hat)))
    return residual <= tolerance_config.commute_tol, residual


def _eigen_clusters(values: np.ndarray):
    """Group indices of ascending eigenvalues whose relative spacing is below eig_cluster_tol"""
    clusters = [[0]]
    for i in range(1, values.shape[0]):
        prev = values[i - 1]
        gap = values[i] - prev
        if gap <= tolerance_config.eig_cluster_tol * max(abs(values[i]), abs(prev)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column positive
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def canonicalize(a: GaussianSpec, b: GaussianSpec) -> CanonicalProblem:
    """
    Reduce a commuting Gaussian pair to canonical product-sorted form.

    Args:
        a: Source Gaussian N(mu, Sigma)
        b: Reconstruction Gaussian N(mu_hat, Sigma_hat)

    Returns:
        CanonicalProblem with eigenpairs sorted by lambda * lambda_hat descending,
        ties broken by larger lambda first, then by original eigen-index

    Raises:
        NotCommuting: If the covariances do not commute within commute_tol
    """
    commutes, residual = check_commuting(a, b)
    if not commutes:
        raise NotCommuting(f"Covariances do not commute (normalized residual {residual:.3e})")

    sigma, sigma_hat = a.covariance, b.covariance
    values, vectors = np.linalg.eigh(sigma)

    # Re-diagonalize Sigma_hat inside every (numerically) repeated eigenspace of Sigma
    columns = []
    for cluster in _eigen_clusters(values):
        block = vectors[:, cluster]
        if len(cluster) > 1:
            restricted = block.T @ sigma_hat @ block
            _, rotation = np.linalg.eigh(0.5 * (restricted + restricted.T))
            block = block @ rotation
        columns.append(block)
    shared = _fix_signs(np.hstack(columns))

    # Original eigen-order: by dominant coordinate, so diagonal inputs keep their axis order
    dominant = np.argmax(np.abs(shared), axis=0)
    original_order = sorted(range(shared.shape[1]), key=lambda j: (dominant[j], j))
    shared = shared[:, original_order]

    lam = np.einsum("ij,ik,kj->j", shared, sigma, shared)
    lam_hat = np.einsum("ij,ik,kj->j", shared, sigma_hat, shared)
    if np.min(lam) <= tolerance_config.pd_tol or np.min(lam_hat) <= tolerance_config.pd_tol:
        raise NotPositiveDefinite("Shared eigenbasis produced a non-positive eigenvalue")

    products = lam * lam_hat
    order = sorted(range(lam.shape[0]), key=lambda j: (-products[j], -lam[j], j))
    permutation = np.asarray(order, dtype=int)

    basis = shared[:, permutation]
    problem = CanonicalProblem(
        lam=lam[permutation],
        lam_hat=lam_hat[permutation],
        basis=basis,
        permutation=permutation,
        mean_offset_sq=float(np.sum((a.mean - b.mean) ** 2)),
        mean=a.mean,
        mean_hat=b.mean,
    )
    _verify(problem, sigma, sigma_hat)
    logger.debug("Canonicalized L=%d pair, commutator residual %.3e", problem.dim, residual)
    return problem


def _verify(problem: CanonicalProblem, sigma: np.ndarray, sigma_hat: np.ndarray) -> None:
    basis = problem.basis
    dim = problem.dim
    if np.max(np.abs(basis.T @ basis - np.eye(dim))) > tolerance_config.ortho_tol:
        raise NotCommuting("Shared eigenbasis is not orthonormal")
    for name, target, values in (("Sigma", sigma, problem.lam), ("Sigma_hat", sigma_hat, problem.lam_hat)):
        rebuilt = basis @ np.diag(values) @ basis.T
        scale = max(np.linalg.norm(target), 1.0)
        error = np.linalg.norm(rebuilt - target) / scale
        if error > tolerance_config.reconstruct_tol:
            # commutator small but not zero: Sigma_hat couples eigenvectors of nearly equal eigenvalues
            raise NotCommuting(
                f"Covariances pass the commutator check but the eigenbasis of Sigma does not diagonalize {name} "
                f"(relative error {error:.3e}); Sigma has eigenvalues closer than they are resolved. "
                f"Raise GWOT_EIG_CLUSTER_TOL (now {tolerance_config.eig_cluster_tol:g}) to treat them as repeated"
            )
