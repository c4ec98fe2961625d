"""
Unconstrained Gaussian Wasserstein quantities: W2^2, the optimal affine map
and the two distortion envelopes D_min and D_max.
"""

from dataclasses import dataclass

import numpy as np

from canonical import CanonicalProblem


@dataclass(frozen=True)
class AffineMap:
    """Optimal transport map x -> basis diag(scale) basis^T (x - input_shift) + output_shift"""
    scale: np.ndarray
    basis: np.ndarray
    input_shift: np.ndarray
    output_shift: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.basis @ np.diag(self.scale) @ self.basis.T


def w2sq(p: CanonicalProblem) -> float:
    """Squared Wasserstein-2 distance between the two Gaussians of a canonical problem"""
    return float(p.mean_offset_sq + np.sum(p.transport_terms))


def d_min(p: CanonicalProblem) -> float:
    """Distortion of unconstrained optimal transport (same value as w2sq)"""
    return w2sq(p)


def d_max(p: CanonicalProblem) -> float:
    """Distortion of generating the reconstruction independently of the source"""
    return float(p.mean_offset_sq + np.sum(p.independent_terms))


def optimal_map(p: CanonicalProblem) -> AffineMap:
    """
    Optimal affine transport map between the two Gaussians.

    Args:
        p: Canonical problem

    Returns:
        AffineMap with per-component gains sqrt(lambda_hat / lambda) in the shared basis
    """
    dim = p.dim
    mean = p.mean if p.mean is not None else np.zeros(dim)
    mean_hat = p.mean_hat if p.mean_hat is not None else np.zeros(dim)
    return AffineMap(
        scale=np.sqrt(p.lam_hat / p.lam),
        basis=p.basis,
        input_shift=mean,
        output_shift=mean_hat,
    )


def map_transport(transport_map: AffineMap, samples: np.ndarray) -> np.ndarray:
    """Push row samples (n x L) through the affine map"""
    centered = np.atleast_2d(samples) - transport_map.input_shift
    return centered @ transport_map.matrix.T + transport_map.output_shift
