# test_canonical.py

import numpy as np
import pytest

from canonical import CanonicalProblem, GaussianSpec, canonicalize, check_commuting
from errors import DimensionMismatch, NotCommuting, NotPositiveDefinite, NotSymmetric


def random_rotation(dim, rng):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def commuting_pair(lam, lam_hat, rng):
    q = random_rotation(len(lam), rng)
    sigma = q @ np.diag(lam) @ q.T
    sigma_hat = q @ np.diag(lam_hat) @ q.T
    zeros = np.zeros(len(lam))
    return GaussianSpec(zeros, sigma), GaussianSpec(zeros, sigma_hat)


class TestGaussianSpec:

    def test_symmetrizes_within_tolerance(self):
        cov = np.array([[2.0, 0.5], [0.5 + 1e-13, 1.0]])
        spec = GaussianSpec(np.zeros(2), cov)
        np.testing.assert_array_equal(spec.covariance, spec.covariance.T)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            GaussianSpec(np.zeros(2), np.array([[1.0, 0.3], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            GaussianSpec(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite):
            GaussianSpec.diagonal([1.0, 0.0])

    def test_rejects_mean_length(self):
        with pytest.raises(DimensionMismatch):
            GaussianSpec(np.zeros(3), np.eye(2))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            GaussianSpec(np.zeros(2), np.ones((2, 3)))


class TestCommuting:

    def test_diagonal_pair_commutes(self):
        ok, residual = check_commuting(GaussianSpec.diagonal([1, 2]), GaussianSpec.diagonal([3, 4]))
        assert ok
        assert residual == 0.0

    def test_non_commuting_pair(self):
        a = GaussianSpec.diagonal([1.0, 2.0])
        b = GaussianSpec(np.zeros(2), np.array([[2.0, 0.5], [0.5, 1.0]]))
        ok, residual = check_commuting(a, b)
        assert not ok
        assert residual > 1e-3
        with pytest.raises(NotCommuting):
            canonicalize(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            check_commuting(GaussianSpec.diagonal([1, 2]), GaussianSpec.diagonal([1, 2, 3]))


class TestCanonicalize:

    def test_reference_order_is_identity(self):
        p = CanonicalProblem.from_eigenvalues([2, 3, 1], [3, 1, 1])
        np.testing.assert_allclose(p.lam, [2, 3, 1])
        np.testing.assert_allclose(p.lam_hat, [3, 1, 1])
        np.testing.assert_array_equal(p.permutation, [0, 1, 2])
        np.testing.assert_allclose(p.products, [6, 3, 1])

    def test_sorted_by_product(self):
        p = CanonicalProblem.from_eigenvalues([1, 2], [1, 3])
        np.testing.assert_allclose(p.lam, [2, 1])
        np.testing.assert_allclose(p.lam_hat, [3, 1])
        np.testing.assert_array_equal(p.permutation, [1, 0])

    @pytest.mark.parametrize("lam, lam_hat, permutation", [
        ([2, 1], [1, 2], [0, 1]),
        ([1, 2], [2, 1], [1, 0]),
    ])
    def test_product_ties_prefer_larger_lambda(self, lam, lam_hat, permutation):
        p = CanonicalProblem.from_eigenvalues(lam, lam_hat)
        np.testing.assert_allclose(p.lam, [2, 1])
        np.testing.assert_array_equal(p.permutation, permutation)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            CanonicalProblem.from_eigenvalues([1, 2], [1])

    def test_rotated_pair_reconstructs(self):
        rng = np.random.default_rng(3)
        lam, lam_hat = [4.0, 1.0, 2.5, 0.7], [0.5, 3.0, 2.0, 1.5]
        a, b = commuting_pair(lam, lam_hat, rng)
        p = canonicalize(a, b)

        products = p.products
        assert np.all(np.diff(products) <= 0)
        np.testing.assert_allclose(sorted(products), sorted(np.multiply(lam, lam_hat)), rtol=1e-10)
        np.testing.assert_allclose(p.basis.T @ p.basis, np.eye(4), atol=1e-10)
        np.testing.assert_allclose(p.basis @ np.diag(p.lam) @ p.basis.T, a.covariance, atol=1e-9)
        np.testing.assert_allclose(p.basis @ np.diag(p.lam_hat) @ p.basis.T, b.covariance, atol=1e-9)

    def test_repeated_eigenvalues_rediagonalized(self):
        rng = np.random.default_rng(11)
        q = random_rotation(2, rng)
        a = GaussianSpec.diagonal([1.0, 1.0])
        b = GaussianSpec(np.zeros(2), q @ np.diag([3.0, 1.0]) @ q.T)
        p = canonicalize(a, b)
        np.testing.assert_allclose(p.lam, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(p.lam_hat, [3.0, 1.0], atol=1e-10)
        np.testing.assert_allclose(p.basis @ np.diag(p.lam_hat) @ p.basis.T, b.covariance, atol=1e-9)

    def test_invariant_under_joint_rotation(self):
        rng = np.random.default_rng(5)
        a, b = commuting_pair([4.0, 1.0, 2.5], [0.5, 3.0, 2.0], rng)
        q = random_rotation(3, rng)
        rotated_a = GaussianSpec(np.zeros(3), q @ a.covariance @ q.T)
        rotated_b = GaussianSpec(np.zeros(3), q @ b.covariance @ q.T)

        p, rotated = canonicalize(a, b), canonicalize(rotated_a, rotated_b)
        np.testing.assert_allclose(rotated.lam, p.lam, rtol=1e-10)
        np.testing.assert_allclose(rotated.lam_hat, p.lam_hat, rtol=1e-10)
        # same directions, column signs aside
        np.testing.assert_allclose(np.abs(rotated.basis.T @ q @ p.basis), np.eye(3), atol=1e-9)

    def test_unresolved_near_repeated_eigenvalues(self):
        a = GaussianSpec.diagonal([1.0, 1.0 + 1e-7])
        b = GaussianSpec(np.zeros(2), np.array([[1.0, 1e-3], [1e-3, 2.0]]))
        assert check_commuting(a, b)[0]
        with pytest.raises(NotCommuting, match="GWOT_EIG_CLUSTER_TOL"):
            canonicalize(a, b)

    def test_mean_offset(self):
        a = GaussianSpec.diagonal([1.0, 2.0], mean=[1.0, -1.0])
        b = GaussianSpec.diagonal([2.0, 1.0], mean=[0.0, 1.0])
        p = canonicalize(a, b)
        assert p.mean_offset_sq == pytest.approx(5.0)

    def test_terms(self):
        p = CanonicalProblem.from_eigenvalues([4.0], [1.0])
        np.testing.assert_allclose(p.independent_terms, [5.0])
        np.testing.assert_allclose(p.transport_terms, [1.0])
        np.testing.assert_allclose(p.sqrt_products, [2.0])
