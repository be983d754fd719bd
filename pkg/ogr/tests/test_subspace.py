import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from ogr.exceptions import ContractViolation, DegenerateBasis
from ogr.features.linalg.services import eigh_small
from ogr.features.regression.models import RegressionState
from ogr.features.regression.services import estimate_hessian, update_averages
from ogr.features.subspace.models import Basis
from ogr.features.subspace.services import (
    coords,
    damped_symmetric_step,
    exploration_rates,
    explore,
    gram_schmidt,
    orthonormalize,
    random_basis,
    repair_basis,
    residual,
    rotate_state,
)

from .helpers import random_orthogonal


def noisy_state(d, rng, samples=30):
    state = RegressionState.zeros(d)
    A = rng.standard_normal((d, d))
    for _ in range(samples):
        theta = rng.standard_normal(d)
        state = update_averages(state, theta, A @ theta + 0.1 * rng.standard_normal(d), 0.9)
    return state


class CoordsResidualTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(0)
        self.basis = random_basis(3, 7, self.rng)

    def test_basis_vector_coordinates(self):
        assert_allclose(coords(self.basis.vectors[0], self.basis), [1.0, 0.0, 0.0], atol=1e-12)

    def test_orthogonal_vector_has_zero_coordinates(self):
        x = residual(self.rng.standard_normal(7), self.basis)
        assert_allclose(coords(x, self.basis), np.zeros(3), atol=1e-12)

    def test_matches_dense_product(self):
        x = self.rng.standard_normal(7)
        assert_allclose(coords(x, self.basis), self.basis.matrix @ x, rtol=1e-14)

    def test_residual_in_span_vanishes(self):
        g = self.basis.vectors.T @ np.array([0.3, -2.0, 1.5])
        assert_allclose(residual(g, self.basis), np.zeros(7), atol=1e-12)

    def test_residual_keeps_orthogonal_gradient(self):
        g = residual(self.rng.standard_normal(7), self.basis)
        assert_allclose(residual(g, self.basis), g, atol=1e-12)

    def test_pythagoras(self):
        g = self.rng.standard_normal(7)
        g_res = residual(g, self.basis)
        projector = self.basis.matrix.T @ self.basis.matrix
        assert_allclose(g_res, g - projector @ g, atol=1e-12)
        self.assertAlmostEqual(g @ g, g_res @ g_res + np.sum(coords(g, self.basis) ** 2), places=10)

    def test_dimension_mismatch(self):
        with self.assertRaises(ContractViolation):
            coords(np.ones(6), self.basis)


class ExploreTests(SimpleTestCase):

    def test_zero_rate_is_bitwise_no_op(self):
        basis = random_basis(2, 5, np.random.default_rng(1))
        assert_array_equal(explore(basis, np.ones(5), 0.0).vectors, basis.vectors)

    def test_zero_residual_is_bitwise_no_op(self):
        basis = random_basis(2, 5, np.random.default_rng(1))
        assert_array_equal(explore(basis, np.zeros(5), 0.3).vectors, basis.vectors)

    def test_single_vector_closed_form(self):
        gamma, q = 0.2, 0.5
        new = explore(Basis(vectors=np.array([[1.0, 0.0]])), np.array([0.0, q]), gamma)
        assert_allclose(new.vectors, [[1.0 - 0.5 * gamma ** 2 * q ** 2, gamma * q]], rtol=1e-15)
        self.assertAlmostEqual(new.vectors[0] @ new.vectors[0], 1.0 + 0.25 * gamma ** 4 * q ** 4, places=15)

    def test_uniform_rate_matches_mean_vector_form(self):
        rng = np.random.default_rng(2)
        basis = random_basis(3, 8, rng)
        g_res = residual(rng.standard_normal(8), basis)
        gamma = 0.05
        v_bar = 0.5 * gamma ** 2 * (g_res @ g_res) * basis.vectors.sum(axis=0)
        expected = basis.vectors + gamma * g_res - v_bar
        assert_allclose(explore(basis, g_res, gamma).vectors, expected, atol=1e-14)

    def test_component_along_residual(self):
        rng = np.random.default_rng(3)
        basis = random_basis(3, 9, rng)
        g_res = residual(rng.standard_normal(9), basis)
        gamma = 0.07
        new = explore(basis, g_res, gamma)
        unit = g_res / np.linalg.norm(g_res)
        assert_allclose(new.vectors @ unit, gamma * np.linalg.norm(g_res), rtol=1e-10)

    def test_drift_bound(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            basis = random_basis(4, 20, rng)
            bound = 0.0
            for _ in range(25):
                g_res = residual(rng.standard_normal(20), basis)
                gamma = rng.uniform(0.0, 0.1) / np.linalg.norm(g_res)
                basis = explore(basis, g_res, gamma)
                bound += 2.0 * (gamma * np.linalg.norm(g_res)) ** 3
                self.assertLessEqual(basis.ortho_error(), bound + 1e-14)

    def test_per_direction_rates(self):
        rates = exploration_rates(0.01, np.array([4.0, 1.0, 0.25]), kappa=0.5)
        self.assertAlmostEqual(float(np.mean(rates)), 0.01, places=15)
        self.assertTrue(rates[0] < rates[1] < rates[2])
        self.assertEqual(exploration_rates(0.01, np.ones(3), kappa=None), 0.01)
        self.assertEqual(exploration_rates(0.01, None, kappa=0.5), 0.01)


class OrthonormalizeTests(SimpleTestCase):

    def test_orthonormal_input_is_fixed_point(self):
        basis = Basis(vectors=np.eye(4)[:3])
        assert_allclose(orthonormalize(basis).vectors, basis.vectors, atol=1e-15)

    def test_damped_step_shrinks_overlap_cubically(self):
        delta = 0.1
        V = np.array([[1.0, 0.0], [delta, np.sqrt(1.0 - delta ** 2)]])
        U = damped_symmetric_step(V)
        self.assertAlmostEqual(U[0] @ U[1], delta ** 3 / 4.0, places=15)

    def test_rescales_orthogonal_vectors(self):
        basis = Basis(vectors=np.diag([3.0, 0.5, 2.0]))
        assert_allclose(orthonormalize(basis).vectors, np.eye(3), atol=1e-15)

    def test_reaches_tight_tolerance(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            V = random_basis(5, 12, rng).vectors + 0.05 * rng.standard_normal((5, 12))
            self.assertLessEqual(orthonormalize(Basis(vectors=V)).ortho_error(), 1e-8)

    def test_order_independent(self):
        rng = np.random.default_rng(6)
        V = random_basis(3, 6, rng).vectors + 0.02 * rng.standard_normal((3, 6))
        forward = orthonormalize(Basis(vectors=V)).vectors
        backward = orthonormalize(Basis(vectors=V[::-1])).vectors[::-1]
        assert_allclose(forward, backward, atol=1e-12)

    def test_nearly_parallel_input(self):
        V = np.array([[1.0, 0.0, 0.0], [1.0, 1e-3, 0.0], [0.0, 0.0, 1.0]])
        result = orthonormalize(Basis(vectors=V))
        self.assertLessEqual(result.ortho_error(), 1e-8)

    def test_rank_deficiency_is_reported(self):
        V = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        with self.assertRaises(DegenerateBasis) as caught:
            orthonormalize(Basis(vectors=V))
        self.assertEqual(caught.exception.index, 1)

    def test_gram_schmidt_dependent_vector(self):
        with self.assertRaises(DegenerateBasis) as caught:
            gram_schmidt(np.array([[1.0, 0.0], [2.0, 0.0]]))
        self.assertEqual(caught.exception.index, 1)

    def test_repair_replaces_vector(self):
        rng = np.random.default_rng(7)
        basis = random_basis(3, 6, rng)
        vectors = basis.vectors.copy()
        vectors[1] = vectors[0]
        repaired = repair_basis(Basis(vectors=vectors), 1, rng)
        self.assertLessEqual(repaired.ortho_error(), 1e-10)
        assert_array_equal(repaired.vectors[0], vectors[0])

    def test_random_basis(self):
        basis = random_basis(6, 6, np.random.default_rng(8))
        assert_allclose(basis.matrix @ basis.matrix.T, np.eye(6), atol=1e-10)
        with self.assertRaises(ContractViolation):
            random_basis(7, 6, np.random.default_rng(8))


class RotateStateTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(9)
        self.basis = random_basis(3, 8, self.rng)
        self.state = noisy_state(3, self.rng)

    def test_identity_rotation(self):
        basis, state = rotate_state(self.basis, self.state, np.eye(3))
        assert_array_equal(basis.vectors, self.basis.vectors)
        assert_array_equal(state.theta_theta_bar, self.state.theta_theta_bar)
        self.assertEqual(state.s, self.state.s)

    def test_permutation_swaps_entries(self):
        P = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        basis, state = rotate_state(self.basis, self.state, P)
        assert_array_equal(state.theta_bar, self.state.theta_bar[[1, 0, 2]])
        assert_array_equal(state.g_theta_bar, self.state.g_theta_bar[[1, 0, 2]][:, [1, 0, 2]])
        assert_array_equal(basis.vectors, self.basis.vectors[[1, 0, 2]])

    def test_coordinates_transform_covariantly(self):
        O = random_orthogonal(3, self.rng)
        basis, _ = rotate_state(self.basis, self.state, O)
        x = self.rng.standard_normal(8)
        assert_allclose(coords(x, basis), O @ coords(x, self.basis), atol=1e-10)

    def test_hessian_estimate_is_conjugated(self):
        for _ in range(5):
            O = random_orthogonal(3, self.rng)
            _, state = rotate_state(self.basis, self.state, O)
            expected = O @ estimate_hessian(self.state) @ O.T
            self.assertLessEqual(np.linalg.norm(estimate_hessian(state) - expected), 1e-10)

    def test_eigenframe_rotation_diagonalizes(self):
        pair = eigh_small(estimate_hessian(self.state))
        _, state = rotate_state(self.basis, self.state, pair.rotation)
        H = estimate_hessian(state)
        self.assertLessEqual(np.max(np.abs(H - np.diag(np.diag(H)))), 1e-8)
        self.assertEqual(state.s, self.state.s)

    def test_rejects_non_orthogonal(self):
        with self.assertRaises(ContractViolation):
            rotate_state(self.basis, self.state, 2.0 * np.eye(3))
