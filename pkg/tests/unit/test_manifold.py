"""
Unit tests for the oblique and complex circle manifold operations.
"""

import numpy as np
import pytest
from scipy.stats import chisquare

from ceprecode.exceptions import DegenerateRetractionError, InvalidArgumentError, InvalidDimensionError
from ceprecode.models.geometry import CirclePoint, RealPoint, TangentVector
from ceprecode.services.manifold import (
    CIRCLE,
    OBLIQUE,
    circle_project,
    circle_random,
    circle_retract,
    metric,
    oblique_random,
    retract,
    tangent_project,
    transport,
)


class TestObliqueRandom:
    """Test cases for random points on the oblique manifold."""

    def test_columns_have_unit_norm(self):
        X = oblique_random(64, seed=3)
        assert X.data.shape == (2, 64)
        assert np.max(np.abs(np.linalg.norm(X.data, axis=0) - 1.0)) < 1e-12
        assert X.validate() == []

    def test_same_seed_gives_same_point(self):
        assert np.array_equal(oblique_random(16, seed=5).data, oblique_random(16, seed=5).data)

    def test_accepts_generator(self):
        rng = np.random.default_rng(0)
        X = oblique_random(4, rng, power_budget=2.0)
        assert X.power_budget == 2.0

    def test_column_angles_are_uniform(self):
        X = oblique_random(4000, seed=21)
        angles = np.arctan2(X.data[1], X.data[0])
        counts, _ = np.histogram(angles, bins=16, range=(-np.pi, np.pi))
        assert chisquare(counts).pvalue > 0.01

    @pytest.mark.parametrize("n", [0, -1])
    def test_rejects_non_positive_size(self, n):
        with pytest.raises(InvalidDimensionError):
            oblique_random(n)


class TestTangentProjection:
    """Test cases for the tangent space projection."""

    def test_removes_radial_component(self):
        X = RealPoint(np.array([[1.0], [0.0]]))
        U = tangent_project(X, np.array([[3.0], [-2.0]]))
        assert np.allclose(U.data, [[0.0], [-2.0]])

    def test_is_idempotent(self, rng):
        X = oblique_random(10, rng)
        U = tangent_project(X, rng.standard_normal((2, 10)))
        assert np.allclose(tangent_project(X, U).data, U.data, atol=1e-14)
        assert U.validate() == []

    def test_rejects_wrong_shape(self):
        X = oblique_random(3, seed=1)
        with pytest.raises(InvalidDimensionError):
            tangent_project(X, np.zeros((2, 4)))


class TestMetric:
    """Test cases for the Euclidean metric on tangent vectors."""

    def test_trace_inner_product(self, rng):
        X = oblique_random(5, rng)
        U = tangent_project(X, rng.standard_normal((2, 5)))
        V = tangent_project(X, rng.standard_normal((2, 5)))
        assert metric(U, V) == pytest.approx(np.trace(U.data.T @ V.data))
        assert metric(U, U) == pytest.approx(U.norm() ** 2)

    def test_rejects_different_base_points(self):
        X = oblique_random(3, seed=1)
        Y = oblique_random(3, seed=2)
        with pytest.raises(InvalidArgumentError):
            metric(TangentVector(np.zeros((2, 3)), X), TangentVector(np.zeros((2, 3)), Y))


class TestRetraction:
    """Test cases for the column normalization retraction."""

    def test_example_step(self):
        X = RealPoint(np.array([[1.0], [0.0]]))
        Y = retract(X, np.array([[0.0], [1.0]]), 1.0)
        assert np.allclose(Y.data, [[1 / np.sqrt(2)], [1 / np.sqrt(2)]])

    def test_zero_step_is_identity(self, rng):
        X = oblique_random(6, rng)
        V = tangent_project(X, rng.standard_normal((2, 6)))
        assert retract(X, V, 0.0) is X

    def test_result_stays_on_manifold(self, rng):
        X = oblique_random(32, rng)
        V = tangent_project(X, rng.standard_normal((2, 32)))
        Y = retract(X, V, 7.5)
        assert np.max(np.abs(np.linalg.norm(Y.data, axis=0) - 1.0)) < 1e-12

    def test_agrees_with_straight_step_to_first_order(self, rng):
        X = oblique_random(16, rng)
        V = tangent_project(X, rng.standard_normal((2, 16)))
        V = TangentVector(V.data / V.norm(), X)
        t = 1e-4
        Y = retract(X, V, t)
        assert np.linalg.norm(Y.data - (X.data + t * V.data)) / t < 1e-3

    def test_keeps_power_budget(self):
        X = oblique_random(4, seed=0, power_budget=3.0)
        assert retract(X, np.zeros((2, 4)), 1.0).power_budget == 3.0

    def test_vanishing_column_is_reported(self):
        X = RealPoint(np.array([[1.0, 0.0], [0.0, 1.0]]))
        V = np.array([[-1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(DegenerateRetractionError) as excinfo:
            retract(X, V, 1.0)
        assert excinfo.value.index == 0

    def test_rejects_non_finite_step(self):
        X = oblique_random(2, seed=0)
        with pytest.raises(InvalidArgumentError):
            retract(X, np.zeros((2, 2)), float("inf"))


class TestTransport:
    """Test cases for vector transport by projection."""

    def test_result_is_tangent_at_new_point(self, rng):
        X = oblique_random(8, rng)
        V = tangent_project(X, rng.standard_normal((2, 8)))
        Y = retract(X, V, 0.3)
        moved = transport(Y, V)
        assert moved.base is Y
        assert np.max(np.abs(np.einsum("ij,ij->j", Y.data, moved.data))) < 1e-12


class TestCircleManifold:
    """Test cases for the complex circle used by the interference-reduction baseline."""

    def test_random_point_has_constant_modulus(self):
        x = circle_random(10, 0.5, seed=2)
        assert np.allclose(np.abs(x.data), 0.5, atol=1e-15)
        assert x.validate() == []

    def test_projection_is_orthogonal_to_point(self, rng):
        x = circle_random(6, 2.0, rng)
        u = circle_project(x, rng.standard_normal(6) + 1j * rng.standard_normal(6))
        assert np.allclose(np.real(u * np.conj(x.data)), 0.0, atol=1e-12)

    def test_retraction_restores_modulus(self, rng):
        x = circle_random(6, 0.25, rng)
        v = circle_project(x, rng.standard_normal(6) + 1j * rng.standard_normal(6))
        y = circle_retract(x, v, 3.0)
        assert np.max(np.abs(np.abs(y.data) - 0.25)) < 1e-12

    def test_retraction_of_vanishing_entry(self):
        x = CirclePoint(np.array([1.0 + 0j]), 1.0)
        with pytest.raises(DegenerateRetractionError):
            circle_retract(x, np.array([-1.0 + 0j]), 1.0)


class TestGeometryAdapters:
    """Test cases for the geometry objects shared with the conjugate gradient loop."""

    def test_oblique_combine(self, rng):
        X = oblique_random(3, rng)
        U = tangent_project(X, rng.standard_normal((2, 3)))
        V = tangent_project(X, rng.standard_normal((2, 3)))
        W = OBLIQUE.combine(X, 2.0, U, -1.0, V)
        assert np.allclose(W.data, 2.0 * U.data - V.data)
        assert OBLIQUE.inner(OBLIQUE.zero(X), U) == 0.0

    def test_circle_inner_is_real_part(self):
        u = np.array([1 + 1j, 2 - 1j])
        v = np.array([1j, 1.0])
        assert CIRCLE.inner(u, v) == pytest.approx(1.0 + 2.0)
