"""
Unit tests for the constructive-interference objective.
"""

import math

import numpy as np
import pytest

from ceprecode.exceptions import InvalidArgumentError, InvalidDimensionError
from ceprecode.models.data_models import ChannelMatrix, SymbolVector
from ceprecode.models.geometry import RealPoint
from ceprecode.services.manifold import oblique_random
from ceprecode.services.objective import (
    euclidean_gradient,
    eval_g,
    eval_g_precoder,
    evaluate,
    exact_objective,
    is_ci_feasible,
    riemannian_gradient,
    rotate_channel,
    sector_margins,
    smoothed_objective,
    softmax_weights,
)


def point_at(theta):
    return RealPoint(np.array([[math.cos(theta)], [math.sin(theta)]]))


class TestRotateChannel:
    """Test cases for the rotated channel blocks."""

    def test_scalar_blocks(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        assert ch.beta == pytest.approx(1.0)
        assert ch.A[0, 0] == pytest.approx(-1.0)
        assert ch.B[0, 0] == pytest.approx(-1.0)
        assert ch.C[0, 0] == pytest.approx(1.0)
        assert ch.D[0, 0] == pytest.approx(1.0)
        assert ch.scale == pytest.approx(1.0)

    def test_rotation_removes_symbol_phase(self):
        H = ChannelMatrix(np.array([[1j]]))
        s = SymbolVector([1], order=4)
        ch = rotate_channel(H, s, 1.0)
        assert ch.h_tilde_R[0, 0] == pytest.approx(1.0)
        assert ch.h_tilde_I[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_user_count_mismatch(self):
        H = ChannelMatrix(np.ones((4, 2)))
        with pytest.raises(InvalidDimensionError):
            rotate_channel(H, SymbolVector([0, 1, 2]), 1.0)

    def test_non_positive_power(self, scalar_instance):
        H, s, _ = scalar_instance
        with pytest.raises(InvalidArgumentError):
            rotate_channel(H, s, 0.0)

    def test_bpsk_has_no_sector_slope(self):
        with pytest.raises(InvalidArgumentError):
            rotate_channel(ChannelMatrix(np.ones((2, 1))), SymbolVector([0], order=2), 1.0)

    def test_normalized_copy(self, small_instance):
        H, s, _ = small_instance
        ch = rotate_channel(H, s, 4.0)
        unit = ch.normalized()
        assert unit.scale == 1.0
        assert np.array_equal(unit.weights, ch.weights)
        assert ch.power_budget == pytest.approx(4.0)


class TestEvalG:
    """Test cases for the linear forms g_i."""

    def test_scalar_example(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        assert np.allclose(eval_g(point_at(0.0), ch), [-1.0, -1.0])

    def test_scalar_closed_form(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        theta = 0.7
        expected = [-math.cos(theta) + math.sin(theta), -math.cos(theta) - math.sin(theta)]
        assert np.allclose(eval_g(point_at(theta), ch), expected)

    def test_power_budget_scales_forms(self, scalar_instance):
        H, s, _ = scalar_instance
        ch = rotate_channel(H, s, 4.0)
        assert np.allclose(eval_g(point_at(0.0), ch), [-2.0, -2.0])

    def test_precoder_form_matches_manifold_form(self, small_instance):
        H, s, P_T = small_instance
        ch = rotate_channel(H, s, P_T)
        X = oblique_random(H.n_antennas, seed=4, power_budget=P_T)
        assert np.allclose(eval_g(X, ch), eval_g_precoder(X.to_precoder(), ch))

    def test_rejects_wrong_shape(self, small_instance):
        ch = rotate_channel(*small_instance)
        with pytest.raises(InvalidDimensionError):
            eval_g(np.zeros((2, 3)), ch)


class TestObjectiveValues:
    """Test cases for the exact and smoothed objective."""

    def test_exact_value_and_index(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        result = exact_objective(point_at(0.5), ch)
        assert result.max_index == 0
        assert result.exact_value == pytest.approx(-math.cos(0.5) + math.sin(0.5))
        assert result.is_ci_feasible()

    def test_ties_report_smallest_index(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        assert exact_objective(point_at(0.0), ch).max_index == 0

    def test_smoothed_value_with_equal_forms(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        epsilon = 0.1
        assert smoothed_objective(point_at(0.0), ch, epsilon) == pytest.approx(-1.0 + epsilon * math.log(2))

    def test_evaluate_returns_both_values(self, small_instance):
        ch = rotate_channel(*small_instance)
        X = oblique_random(8, seed=9)
        result = evaluate(X, ch, 0.05)
        gap = result.smoothed_value - result.exact_value
        assert 0.0 <= gap <= 0.05 * math.log(6) + 1e-12
        assert result.epsilon == 0.05

    def test_large_forms_do_not_overflow(self, small_instance):
        ch = rotate_channel(*small_instance)
        X = oblique_random(8, seed=2)
        value = smoothed_objective(X, ch, 1e-6)
        assert math.isfinite(value)
        assert value == pytest.approx(exact_objective(X, ch).exact_value, abs=1e-5)

    @pytest.mark.parametrize("epsilon", [0.0, -1.0])
    def test_rejects_non_positive_epsilon(self, scalar_instance, epsilon):
        ch = rotate_channel(*scalar_instance)
        with pytest.raises(InvalidArgumentError):
            smoothed_objective(point_at(0.0), ch, epsilon)


class TestGradient:
    """Test cases for the Euclidean and Riemannian gradients."""

    def test_equal_weights_example(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        G = euclidean_gradient(point_at(0.0), ch, 0.1)
        # sum_m [(a+b); (c-d)] / (2M)
        assert np.allclose(G, [[-1.0], [0.0]])

    def test_stationary_point(self, scalar_instance):
        ch = rotate_channel(*scalar_instance)
        assert riemannian_gradient(point_at(0.0), ch, 0.1).norm() == 0.0

    def test_softmax_weights_sum_to_one(self, small_instance):
        ch = rotate_channel(*small_instance)
        w = softmax_weights(oblique_random(8, seed=1), ch, 0.01)
        assert w.sum() == pytest.approx(1.0)
        assert np.all(w >= 0)

    def test_matches_finite_differences(self, small_instance):
        ch = rotate_channel(*small_instance)
        X = oblique_random(8, seed=6)
        epsilon = 0.1
        G = euclidean_gradient(X, ch, epsilon)
        step = 1e-6
        numeric = np.zeros_like(G)
        for index in np.ndindex(*G.shape):
            E = np.zeros_like(G)
            E[index] = step
            numeric[index] = (smoothed_objective(X.data + E, ch, epsilon)
                              - smoothed_objective(X.data - E, ch, epsilon)) / (2 * step)
        assert np.linalg.norm(G - numeric) / np.linalg.norm(numeric) < 1e-5

    def test_riemannian_gradient_is_tangent(self, small_instance):
        ch = rotate_channel(*small_instance)
        X = oblique_random(8, seed=8)
        assert riemannian_gradient(X, ch, 0.01).validate() == []


class TestSectorMargins:
    """Test cases for the per-user sector margins and CI feasibility."""

    def test_identity_with_pairwise_max(self, small_instance):
        H, s, P_T = small_instance
        ch = rotate_channel(H, s, P_T)
        X = oblique_random(8, seed=12, power_budget=P_T)
        g = eval_g(X, ch)
        margins = sector_margins(X.to_precoder(), H, s)
        assert np.allclose(margins, np.maximum(g[0::2], g[1::2]) + s.amplitude * s.beta, atol=1e-10)

    def test_feasible_scalar_precoder(self, scalar_instance):
        H, s, P_T = scalar_instance
        ch = rotate_channel(H, s, P_T)
        assert is_ci_feasible(np.array([1.0 + 0j]), ch)
        assert not is_ci_feasible(np.array([-1.0 + 0j]), ch)
