"""
The constructive-interference objective in real representation.

For each user m the channel is rotated by the desired phase, h~_m = h_m e^{-j phi_m},
and two linear forms g_{2m-1}, g_{2m} of the real precoder are built so that

    |Im t_m| - beta Re t_m = max(g_{2m-1}, g_{2m}) + u beta,   t_m = h~_m^T x - u.

The solver minimizes max_i g_i over the oblique manifold through its
log-sum-exp smoothing f = eps * log(sum_i exp(g_i / eps)).
"""

import logging
from typing import Union

import numpy as np
from scipy.special import logsumexp, softmax

from ..exceptions import InvalidArgumentError, InvalidDimensionError
from ..models.data_models import ChannelMatrix, SymbolVector
from ..models.geometry import RealPoint, TangentVector
from ..models.solver_models import ObjectiveEval, RotatedChannel
from .manifold import tangent_project

logger = logging.getLogger(__name__)

PointLike = Union[RealPoint, np.ndarray]


def rotate_channel(H: ChannelMatrix, s: SymbolVector, power_budget: float) -> RotatedChannel:
    """
    Rotates every user's channel by its desired symbol phase and builds A, B, C, D.

    Args:
        H: Channel matrix (N x M)
        s: Desired symbols (M users)
        power_budget: Total transmit power P_T

    Returns:
        RotatedChannel: Precomputed blocks shared by every evaluation

    Raises:
        InvalidDimensionError: If H and s disagree on the number of users
        InvalidArgumentError: If P_T <= 0 or the PSK order gives no finite beta
    """
    if H.n_users != s.n_users:
        raise InvalidDimensionError(f"Channel has {H.n_users} users but {s.n_users} symbols were given",
                                    H.n_users, s.n_users)
    if not power_budget > 0:
        raise InvalidArgumentError("power_budget", f"P_T must be positive, got {power_budget}")
    if s.order < 3:
        raise InvalidArgumentError("order", f"PSK order {s.order} has no finite sector slope tan(pi/L)")

    beta = s.beta
    H_tilde = H.data * np.exp(-1j * s.phases)[np.newaxis, :]
    HR, HI = H_tilde.real.copy(), H_tilde.imag.copy()
    for block in (HR, HI):
        block.setflags(write=False)

    return RotatedChannel(
        h_tilde_R=HR,
        h_tilde_I=HI,
        A=HI - beta * HR,
        B=-HI - beta * HR,
        C=HR + beta * HI,
        D=HR - beta * HI,
        beta=beta,
        u=float(s.amplitude),
        scale=float(np.sqrt(H.n_antennas / power_budget)),
    )


def _point_matrix(X: PointLike, ch: RotatedChannel) -> np.ndarray:
    data = np.asarray(X.data if isinstance(X, RealPoint) else X, dtype=float)
    if data.shape != (2, ch.n_antennas):
        raise InvalidDimensionError(f"Point of shape {data.shape} does not fit a channel with "
                                    f"{ch.n_antennas} antennas", (2, ch.n_antennas), data.shape)
    return data


def _check_epsilon(epsilon: float) -> None:
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon", f"Smoothing parameter must be positive, got {epsilon}")


def eval_g(X: PointLike, ch: RotatedChannel) -> np.ndarray:
    """
    Evaluates the 2M linear forms g_i at X (membership is not required).

    Returns:
        np.ndarray: g ordered (g_1, g_2, ..., g_{2M})
    """
    data = _point_matrix(X, ch)
    return ch.weights.T @ data.reshape(-1) / ch.scale


def eval_g_precoder(x: np.ndarray, ch: RotatedChannel) -> np.ndarray:
    """The same forms evaluated directly on a complex precoder (any modulus)."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (ch.n_antennas,):
        raise InvalidDimensionError(f"Precoder of shape {x.shape} does not fit {ch.n_antennas} antennas",
                                    (ch.n_antennas,), x.shape)
    return ch.weights.T @ np.concatenate([x.real, x.imag])


def exact_objective(X: PointLike, ch: RotatedChannel) -> ObjectiveEval:
    """max_i g_i, with the smallest maximizing index (0-based)."""
    g = eval_g(X, ch)
    index = int(np.argmax(g))
    return ObjectiveEval(g=g, max_index=index, exact_value=float(g[index]))


def smoothed_objective(X: PointLike, ch: RotatedChannel, epsilon: float) -> float:
    """
    Log-sum-exp upper bound of the max objective.

    Raises:
        InvalidArgumentError: If epsilon <= 0
    """
    _check_epsilon(epsilon)
    return float(epsilon * logsumexp(eval_g(X, ch) / epsilon))


def evaluate(X: PointLike, ch: RotatedChannel, epsilon: float) -> ObjectiveEval:
    """Exact and smoothed values from a single evaluation of g."""
    _check_epsilon(epsilon)
    g = eval_g(X, ch)
    index = int(np.argmax(g))
    return ObjectiveEval(
        g=g,
        max_index=index,
        exact_value=float(g[index]),
        smoothed_value=float(epsilon * logsumexp(g / epsilon)),
        epsilon=epsilon,
    )


def softmax_weights(X: PointLike, ch: RotatedChannel, epsilon: float) -> np.ndarray:
    """exp(g_i/eps) / sum_j exp(g_j/eps), computed with max subtraction."""
    _check_epsilon(epsilon)
    return softmax(eval_g(X, ch) / epsilon)


def euclidean_gradient(X: PointLike, ch: RotatedChannel, epsilon: float) -> np.ndarray:
    """
    Gradient of the smoothed objective with respect to the 2xN matrix X.

    Column n is (1/scale) * sum_m [a_nm w_{2m-1} + b_nm w_{2m}; c_nm w_{2m-1} - d_nm w_{2m}]
    with w the softmax weights.
    """
    w = softmax_weights(X, ch, epsilon)
    return (ch.weights @ w).reshape(2, ch.n_antennas) / ch.scale


def riemannian_gradient(X: RealPoint, ch: RotatedChannel, epsilon: float) -> TangentVector:
    """Projection of the Euclidean gradient onto the tangent space at X."""
    return tangent_project(X, euclidean_gradient(X, ch, epsilon))


def sector_margins(x: np.ndarray, H: ChannelMatrix, s: SymbolVector) -> np.ndarray:
    """
    |Im t_m| - beta Re t_m per user, computed directly from the complex model.

    Values at or below u*beta put the noiseless received symbol inside its
    detection sector.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (H.n_antennas,):
        raise InvalidDimensionError(f"Precoder of shape {x.shape} does not fit {H.n_antennas} antennas",
                                    (H.n_antennas,), x.shape)
    t = (H.data.T @ x - s.symbols) * np.exp(-1j * s.phases)
    return np.abs(t.imag) - s.beta * t.real


def is_ci_feasible(x: np.ndarray, ch: RotatedChannel) -> bool:
    """True when max_i g_i <= 0 at the precoder x."""
    return bool(np.max(eval_g_precoder(x, ch)) <= 0.0)
