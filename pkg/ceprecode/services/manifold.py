"""
Geometry of the 2xN oblique manifold and of the complex circle manifold.

The oblique manifold holds the real representation of a constant-envelope
precoder (one unit-norm column per antenna). The complex circle holds the
precoder itself and is used by the interference-reduction RCG baseline.
Everything here is a pure function of immutable inputs.
"""

import math
from typing import Optional

import numpy as np

from ..exceptions import DegenerateRetractionError, InvalidArgumentError, InvalidDimensionError
from ..models.geometry import CirclePoint, RealPoint, TangentVector


def _as_matrix(G, shape) -> np.ndarray:
    G = np.asarray(G.data if isinstance(G, TangentVector) else G, dtype=float)
    if G.shape != shape:
        raise InvalidDimensionError(f"Expected a matrix of shape {shape}, got {G.shape}", shape, G.shape)
    return G


def oblique_random(n_antennas: int, seed: Optional[int] = None, power_budget: float = 1.0) -> RealPoint:
    """
    Draws a random point by normalizing independent standard-normal 2-vectors.

    Args:
        n_antennas: Number of columns N
        seed: RNG seed (or a numpy Generator)
        power_budget: P_T carried by the point

    Returns:
        RealPoint: Point with every column uniform on the unit circle

    Raises:
        InvalidDimensionError: If N < 1
    """
    if not isinstance(n_antennas, (int, np.integer)) or n_antennas < 1:
        raise InvalidDimensionError(f"N must be a positive integer, got {n_antennas}", ">= 1", n_antennas)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Z = rng.standard_normal((2, int(n_antennas)))
    norms = np.linalg.norm(Z, axis=0)
    # A zero column has probability zero; redraw it anyway.
    while np.any(norms == 0):
        bad = norms == 0
        Z[:, bad] = rng.standard_normal((2, int(bad.sum())))
        norms = np.linalg.norm(Z, axis=0)
    return RealPoint(Z / norms, power_budget)


def tangent_project(X: RealPoint, G) -> TangentVector:
    """P_X(G) = G - X diag(X^T G): removes the radial part of every column."""
    G = _as_matrix(G, X.data.shape)
    radial = np.einsum("ij,ij->j", X.data, G)
    return TangentVector(G - X.data * radial, X)


def metric(U: TangentVector, V: TangentVector) -> float:
    """
    Euclidean metric tr(U^T V) on the tangent space.

    Raises:
        InvalidArgumentError: If U and V are tangent at different points
    """
    if U.base is not V.base and not np.array_equal(U.base.data, V.base.data):
        raise InvalidArgumentError("V", "Tangent vectors live at different base points")
    return float(np.sum(U.data * V.data))


def retract(X: RealPoint, V, step: float) -> RealPoint:
    """
    Column-wise normalization of X + step * V.

    Args:
        X: Base point
        V: Tangent vector at X (or a raw 2xN matrix)
        step: Step length

    Returns:
        RealPoint: The retracted point; X itself when step is 0

    Raises:
        InvalidArgumentError: If step is not finite
        DegenerateRetractionError: If a column of X + step * V vanishes
    """
    if not math.isfinite(step):
        raise InvalidArgumentError("step", f"Step must be finite, got {step}")
    V = _as_matrix(V, X.data.shape)
    if step == 0:
        return X
    Y = X.data + step * V
    norms = np.linalg.norm(Y, axis=0)
    zero = np.flatnonzero(norms <= np.finfo(float).tiny)
    if zero.size:
        raise DegenerateRetractionError(f"Column {zero[0]} vanished after a step of {step}", int(zero[0]))
    return RealPoint(Y / norms, X.power_budget)


def transport(X_new: RealPoint, V) -> TangentVector:
    """Moves a tangent vector to the tangent space at X_new by projection."""
    return tangent_project(X_new, V)


def circle_random(n_antennas: int, radius: float, seed: Optional[int] = None) -> CirclePoint:
    """Draws uniform phases on the complex circle of the given radius."""
    if not isinstance(n_antennas, (int, np.integer)) or n_antennas < 1:
        raise InvalidDimensionError(f"N must be a positive integer, got {n_antennas}", ">= 1", n_antennas)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, int(n_antennas))
    return CirclePoint(radius * np.exp(1j * theta), radius)


def circle_project(x: CirclePoint, g) -> np.ndarray:
    """u_n = g_n - Re(g_n conj(x_n)) x_n / radius^2."""
    g = np.asarray(g, dtype=complex)
    if g.shape != x.data.shape:
        raise InvalidDimensionError(f"Expected a vector of length {x.data.size}, got shape {g.shape}",
                                    x.data.shape, g.shape)
    return g - np.real(g * np.conj(x.data)) * x.data / x.radius ** 2


def circle_retract(x: CirclePoint, v, step: float) -> CirclePoint:
    """
    Entrywise renormalization of x + step * v to the circle radius.

    Raises:
        DegenerateRetractionError: If an entry of x + step * v is zero
    """
    if not math.isfinite(step):
        raise InvalidArgumentError("step", f"Step must be finite, got {step}")
    v = np.asarray(v, dtype=complex)
    if v.shape != x.data.shape:
        raise InvalidDimensionError(f"Expected a vector of length {x.data.size}, got shape {v.shape}",
                                    x.data.shape, v.shape)
    if step == 0:
        return x
    y = x.data + step * v
    moduli = np.abs(y)
    zero = np.flatnonzero(moduli <= np.finfo(float).tiny)
    if zero.size:
        raise DegenerateRetractionError(f"Entry {zero[0]} vanished after a step of {step}", int(zero[0]))
    return CirclePoint(x.radius * y / moduli, x.radius)


class ObliqueGeometry:
    """Tangent-vector arithmetic on the oblique manifold, as used by the CG loop."""

    def inner(self, U: TangentVector, V: TangentVector) -> float:
        return metric(U, V)

    def transport(self, point: RealPoint, V: TangentVector) -> TangentVector:
        return transport(point, V)

    def retract(self, point: RealPoint, V: TangentVector, step: float) -> RealPoint:
        return retract(point, V, step)

    def combine(self, point: RealPoint, a: float, U: TangentVector, b: float, V: TangentVector) -> TangentVector:
        """a*U + b*V, both already tangent at point."""
        return TangentVector(a * U.data + b * V.data, point)

    def zero(self, point: RealPoint) -> TangentVector:
        return TangentVector(np.zeros_like(point.data), point)


class CircleGeometry:
    """Tangent-vector arithmetic on the complex circle; tangents are complex arrays."""

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.real(np.vdot(u, v)))

    def transport(self, point: CirclePoint, v: np.ndarray) -> np.ndarray:
        return circle_project(point, v)

    def retract(self, point: CirclePoint, v: np.ndarray, step: float) -> CirclePoint:
        return circle_retract(point, v, step)

    def combine(self, point: CirclePoint, a: float, u: np.ndarray, b: float, v: np.ndarray) -> np.ndarray:
        return a * u + b * v

    def zero(self, point: CirclePoint) -> np.ndarray:
        return np.zeros_like(point.data)


OBLIQUE = ObliqueGeometry()
CIRCLE = CircleGeometry()
