"""
Geometry data models.

Points and tangent vectors of the 2xN oblique manifold, and points of the
N-dimensional complex circle used by the interference-reduction baseline.
All arrays are copied and made read-only on construction.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .. import config


def _frozen(array, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RealPoint:
    """
    A point X on the oblique manifold {X in R^(2xN) : every column has norm 1}.

    Row 1 is x_R * sqrt(N/P_T), row 2 is x_I * sqrt(N/P_T).

    Attributes:
        data: 2xN real matrix with unit-norm columns
        power_budget: Total transmit power P_T used when converting to the precoder
    """
    data: np.ndarray
    power_budget: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data, float))

    @property
    def n_antennas(self) -> int:
        return self.data.shape[1] if self.data.ndim == 2 else 0

    @property
    def scale(self) -> float:
        """sqrt(N/P_T), the factor between the precoder and the manifold point."""
        return float(np.sqrt(self.n_antennas / self.power_budget))

    def validate(self) -> List[str]:
        """
        Validates manifold membership.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []

        if self.data.ndim != 2 or self.data.shape[0] != 2:
            errors.append(f"Point must be a 2xN matrix, got shape {self.data.shape}.")
            return errors

        if self.n_antennas < 1:
            errors.append("Point must have at least one column.")

        if not np.all(np.isfinite(self.data)):
            errors.append("Point has non-finite entries.")
        elif self.n_antennas:
            deviation = np.max(np.abs(np.linalg.norm(self.data, axis=0) - 1.0))
            if deviation > config.MEMBERSHIP_TOL:
                errors.append(f"Column norms deviate from 1 by {deviation:.3e}.")

        if not self.power_budget > 0:
            errors.append("Power budget must be positive.")

        return errors

    def to_precoder(self) -> np.ndarray:
        """
        Recovers the complex constant-envelope precoder x = (row1 + j row2) / scale.

        Returns:
            np.ndarray: Complex vector of length N with modulus sqrt(P_T/N)
        """
        radius = np.sqrt(self.power_budget / self.n_antennas)
        # Columns are unit norm, so the angle gives the exact phase.
        theta = np.arctan2(self.data[1], self.data[0])
        return radius * np.exp(1j * theta)

    @classmethod
    def from_precoder(cls, x: np.ndarray, power_budget: float) -> "RealPoint":
        """Builds the manifold point of a precoder, normalizing each entry's phase."""
        x = np.asarray(x, dtype=complex)
        theta = np.angle(x)
        return cls(np.vstack([np.cos(theta), np.sin(theta)]), power_budget)


@dataclass(frozen=True)
class TangentVector:
    """
    A tangent vector U at a point X, satisfying diag(X^T U) = 0.

    Attributes:
        data: 2xN real matrix
        base: The point the vector is tangent at
    """
    data: np.ndarray
    base: RealPoint = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data, float))

    def validate(self) -> List[str]:
        """
        Validates the tangency condition.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if self.data.shape != self.base.data.shape:
            errors.append(f"Shape {self.data.shape} does not match base point {self.base.data.shape}.")
            return errors

        radial = np.einsum("ij,ij->j", self.base.data, self.data)
        if radial.size and np.max(np.abs(radial)) > config.TANGENCY_TOL:
            errors.append(f"Radial components up to {np.max(np.abs(radial)):.3e} exceed tangency tolerance.")
        return errors

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


@dataclass(frozen=True)
class CirclePoint:
    """
    A point on the complex circle manifold {x in C^N : |x_n| = radius}.

    Attributes:
        data: Complex vector of length N
        radius: Common modulus sqrt(P_T/N)
    """
    data: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data, complex))

    @property
    def n_antennas(self) -> int:
        return self.data.shape[0]

    def validate(self) -> List[str]:
        """
        Validates the constant-modulus condition.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if self.data.ndim != 1 or self.data.size < 1:
            errors.append(f"Circle point must be a non-empty vector, got shape {self.data.shape}.")
            return errors
        if not self.radius > 0:
            errors.append("Radius must be positive.")
            return errors
        deviation = np.max(np.abs(np.abs(self.data) - self.radius))
        if not deviation <= config.CIRCLE_TOL:
            errors.append(f"Entry moduli deviate from the radius by {deviation:.3e}.")
        return errors
