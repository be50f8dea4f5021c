"""Scalar losses, their subgradients, and empirical risk.

Three loss families are supported: the hinge loss of margin classifiers,
the logistic loss, and the quantile (check) loss. Hinge and logistic take
the raw linear score t = <x, beta> together with a label y in {-1, +1};
the quantile loss takes the residual t = y - <x, beta> with the response
already absorbed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LossFamily",
    "LossModel",
    "Dataset",
    "loss_value",
    "loss_subgradient",
    "empirical_risk",
]


class LossFamily(enum.Enum):
    HINGE = "hinge"
    LOGISTIC = "logistic"
    QUANTILE = "quantile"


@dataclass(frozen=True)
class LossModel:
    """A loss family plus the Lipschitz constant of the scalar loss.

    The quantile loss carries its level ``theta``; hinge and logistic are
    parameter-free. The scalar loss is ``lipschitz``-Lipschitz in its first
    argument: 1 for hinge and logistic, max(theta, 1 - theta) for quantile.
    """

    family: LossFamily
    theta: float | None = None

    def __post_init__(self):
        if self.family is LossFamily.QUANTILE:
            if self.theta is None or not 0.0 < self.theta < 1.0:
                raise ValueError("quantile level theta must lie strictly inside (0, 1)")
        elif self.theta is not None:
            raise ValueError(f"{self.family.value} loss takes no theta")

    @property
    def lipschitz(self) -> float:
        if self.family is LossFamily.QUANTILE:
            return max(self.theta, 1.0 - self.theta)
        return 1.0

    @classmethod
    def hinge(cls) -> "LossModel":
        return cls(LossFamily.HINGE)

    @classmethod
    def logistic(cls) -> "LossModel":
        return cls(LossFamily.LOGISTIC)

    @classmethod
    def quantile(cls, theta: float) -> "LossModel":
        return cls(LossFamily.QUANTILE, float(theta))


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable design matrix with its response vector.

    Arrays are copied on construction and marked read-only, so a Dataset can
    be shared freely across threads and fits.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True, order="C")
        y = np.array(self.y, dtype=np.float64, copy=True)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d array")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("X needs at least one row and one column")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("y must be 1-d with one entry per row of X")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise ValueError("X and y must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def require_binary_labels(self):
        """Raise unless every response is -1 or +1."""
        if not np.all(np.abs(self.y) == 1.0):
            raise ValueError("classification losses require labels in {-1, +1}")


def _check_scalar(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def _check_label(y):
    y = _check_scalar("y", y)
    if y not in (-1.0, 1.0):
        raise ValueError("classification losses require y in {-1, +1}")
    return y


def loss_value(model: LossModel, t, y) -> float:
    """Evaluate the scalar loss.

    ``t`` is the linear score for hinge/logistic and the residual for
    quantile (where ``y`` is ignored).
    """
    t = _check_scalar("t", t)
    if model.family is LossFamily.HINGE:
        y = _check_label(y)
        return max(0.0, 1.0 - y * t)
    if model.family is LossFamily.LOGISTIC:
        y = _check_label(y)
        z = y * t
        # stable log(1 + exp(-z))
        return math.log1p(math.exp(-abs(z))) + max(0.0, -z)
    _check_scalar("y", y)
    return (model.theta - (1.0 if t <= 0 else 0.0)) * t


def loss_subgradient(model: LossModel, t, y) -> float:
    """A subgradient of the scalar loss with respect to its first argument.

    At kinks the active-indicator convention is used: the hinge counts a
    margin of exactly 1 as active, the quantile loss counts t = 0 as the
    nonpositive branch. The result is bounded by ``model.lipschitz``.
    """
    t = _check_scalar("t", t)
    if model.family is LossFamily.HINGE:
        y = _check_label(y)
        return -y if 1.0 - y * t >= 0 else 0.0
    if model.family is LossFamily.LOGISTIC:
        y = _check_label(y)
        return float(-y * _expit(-y * t))
    _check_scalar("y", y)
    return model.theta - (1.0 if t <= 0 else 0.0)


def empirical_risk(model: LossModel, data: Dataset, beta: np.ndarray) -> float:
    """Mean loss of the linear model ``beta`` over all rows of ``data``."""
    beta = _check_coefficients(data, beta)
    scores = data.X @ beta
    if model.family is LossFamily.QUANTILE:
        r = data.y - scores
        return float(np.mean((model.theta - (r <= 0)) * r))
    data.require_binary_labels()
    z = data.y * scores
    if model.family is LossFamily.HINGE:
        return float(np.mean(np.maximum(0.0, 1.0 - z)))
    return float(np.mean(np.logaddexp(0.0, -z)))


def _check_coefficients(data: Dataset, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.p,):
        raise ValueError(f"beta must have shape ({data.p},), got {beta.shape}")
    if not np.all(np.isfinite(beta)):
        raise ValueError("beta must be finite")
    return beta


def _expit(x):
    """Numerically stable logistic sigmoid, scalar or array."""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))
