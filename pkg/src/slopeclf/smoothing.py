"""Smoothed surrogates for the nonsmooth losses.

The hinge and quantile losses are replaced by a differentiable surrogate
obtained by regularizing their max-form dual with a quadratic penalty of
strength ``tau``: the surrogate sits within tau/2 below the original loss
and has a gradient with Lipschitz constant mu_max(X'X/n) / (4 tau). The
logistic loss is already smooth and passes through unchanged, with constant
mu_max(X'X/n) / 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .losses import Dataset, LossFamily, LossModel, _check_coefficients, _expit, empirical_risk

__all__ = [
    "DEFAULT_TAU",
    "SmoothedLoss",
    "dual_weights",
    "smoothed_risk",
    "smoothed_gradient",
    "lipschitz_constant",
    "gram_spectral_norm",
]

DEFAULT_TAU = 0.2

# Estimated curvature constants are inflated by this factor so the step size
# 1/C stays valid under power-iteration error.
SAFETY_FACTOR = 1.01


def dual_weights(z, tau):
    """Optimal dual variables of the smoothed max: clip(z / (2 tau), -1, 1)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return np.clip(np.asarray(z, dtype=np.float64) / (2.0 * tau), -1.0, 1.0)


@dataclass(eq=False)
class SmoothedLoss:
    """A loss family paired with a smoothing level.

    ``lipschitz(data)`` returns the gradient's Lipschitz bound for that
    design, cached after the first computation; the cache is populated before
    any sharing, so instances are safe for concurrent reads afterwards.
    """

    base: LossModel
    tau: float = DEFAULT_TAU
    seed: int = 0
    _cache: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def lipschitz(self, data: Dataset) -> float:
        if self._cache is None or self._cache[0] is not data:
            value = lipschitz_constant(data, self.tau, self.base.family, seed=self.seed)
            self._cache = (data, value)
        return self._cache[1]


def _margins_from_scores(base: LossModel, y: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """The dual argument z per sample: 1 - y*score for hinge, residual for quantile."""
    if base.family is LossFamily.HINGE:
        return 1.0 - y * scores
    return y - scores


def _risk_from_scores(s: SmoothedLoss, y: np.ndarray, scores: np.ndarray) -> float:
    base = s.base
    n = y.shape[0]
    if base.family is LossFamily.LOGISTIC:
        return float(np.mean(np.logaddexp(0.0, -y * scores)))
    z = _margins_from_scores(base, y, scores)
    w = dual_weights(z, s.tau)
    a = 1.0 if base.family is LossFamily.HINGE else 2.0 * base.theta - 1.0
    return float(np.sum(a * z + w * z) / (2.0 * n) - s.tau * np.dot(w, w) / (2.0 * n))


def _gradient_coefficients(s: SmoothedLoss, y: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Per-sample vector u with gradient = -X'u / n."""
    base = s.base
    if base.family is LossFamily.LOGISTIC:
        return y * _expit(-y * scores)
    z = _margins_from_scores(base, y, scores)
    w = dual_weights(z, s.tau)
    if base.family is LossFamily.HINGE:
        return 0.5 * (1.0 + w) * y
    # residual chain rule: d z / d beta = -x, so the per-sample
    # coefficient (2 theta - 1 + w) multiplies x directly
    return 0.5 * (2.0 * base.theta - 1.0 + w)


def smoothed_risk(s: SmoothedLoss, data: Dataset, beta) -> float:
    """Value of the smoothed empirical risk at ``beta``.

    Logistic delegates to the exact empirical risk. For hinge and quantile
    the dual variables are closed-form, so this evaluates the penalized dual
    maximum directly.
    """
    beta = _check_coefficients(data, beta)
    if s.base.family is LossFamily.LOGISTIC:
        return empirical_risk(s.base, data, beta)
    if s.base.family is LossFamily.HINGE:
        data.require_binary_labels()
    return _risk_from_scores(s, data.y, data.X @ beta)


def smoothed_gradient(s: SmoothedLoss, data: Dataset, beta) -> np.ndarray:
    """Gradient of the smoothed empirical risk at ``beta``."""
    beta = _check_coefficients(data, beta)
    if s.base.family is not LossFamily.QUANTILE:
        data.require_binary_labels()
    u = _gradient_coefficients(s, data.y, data.X @ beta)
    return -(data.X.T @ u) / data.n


def lipschitz_constant(data: Dataset, tau: float, family: LossFamily, seed: int = 0) -> float:
    """Lipschitz bound for the smoothed gradient, with a 1% safety margin.

    Returns mu_max(X'X/n) / (4 tau) for hinge and quantile, mu_max(X'X/n) / 4
    for logistic. An all-zero design gives 0, which fits must reject.
    """
    mu = gram_spectral_norm(data.X, seed=seed)
    if mu == 0.0:
        return 0.0
    if family is LossFamily.LOGISTIC:
        return SAFETY_FACTOR * mu / 4.0
    if tau <= 0:
        raise ValueError("tau must be positive")
    return SAFETY_FACTOR * mu / (4.0 * tau)


def gram_spectral_norm(X, rel_tol: float = 1e-8, max_iter: int = 1000, seed: int = 0) -> float:
    """Largest eigenvalue of X'X/n by power iteration.

    The start vector is a seeded pseudo-random unit vector, so the result is
    deterministic for a given seed.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.any(X):
        return 0.0
    n, p = X.shape
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(p)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iter):
        w = X.T @ (X @ v) / n
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            # start vector fell in the null space; re-randomize
            v = rng.standard_normal(p)
            v /= np.linalg.norm(v)
            continue
        v = w / lam
        if abs(lam - estimate) <= rel_tol * lam:
            return lam
        estimate = lam
    return estimate
