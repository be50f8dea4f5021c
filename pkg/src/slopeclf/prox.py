"""Proximal operators for the three supported regularizers.

L1 uses elementwise soft-thresholding, L2 a ridge shrinkage, and the sorted-L1
(slope) penalty a stack-based block-averaging algorithm: magnitudes are sorted
descending, the per-coordinate targets are pooled into blocks until the block
means are nonincreasing, negative means are clipped to zero, and the sort and
signs are undone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Regularizer",
    "slope_norm",
    "soft_threshold",
    "l2_shrink",
    "prox_sorted_l1",
    "apply_prox",
]


def _as_finite_vector(name, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    return x


def _check_slope_weights(weights) -> np.ndarray:
    weights = _as_finite_vector("weights", weights)
    if weights.size == 0:
        raise ValueError("slope weights must be non-empty")
    if np.any(weights <= 0):
        raise ValueError("slope weights must be strictly positive")
    if np.any(np.diff(weights) > 0):
        raise ValueError("slope weights must be nonincreasing")
    return weights


@dataclass(frozen=True, eq=False)
class Regularizer:
    """One of the penalties l1 / l2 / slope with its base strength.

    ``lam`` scales the l1 and l2 penalties; the slope penalty is described by
    a nonincreasing positive weight vector. Path solvers multiply the whole
    penalty by a separate strength eta, so ``lam`` is usually left at 1.
    """

    kind: str
    lam: float = 1.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "slope"):
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.kind == "slope":
            object.__setattr__(self, "weights", _check_slope_weights(self.weights))
        else:
            if self.weights is not None:
                raise ValueError(f"{self.kind} takes no weight vector")
            if self.lam < 0:
                raise ValueError("lam must be nonnegative")

    @classmethod
    def l1(cls, lam: float = 1.0) -> "Regularizer":
        return cls("l1", lam=float(lam))

    @classmethod
    def l2(cls, lam: float = 1.0) -> "Regularizer":
        return cls("l2", lam=float(lam))

    @classmethod
    def slope(cls, weights) -> "Regularizer":
        return cls("slope", weights=weights)

    def value(self, beta) -> float:
        """Penalty value at unit strength."""
        beta = _as_finite_vector("beta", beta)
        if self.kind == "l1":
            return float(self.lam * np.sum(np.abs(beta)))
        if self.kind == "l2":
            return float(0.5 * self.lam * np.dot(beta, beta))
        return slope_norm(self.weights, beta)


def slope_norm(weights, beta) -> float:
    """Sorted-L1 norm: weights dotted with the magnitudes sorted descending."""
    weights = _check_slope_weights(weights)
    beta = _as_finite_vector("beta", beta)
    if beta.shape != weights.shape:
        raise ValueError("weights and beta must have equal length")
    return float(np.dot(weights, np.sort(np.abs(beta))[::-1]))


def soft_threshold(gamma, lam: float) -> np.ndarray:
    """Elementwise sign(g) * max(|g| - lam, 0), the l1 prox."""
    gamma = _as_finite_vector("gamma", gamma)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return np.sign(gamma) * np.maximum(np.abs(gamma) - lam, 0.0)


def l2_shrink(gamma, lam: float) -> np.ndarray:
    """gamma / (1 + lam), the prox of (lam/2) * ||.||_2^2."""
    gamma = _as_finite_vector("gamma", gamma)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return gamma / (1.0 + lam)


def prox_sorted_l1(gamma, weights) -> np.ndarray:
    """Prox of the sorted-L1 norm: argmin_b 0.5*||b - gamma||^2 + slope_norm(weights, b).

    Signs and the (stable) descending magnitude order are recorded, the
    resulting isotone problem is solved by stack-based block averaging with a
    final clip at zero, and the permutation and signs are undone.
    """
    gamma = _as_finite_vector("gamma", gamma)
    weights = _check_slope_weights(weights)
    if gamma.shape != weights.shape:
        raise ValueError("gamma and weights must have equal length")
    signs = np.sign(gamma)
    magnitudes = np.abs(gamma)
    # stable sort: ties in |gamma| keep their original relative order
    order = np.argsort(-magnitudes, kind="stable")
    solved, _, _ = _stack_blocks(magnitudes[order] - weights)
    out = np.empty_like(gamma)
    out[order] = np.maximum(solved, 0.0)
    out *= signs
    return out


def _stack_blocks(v: np.ndarray):
    """Pool v into consecutive blocks with nonincreasing means.

    Returns (pooled vector, pushes, merges); negative means are NOT clipped
    here. Performs exactly len(v) pushes and at most len(v) - 1 merges.
    """
    p = v.shape[0]
    start = np.empty(p, dtype=np.intp)
    total = np.empty(p)
    mean = np.empty(p)
    top = -1
    pushes = merges = 0
    for k in range(p):
        top += 1
        pushes += 1
        start[top] = k
        total[top] = v[k]
        mean[top] = v[k]
        while top > 0 and mean[top - 1] <= mean[top]:
            merges += 1
            total[top - 1] += total[top]
            mean[top - 1] = total[top - 1] / (k - start[top - 1] + 1)
            top -= 1
    out = np.empty(p)
    for b in range(top + 1):
        end = start[b + 1] if b < top else p
        out[start[b]:end] = mean[b]
    return out, pushes, merges


def apply_prox(reg: Regularizer, gamma, step: float, eta: float) -> np.ndarray:
    """Prox of eta * reg scaled by the step size 1/D: weights become eta*step*lam."""
    gamma = _as_finite_vector("gamma", gamma)
    if step <= 0:
        raise ValueError("step must be positive")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0.0:
        return gamma.copy()
    scale = eta * step
    if reg.kind == "l1":
        return soft_threshold(gamma, scale * reg.lam)
    if reg.kind == "l2":
        return l2_shrink(gamma, scale * reg.lam)
    return prox_sorted_l1(gamma, scale * reg.weights)
