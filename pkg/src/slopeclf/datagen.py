"""Synthetic two-class Gaussian data and the reference coefficient direction.

Samples come from N(mu_plus, Sigma) for class +1 and N(-mu_plus, Sigma) for
class -1, where mu_plus has ones on the first k_star coordinates and Sigma is
equicorrelated: 1 on the diagonal, rho elsewhere. The reference direction is
obtained by refitting the loss with a negligible ridge penalty on the relevant
columns of a large fresh sample.

All randomness flows through numpy PCG64 generators derived from the
experiment seed with spawn keys (replication, role), role being one of
train / val / test, so every dataset is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import Dataset, LossFamily, LossModel
from .prox import Regularizer
from .smoothing import SmoothedLoss
from .solver import SolverConfig, fit

__all__ = [
    "ExperimentSpec",
    "stream",
    "generate",
    "theoretical_minimizer",
    "dataset_to_csv",
]

_ROLES = {"train": 0, "val": 1, "test": 2}

# tight solve used for the reference direction
_REFERENCE_RIDGE = 1e-6
_REFERENCE_CFG = dict(epsilon=1e-12, t_max=20000)


@dataclass(frozen=True)
class ExperimentSpec:
    """Size, sparsity, correlation, and seeding of one simulation setting."""

    n: int
    p: int
    k_star: int
    rho: float
    seed: int
    test_size: int = 10000
    val_size: int = 10000

    def __post_init__(self):
        if self.n < 1 or self.p < 1 or self.k_star < 1:
            raise ValueError("n, p, k_star must be positive")
        if self.k_star > self.p or self.k_star > self.n:
            raise ValueError("k_star must not exceed p or n")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.test_size < 1 or self.val_size < 1:
            raise ValueError("test_size and val_size must be positive")


def stream(spec: ExperimentSpec, replication: int, role: str) -> np.random.Generator:
    """Independent generator for one (replication, role) pair."""
    if role not in _ROLES:
        raise ValueError(f"role must be one of {sorted(_ROLES)}")
    seq = np.random.SeedSequence(spec.seed, spawn_key=(replication, _ROLES[role]))
    return np.random.Generator(np.random.PCG64(seq))


def class_mean(spec: ExperimentSpec) -> np.ndarray:
    """Mean vector of the +1 class: ones on the first k_star coordinates."""
    mu = np.zeros(spec.p)
    mu[: spec.k_star] = 1.0
    return mu


def generate(spec: ExperimentSpec, count: int, rng: np.random.Generator) -> Dataset:
    """Draw ``count`` labelled samples, half per class, rows shuffled.

    The equicorrelated covariance (1 - rho) I + rho 11' is sampled in closed
    form as sqrt(1 - rho) z + sqrt(rho) g 1 with g a per-row shared normal.
    """
    if count < 2 or count % 2 != 0:
        raise ValueError("count must be even (half the samples per class)")
    half = count // 2
    z = rng.standard_normal((count, spec.p))
    shared = rng.standard_normal(count)
    X = math.sqrt(1.0 - spec.rho) * z + math.sqrt(spec.rho) * shared[:, None]
    mu = class_mean(spec)
    X[:half] += mu
    X[half:] -= mu
    y = np.concatenate([np.ones(half), -np.ones(half)])
    perm = rng.permutation(count)
    return Dataset(X[perm], y[perm])


def theoretical_minimizer(spec: ExperimentSpec, loss: LossModel,
                          rng: np.random.Generator, tau: float | None = None) -> np.ndarray:
    """Reference coefficient vector, zero-padded to length p.

    Generates ``spec.test_size`` fresh samples, keeps the first k_star
    columns, solves the loss with a negligible ridge penalty at tight
    tolerance, and embeds the result into R^p.
    """
    if loss.family not in (LossFamily.HINGE, LossFamily.LOGISTIC):
        raise ValueError("reference direction is defined for hinge and logistic only")
    data = generate(spec, spec.test_size, rng)
    relevant = Dataset(data.X[:, : spec.k_star], data.y)
    smoothed = SmoothedLoss(loss, tau) if tau is not None else SmoothedLoss(loss)
    cfg = SolverConfig(tau=smoothed.tau, **_REFERENCE_CFG)
    result = fit(relevant, smoothed, Regularizer.l2(1.0), eta=_REFERENCE_RIDGE, cfg=cfg)
    out = np.zeros(spec.p)
    out[: spec.k_star] = result.beta
    return out


def dataset_to_csv(data: Dataset, path) -> None:
    """Write a dataset as CSV with columns y, x1, ..., xp."""
    header = ",".join(["y"] + [f"x{j}" for j in range(1, data.p + 1)])
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for i in range(data.n):
            row = [repr(float(data.y[i]))] + [repr(float(v)) for v in data.X[i]]
            fh.write(",".join(row) + "\n")
