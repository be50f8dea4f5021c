"""Shared instance builders for solver tests."""

import numpy as np

from slopeclf import Dataset, LossModel, Regularizer, slope_weights_default

LOSS_KINDS = ("hinge", "logistic", "quantile")
REG_KINDS = ("l1", "l2", "slope")


def small_instance(seed, loss_kind, reg_kind, n_max=30, p_max=10):
    """A seeded (data, loss model, regularizer) triple with n <= 30, p <= 10."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(10, n_max + 1))
    p = int(rng.integers(3, p_max + 1))
    X = rng.standard_normal((n, p))
    if loss_kind == "quantile":
        beta_true = rng.standard_normal(p)
        y = X @ beta_true + rng.standard_normal(n)
        model = LossModel.quantile(float(rng.choice([0.3, 0.5, 0.9])))
    else:
        y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
        model = LossModel.hinge() if loss_kind == "hinge" else LossModel.logistic()
    data = Dataset(X, y)
    if reg_kind == "l1":
        reg = Regularizer.l1(1.0)
    elif reg_kind == "l2":
        reg = Regularizer.l2(1.0)
    else:
        reg = Regularizer.slope(slope_weights_default(p))
    return data, model, reg
