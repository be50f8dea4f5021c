import math

import numpy as np
import pytest

from helpers import small_instance
from oracles import proximal_gradient_reference
from slopeclf import (
    Dataset,
    DivergenceError,
    LossModel,
    PathResult,
    Regularizer,
    SmoothedLoss,
    SolverConfig,
    apply_prox,
    composite_objective,
    eta_max,
    fit,
    fit_path,
    slope_weights_default,
    smoothed_gradient,
)
from slopeclf.solver import _next_momentum


def binary_data(rng, n=25, p=6):
    X = rng.standard_normal((n, p))
    y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
    return Dataset(X, y)


class TestSlopeWeights:
    def test_formula(self):
        for p in (1, 2, 5, 40):
            w = slope_weights_default(p)
            j = np.arange(1, p + 1)
            assert np.allclose(w, np.sqrt(np.log(2 * p * math.e / j)), atol=1e-15)

    def test_single_coordinate(self):
        assert slope_weights_default(1)[0] == pytest.approx(math.sqrt(math.log(2 * math.e)))

    def test_two_coordinates(self):
        w = slope_weights_default(2)
        assert w[0] == pytest.approx(math.sqrt(math.log(4 * math.e)), abs=1e-12)
        assert w[1] == pytest.approx(math.sqrt(math.log(2 * math.e)), abs=1e-12)

    def test_strictly_decreasing_positive_ends_at_log2e(self):
        for p in (1, 3, 17, 200):
            w = slope_weights_default(p)
            assert np.all(np.diff(w) < 0) or p == 1
            assert w[-1] == pytest.approx(math.sqrt(math.log(2 * math.e)), abs=1e-12)
            assert np.all(w > 0)

    def test_rejects_nonpositive_p(self):
        with pytest.raises(ValueError):
            slope_weights_default(0)


class TestMomentum:
    def test_first_values(self):
        q2 = _next_momentum(1.0)
        assert q2 == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)
        q3 = _next_momentum(q2)
        assert q3 == pytest.approx(2.193527085331054, abs=1e-12)

    def test_grows_at_least_linearly(self):
        q = 1.0
        for t in range(1, 60):
            assert q >= (t + 1) / 2 - 1e-12
            q = _next_momentum(q)


class TestFit:
    def test_zero_is_fixed_point_at_large_eta(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        reg = Regularizer.l1(1.0)
        eta = 1.01 * eta_max(data, s, reg)
        result = fit(data, s, reg, eta)
        assert np.array_equal(result.beta, np.zeros(data.p))
        assert result.converged
        assert result.iterations == 1

    def test_iterations_bounded_and_trace_shape(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        cfg = SolverConfig(t_max=40, epsilon=0.0)
        result = fit(data, s, Regularizer.l1(1.0), 0.01, cfg=cfg)
        assert result.iterations == 40
        assert not result.converged
        assert result.objective_trace.shape == (41,)

    def test_returned_objective_is_best_of_trace(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        result = fit(data, s, Regularizer.slope(slope_weights_default(data.p)), 0.02)
        assert result.objective == pytest.approx(result.objective_trace.min(), abs=1e-15)

    def test_objective_no_worse_than_zero_vector(self, rng):
        for seed in range(5):
            data, model, reg = small_instance(seed, "hinge", "slope")
            s = SmoothedLoss(model, 0.2)
            eta = 0.25 * eta_max(data, s, reg)
            result = fit(data, s, reg, eta)
            zero_obj = composite_objective(s, data, reg, eta, np.zeros(data.p))
            assert result.objective <= zero_obj + 1e-15

    def test_fixed_point_residual_at_convergence(self, rng):
        cfg = SolverConfig(epsilon=1e-12, t_max=20000)
        for seed in (3, 4):
            for loss_kind in ("hinge", "logistic", "quantile"):
                data, model, reg = small_instance(seed, loss_kind, "slope")
                s = SmoothedLoss(model, 0.2)
                eta = 0.3 * eta_max(data, s, Regularizer.l1(1.0))
                result = fit(data, s, reg, eta, cfg=cfg)
                assert result.converged
                step = 1.0 / s.lipschitz(data)
                grad = smoothed_gradient(s, data, result.beta)
                pulled = apply_prox(reg, result.beta - step * grad, step, eta)
                assert np.linalg.norm(result.beta - pulled) <= 10 * math.sqrt(cfg.epsilon)

    def test_matches_reference_solver_quick(self):
        cfg = SolverConfig(epsilon=1e-13, t_max=10000)
        for seed, (loss_kind, reg_kind) in enumerate(
                [("hinge", "l1"), ("logistic", "slope"), ("quantile", "l2")]):
            data, model, reg = small_instance(seed + 100, loss_kind, reg_kind)
            s = SmoothedLoss(model, 0.2)
            eta = 0.3 * eta_max(data, s, Regularizer.l1(1.0))
            result = fit(data, s, reg, eta, cfg=cfg)
            reference = proximal_gradient_reference(data, s, reg, eta, max_iter=200000)
            ref_obj = composite_objective(s, data, reg, eta, reference)
            assert result.objective == pytest.approx(ref_obj, abs=1e-6)

    def test_warm_start_initialization(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        first = fit(data, s, Regularizer.l1(1.0), 0.05)
        resumed = fit(data, s, Regularizer.l1(1.0), 0.05, init=first.beta)
        assert resumed.iterations <= first.iterations

    def test_zero_design_rejected(self):
        data = Dataset(np.zeros((4, 2)), np.array([1.0, -1.0, 1.0, -1.0]))
        with pytest.raises(ValueError):
            fit(data, SmoothedLoss(LossModel.hinge()), Regularizer.l1(1.0), 0.1)

    def test_step_override_validation(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        c = s.lipschitz(data)
        with pytest.raises(ValueError):
            fit(data, s, Regularizer.l1(1.0), 0.1, cfg=SolverConfig(step_override=c / 2))
        ok = fit(data, s, Regularizer.l1(1.0), 0.1, cfg=SolverConfig(step_override=2 * c))
        assert np.all(np.isfinite(ok.beta))

    def test_divergence_detected_with_poisoned_curvature(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        s._cache = (data, 5e-324)  # curvature so small the step overflows
        with pytest.raises(DivergenceError):
            fit(data, s, Regularizer.l1(1.0), 0.0, cfg=SolverConfig(t_max=50, epsilon=0.0))

    def test_negative_eta_rejected(self, rng):
        data = binary_data(rng)
        with pytest.raises(ValueError):
            fit(data, SmoothedLoss(LossModel.hinge()), Regularizer.l1(1.0), -0.1)


class TestEtaMax:
    def test_l1_hinge_closed_form(self, rng):
        data = binary_data(rng)
        tau = 0.2
        s = SmoothedLoss(LossModel.hinge(), tau)
        w0 = min(1.0, 1.0 / (2 * tau))
        expected = np.max(np.abs((1 + w0) * (data.X.T @ data.y) / (2 * data.n)))
        assert eta_max(data, s, Regularizer.l1(1.0)) == pytest.approx(expected, rel=1e-12)

    def test_fit_returns_zero_just_above_eta_max(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        for reg in (Regularizer.l1(1.0), Regularizer.slope(slope_weights_default(data.p))):
            result = fit(data, s, reg, 1.01 * eta_max(data, s, reg))
            assert np.array_equal(result.beta, np.zeros(data.p))

    def test_fit_moves_just_below_eta_max(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        reg = Regularizer.l1(1.0)
        result = fit(data, s, reg, 0.99 * eta_max(data, s, reg))
        assert np.any(result.beta != 0)

    def test_slope_with_constant_weights_matches_l1(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        lam = 0.7
        slope_val = eta_max(data, s, Regularizer.slope(np.full(data.p, lam)))
        l1_val = eta_max(data, s, Regularizer.l1(1.0))
        assert slope_val == pytest.approx(l1_val / lam, rel=1e-12)

    def test_l2_uses_max_row_norm(self, rng):
        data = binary_data(rng)
        expected = max(np.dot(row, row) for row in data.X)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        assert eta_max(data, s, Regularizer.l2(1.0)) == pytest.approx(expected, rel=1e-12)


class TestFitPath:
    def test_grid_endpoints(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        path = fit_path(data, s, Regularizer.l1(1.0), grid_size=3,
                        cfg=SolverConfig(t_max=200))
        top = 1.01 * eta_max(data, s, Regularizer.l1(1.0))
        assert np.allclose(path.etas, top * np.array([1.0, 1e-2, 1e-4]), rtol=1e-12)

    def test_first_point_is_zero_for_l1_and_slope(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        for reg in (Regularizer.l1(1.0), Regularizer.slope(slope_weights_default(data.p))):
            path = fit_path(data, s, reg, grid_size=5, cfg=SolverConfig(t_max=500))
            assert np.array_equal(path.fits[0].beta, np.zeros(data.p))

    def test_path_objectives_beat_zero_vector(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.hinge(), 0.2)
        reg = Regularizer.slope(slope_weights_default(data.p))
        path = fit_path(data, s, reg, grid_size=8, cfg=SolverConfig(t_max=800))
        for eta, fres in zip(path.etas, path.fits):
            zero_obj = composite_objective(s, data, reg, float(eta), np.zeros(data.p))
            assert fres.objective <= zero_obj + 1e-12

    def test_etas_strictly_decreasing(self, rng):
        data = binary_data(rng)
        s = SmoothedLoss(LossModel.logistic())
        path = fit_path(data, s, Regularizer.l2(1.0), grid_size=10,
                        cfg=SolverConfig(t_max=100))
        assert np.all(np.diff(path.etas) < 0)
        assert len(path.fits) == 10

    def test_grid_size_validation(self, rng):
        data = binary_data(rng)
        with pytest.raises(ValueError):
            fit_path(data, SmoothedLoss(LossModel.logistic()), Regularizer.l1(1.0), grid_size=1)


class TestConfigAndResults:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(epsilon=-1.0)
        with pytest.raises(ValueError):
            SolverConfig(t_max=0)
        with pytest.raises(ValueError):
            SolverConfig(tau=0.0)
        with pytest.raises(ValueError):
            SolverConfig(step_override=-1.0)

    def test_path_result_validation(self):
        with pytest.raises(ValueError):
            PathResult(etas=np.array([1.0, 2.0]), fits=[None, None])
        with pytest.raises(ValueError):
            PathResult(etas=np.array([2.0, 1.0]), fits=[None])
