"""Benchmark harness: method comparison tables and an error-rate scaling check.

``run_table`` compares l1-, l2-, and slope-regularized fits of the svm and
logistic losses on synthetic Gaussian data: per replication it fits a full
penalty path on a training split, picks the path point with the lowest
misclassification on a validation split, and scores the direction error
against the reference coefficients plus misclassification on a test split.

``run_rate_check`` regresses the log mean direction error on the log of
(k_star / n) * log(p / k_star) over a grid of problem sizes; the expected
log-log slope is one half.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .datagen import ExperimentSpec, generate, stream, theoretical_minimizer
from .losses import Dataset, LossModel
from .prox import Regularizer
from .smoothing import SmoothedLoss
from .solver import PathResult, SolverConfig, fit_path, slope_weights_default

__all__ = [
    "METHOD_ORDER",
    "LOSS_ORDER",
    "TableRow",
    "TableAggregate",
    "MetricsReport",
    "RatePoint",
    "RateCheckReport",
    "run_table",
    "run_rate_check",
    "emit_report",
]

METHOD_ORDER = ("l1", "l2", "slope")
LOSS_ORDER = ("svm", "logreg")

# direction error assigned to an all-zero estimate, flagged as degenerate
DEGENERATE_ERROR = math.sqrt(2.0)


def _loss_model(name: str) -> LossModel:
    if name == "svm":
        return LossModel.hinge()
    if name == "logreg":
        return LossModel.logistic()
    raise ValueError(f"unknown loss {name!r} (expected svm or logreg)")


def _regularizer(method: str, p: int) -> Regularizer:
    if method == "l1":
        return Regularizer.l1(1.0)
    if method == "l2":
        return Regularizer.l2(1.0)
    if method == "slope":
        return Regularizer.slope(slope_weights_default(p))
    raise ValueError(f"unknown method {method!r} (expected l1, l2 or slope)")


def _canonical(requested, order, what):
    requested = tuple(requested)
    if not requested:
        raise ValueError(f"at least one {what} required")
    for name in requested:
        if name not in order:
            raise ValueError(f"unknown {what} {name!r} (expected one of {', '.join(order)})")
    return tuple(name for name in order if name in requested)


def predict_labels(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """sign(<x, beta>) with exact zeros predicted as +1."""
    return np.where(X @ beta < 0, -1.0, 1.0)


def misclassification(data: Dataset, beta: np.ndarray) -> float:
    return float(np.mean(predict_labels(data.X, beta) != data.y))


def direction_error(beta_hat: np.ndarray, beta_star: np.ndarray):
    """L2 distance between the unit-normalized vectors; (sqrt(2), True) if beta_hat = 0."""
    norm_hat = np.linalg.norm(beta_hat)
    norm_star = np.linalg.norm(beta_star)
    if norm_star == 0:
        raise ValueError("reference coefficients are identically zero")
    if norm_hat == 0:
        return DEGENERATE_ERROR, True
    return float(np.linalg.norm(beta_hat / norm_hat - beta_star / norm_star)), False


def _select_on_validation(path: PathResult, val: Dataset):
    """Index of the path point with lowest validation misclassification.

    Ties resolve to the smallest index, i.e. the largest eta.
    """
    betas = np.column_stack([f.beta for f in path.fits])
    scores = val.X @ betas
    preds = np.where(scores < 0, -1.0, 1.0)
    errors = np.mean(preds != val.y[:, None], axis=0)
    return int(np.argmin(errors)), errors


@dataclass(frozen=True)
class TableRow:
    method: str
    loss: str
    replication: int
    selected_eta: float
    l2_estimation_error: float
    misclassification: float
    degenerate: bool


@dataclass(frozen=True)
class TableAggregate:
    method: str
    loss: str
    replications: int
    l2_estimation_error: float
    l2_estimation_error_stderr: float
    misclassification: float
    misclassification_stderr: float
    degenerate_count: int


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Per-replication rows plus per-(method, loss) aggregates."""

    spec: ExperimentSpec
    replications: int
    methods: tuple
    losses: tuple
    grid_size: int
    rows: list

    def aggregates(self) -> list:
        out = []
        for loss in self.losses:
            for method in self.methods:
                group = [r for r in self.rows if r.method == method and r.loss == loss]
                if not group:
                    continue
                l2 = np.array([r.l2_estimation_error for r in group])
                misc = np.array([r.misclassification for r in group])
                out.append(TableAggregate(
                    method=method,
                    loss=loss,
                    replications=len(group),
                    l2_estimation_error=float(np.mean(l2)),
                    l2_estimation_error_stderr=_stderr(l2),
                    misclassification=float(np.mean(misc)),
                    misclassification_stderr=_stderr(misc),
                    degenerate_count=sum(r.degenerate for r in group),
                ))
        return out

    def aggregate(self, method: str, loss: str) -> TableAggregate:
        for agg in self.aggregates():
            if agg.method == method and agg.loss == loss:
                return agg
        raise KeyError((method, loss))


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def _replication_rows(spec: ExperimentSpec, rep: int, methods, losses,
                      grid_size: int, cfg: SolverConfig) -> list:
    train = generate(spec, spec.n, stream(spec, rep, "train"))
    val = generate(spec, spec.val_size, stream(spec, rep, "val"))
    test = generate(spec, spec.test_size, stream(spec, rep, "test"))
    rows = []
    for loss_name in losses:
        base = _loss_model(loss_name)
        # the reference direction is fit on the same draws as the test split
        beta_star = theoretical_minimizer(spec, base, stream(spec, rep, "test"), tau=cfg.tau)
        smoothed = SmoothedLoss(base, cfg.tau, seed=spec.seed)
        for method in methods:
            reg = _regularizer(method, spec.p)
            path = fit_path(train, smoothed, reg, grid_size=grid_size, cfg=cfg)
            idx, _ = _select_on_validation(path, val)
            beta_hat = path.fits[idx].beta
            l2e, degenerate = direction_error(beta_hat, beta_star)
            rows.append(TableRow(
                method=method,
                loss=loss_name,
                replication=rep,
                selected_eta=float(path.etas[idx]),
                l2_estimation_error=l2e,
                misclassification=misclassification(test, beta_hat),
                degenerate=degenerate,
            ))
    return rows


def run_table(spec: ExperimentSpec, replications: int,
              methods=METHOD_ORDER, losses=LOSS_ORDER,
              grid_size: int = 50, cfg: SolverConfig | None = None) -> MetricsReport:
    """Fit every (method, loss) pair over ``replications`` independent draws."""
    if replications < 1:
        raise ValueError("replications must be positive")
    methods = _canonical(methods, METHOD_ORDER, "method")
    losses = _canonical(losses, LOSS_ORDER, "loss")
    cfg = cfg or SolverConfig()
    rows = []
    for rep in range(replications):
        rows.extend(_replication_rows(spec, rep, methods, losses, grid_size, cfg))
    rows.sort(key=lambda r: (LOSS_ORDER.index(r.loss), METHOD_ORDER.index(r.method), r.replication))
    return MetricsReport(spec=spec, replications=replications, methods=methods,
                         losses=losses, grid_size=grid_size, rows=rows)


@dataclass(frozen=True)
class RatePoint:
    n: int
    p: int
    k_star: int
    rate_variable: float
    mean_error: float
    stderr: float
    replications: int


@dataclass(frozen=True, eq=False)
class RateCheckReport:
    """Mean direction errors over a size grid and the fitted log-log slope."""

    points: list
    slope: float
    slope_stderr: float
    intercept: float
    loss: str
    method: str

    def __post_init__(self):
        if len({round(pt.rate_variable, 12) for pt in self.points}) < 4:
            raise ValueError("rate grid needs at least 4 distinct rate-variable values")


def _rate_variable(n: int, p: int, k_star: int) -> float:
    if p <= k_star:
        raise ValueError("rate variable requires p > k_star")
    return (k_star / n) * math.log(p / k_star)


def run_rate_check(base: ExperimentSpec, grid, replications: int,
                   loss: str = "logreg", method: str = "slope",
                   grid_size: int = 50, cfg: SolverConfig | None = None) -> RateCheckReport:
    """Estimate how the mean direction error scales along ``grid``.

    ``grid`` is a sequence of (n, p, k_star) triples; it must yield at least 4
    distinct values of (k_star / n) * log(p / k_star), otherwise the
    regression is refused.
    """
    if replications < 1:
        raise ValueError("replications must be positive")
    (loss,) = _canonical([loss], LOSS_ORDER, "loss")
    (method,) = _canonical([method], METHOD_ORDER, "method")
    grid = [(int(n), int(p), int(k)) for n, p, k in grid]
    rate_values = [_rate_variable(n, p, k) for n, p, k in grid]
    if len({round(v, 12) for v in rate_values}) < 4:
        raise ValueError("rate grid needs at least 4 distinct rate-variable values")
    cfg = cfg or SolverConfig()

    points = []
    for (n, p, k), rate in zip(grid, rate_values):
        spec = replace(base, n=n, p=p, k_star=k)
        errors = []
        for rep in range(replications):
            rows = _replication_rows(spec, rep, (method,), (loss,), grid_size, cfg)
            errors.append(rows[0].l2_estimation_error)
        errors = np.array(errors)
        points.append(RatePoint(
            n=n, p=p, k_star=k, rate_variable=rate,
            mean_error=float(np.mean(errors)), stderr=_stderr(errors),
            replications=replications,
        ))

    x = np.log([pt.rate_variable for pt in points])
    y = np.log([pt.mean_error for pt in points])
    slope, slope_stderr, intercept = _ols_slope(x, y)
    return RateCheckReport(points=points, slope=slope, slope_stderr=slope_stderr,
                           intercept=intercept, loss=loss, method=method)


def _ols_slope(x: np.ndarray, y: np.ndarray):
    x_centered = x - np.mean(x)
    sxx = float(np.dot(x_centered, x_centered))
    if sxx == 0.0:
        raise ValueError("regression refused: no variation in the rate variable")
    slope = float(np.dot(x_centered, y) / sxx)
    intercept = float(np.mean(y) - slope * np.mean(x))
    residuals = y - (intercept + slope * x)
    dof = x.size - 2
    stderr = math.sqrt(float(np.dot(residuals, residuals)) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr, intercept


# ---------------------------------------------------------------------------
# report emission

TABLE_CSV_COLUMNS = (
    "method", "loss", "n", "p", "k_star", "rho", "seed", "replication",
    "aggregate", "selected_eta", "l2_estimation_error",
    "l2_estimation_error_stderr", "misclassification",
    "misclassification_stderr", "degenerate",
)

RATE_CSV_COLUMNS = (
    "n", "p", "k_star", "rate_variable", "mean_l2_estimation_error",
    "l2_estimation_error_stderr", "replications", "aggregate",
    "slope", "slope_stderr",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_csv(report: MetricsReport) -> str:
    spec = report.spec
    lines = [",".join(TABLE_CSV_COLUMNS)]
    for row in report.rows:
        lines.append(",".join(_fmt(v) for v in (
            row.method, row.loss, spec.n, spec.p, spec.k_star, spec.rho, spec.seed,
            row.replication, 0, row.selected_eta, row.l2_estimation_error, None,
            row.misclassification, None, row.degenerate,
        )))
    for agg in report.aggregates():
        lines.append(",".join(_fmt(v) for v in (
            agg.method, agg.loss, spec.n, spec.p, spec.k_star, spec.rho, spec.seed,
            None, 1, None, agg.l2_estimation_error, agg.l2_estimation_error_stderr,
            agg.misclassification, agg.misclassification_stderr, agg.degenerate_count,
        )))
    return "\n".join(lines) + "\n"


def _table_markdown(report: MetricsReport) -> str:
    spec = report.spec
    lines = [
        f"Setting: n={spec.n}, p={spec.p}, k*={spec.k_star}, rho={spec.rho}, "
        f"{report.replications} replications",
        "",
        "| Method | Loss | L2-E | Misc (%) |",
        "| --- | --- | --- | --- |",
    ]
    for agg in report.aggregates():
        lines.append(
            f"| {agg.method} | {agg.loss} | {agg.l2_estimation_error:.2f} "
            f"| {100.0 * agg.misclassification:.2f} |"
        )
    return "\n".join(lines) + "\n"


def _rate_csv(report: RateCheckReport) -> str:
    lines = [",".join(RATE_CSV_COLUMNS)]
    for pt in report.points:
        lines.append(",".join(_fmt(v) for v in (
            pt.n, pt.p, pt.k_star, pt.rate_variable, pt.mean_error,
            pt.stderr, pt.replications, 0, None, None,
        )))
    lines.append(",".join(_fmt(v) for v in (
        None, None, None, None, None, None, None, 1, report.slope, report.slope_stderr,
    )))
    return "\n".join(lines) + "\n"


def _rate_markdown(report: RateCheckReport) -> str:
    lines = [
        f"Rate check for {report.method} / {report.loss}: "
        f"log-log slope {report.slope:.3f} (stderr {report.slope_stderr:.3f})",
        "",
        "| n | p | k* | rate variable | mean L2-E | stderr |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for pt in report.points:
        lines.append(
            f"| {pt.n} | {pt.p} | {pt.k_star} | {pt.rate_variable:.5f} "
            f"| {pt.mean_error:.4f} | {pt.stderr:.4f} |"
        )
    return "\n".join(lines) + "\n"


def emit_report(report, format: str = "csv", path=None) -> str:
    """Render a report as csv or markdown; write it to ``path`` unless None.

    Identical reports render to identical bytes: floats are emitted with
    shortest round-trip repr and the row order is fixed.
    """
    if format not in ("csv", "markdown"):
        raise ValueError("format must be csv or markdown")
    if isinstance(report, MetricsReport):
        text = _table_csv(report) if format == "csv" else _table_markdown(report)
    elif isinstance(report, RateCheckReport):
        text = _rate_csv(report) if format == "csv" else _rate_markdown(report)
    else:
        raise ValueError(f"unknown report type {type(report).__name__}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
