"""OLS model comparison and indoor-variant MAE evaluation.

Fits are solved through a QR decomposition (never the normal equations);
reported statistics are the determination coefficient, the Gaussian
log-likelihood at the ML variance, and the residual MSE with either the
degrees-of-freedom or the ML denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateLikelihoodError, FeatureMissingError,
                     InsufficientDataError, SingularDesignError, TunnelPropError,
                     UndefinedStatisticError)
from .features import FEATURE_FIELDS, feature_matrix
from .pathloss import (INDOOR_VARIANTS, IndoorLossModel, predict_rsrp,
                       predict_total_loss)

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class ModelSpec:
    """A named regression model: which features, and whether to fit an intercept."""

    id: str
    regressors: tuple[str, ...]
    include_intercept: bool = True

    def __post_init__(self):
        if not self.regressors:
            raise InsufficientDataError(f"model {self.id}: no regressors")
        for name in self.regressors:
            if name not in FEATURE_FIELDS:
                raise KeyError(f"model {self.id}: unknown regressor {name!r}")


# The seven comparison models of the study, all with intercept.
BUILTIN_MODELS = (
    ModelSpec("M1", ("d3d",)),
    ModelSpec("M2", ("d_in_2d",)),
    ModelSpec("M3", ("d_pen_3d",)),
    ModelSpec("M4", ("d_pen_3d", "d_in_2d")),
    ModelSpec("M5", ("d_cor_avg",)),
    ModelSpec("M6", ("d_pen_3d", "d_in_2d", "d_cor_avg")),
    ModelSpec("M7", ("azimuth_phi", "elevation_theta")),
)


@dataclass(frozen=True)
class RegressionFit:
    """OLS solution plus everything needed for the comparison statistics."""

    spec: ModelSpec | None
    coefficients: np.ndarray  # regressor coefficients, then intercept if present
    rss: float
    tss: float
    n: int
    p: int
    residuals: np.ndarray


@dataclass(frozen=True)
class EvaluationReport:
    model_rows: tuple[dict, ...] = ()
    variant_rows: tuple[dict, ...] = ()


def fit_ols(X, y, spec: ModelSpec | None = None, include_intercept: bool | None = None) -> RegressionFit:
    """Least-squares fit of y on the columns of X via QR."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise InsufficientDataError("X and y disagree on the number of rows")
    if include_intercept is None:
        include_intercept = spec.include_intercept if spec is not None else True
    design = np.column_stack([X, np.ones(len(y))]) if include_intercept else X
    n, p = design.shape
    if n <= p:
        raise InsufficientDataError(f"need more than {p} observations, got {n}")
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= _RANK_RTOL * max(diag.max(), 1.0):
        raise SingularDesignError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    residuals = y - design @ beta
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))
    return RegressionFit(spec, beta, rss, tss, n, p, residuals)


def r_squared(fit: RegressionFit) -> float:
    """1 - RSS/TSS with TSS about the mean of y."""
    if fit.tss == 0.0:
        raise UndefinedStatisticError("response is constant; R^2 undefined")
    return 1.0 - fit.rss / fit.tss


def log_likelihood(fit: RegressionFit) -> float:
    """Gaussian log-likelihood at the ML variance, in nats."""
    if fit.rss <= 1e-12 * max(fit.tss, 1.0):
        raise DegenerateLikelihoodError("zero residual sum of squares")
    n = fit.n
    return -0.5 * n * (math.log(2.0 * math.pi) + math.log(fit.rss / n) + 1.0)


def residual_mse(fit: RegressionFit, convention: str = "df") -> float:
    """Residual MSE: RSS/(n-p) by default, RSS/n under the 'ml' convention."""
    if convention == "df":
        return fit.rss / (fit.n - fit.p)
    if convention == "ml":
        return fit.rss / fit.n
    raise TunnelPropError(f"convention must be 'df' or 'ml', got {convention!r}")


def compare_models(specs, rows, rsrp=None, mse_convention: str = "df") -> EvaluationReport:
    """Fit every model spec on the feature rows; failed fits are flagged rows."""
    if rsrp is None:
        rsrp = [row.rsrp_dbm for row in rows]
    y = np.asarray(rsrp, dtype=float)
    out = []
    for spec in specs:
        row = {"id": spec.id, "r2": math.nan, "log_likelihood": math.nan,
               "residual_mse": math.nan, "error": ""}
        try:
            X = feature_matrix(rows, spec.regressors)
            if np.isnan(X).any():
                raise FeatureMissingError(
                    f"model {spec.id}: NaN feature values in {spec.regressors}")
            fit = fit_ols(X, y, spec=spec)
            row["r2"] = r_squared(fit)
            row["residual_mse"] = residual_mse(fit, mse_convention)
            try:
                row["log_likelihood"] = log_likelihood(fit)
            except DegenerateLikelihoodError:
                row["log_likelihood"] = math.inf  # perfect fit marker
        except TunnelPropError as exc:
            row["error"] = str(exc)
        out.append(row)
    return EvaluationReport(model_rows=tuple(out))


def mae_by_variant(cfg, rows, rsrp=None, variants=INDOOR_VARIANTS,
                   material_profile: str = "low_loss", rx_height: float = 1.5,
                   condition: str = "nlos") -> EvaluationReport:
    """Shadowing-free prediction MAE per indoor-loss variant, with quartiles."""
    if rsrp is None:
        rsrp = [row.rsrp_dbm for row in rows]
    y = np.asarray(rsrp, dtype=float)
    out = []
    for variant in variants:
        model = IndoorLossModel(variant)
        rec = {"variant": variant, "mae_db": math.nan, "q1": math.nan,
               "median": math.nan, "q3": math.nan, "error": ""}
        try:
            errors = []
            for row, observed in zip(rows, y):
                comps = predict_total_loss(cfg, row.features, model,
                                           material_profile=material_profile,
                                           rx_height=rx_height, condition=condition)
                errors.append(abs(predict_rsrp(cfg, comps) - observed))
            errors = np.asarray(errors)
            rec["mae_db"] = float(errors.mean())
            q1, med, q3 = np.percentile(errors, [25.0, 50.0, 75.0])
            rec.update(q1=float(q1), median=float(med), q3=float(q3))
            rec["abs_errors"] = errors
        except TunnelPropError as exc:
            rec["error"] = str(exc)
        out.append(rec)
    return EvaluationReport(variant_rows=tuple(out))
