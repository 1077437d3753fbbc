"""Second-degree feature scaling: standard, range and power (Yeo-Johnson).

Standard scaling uses the population (1/n) variance. Power scaling fits a
per-column Yeo-Johnson exponent by maximum likelihood and standardizes the
transformed values. Constant columns cannot be scaled meaningfully; they are
flagged, emitted as zeros, and restored exactly on inversion.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ValidationError

LAMBDA_BOUNDS = (-5.0, 5.0)


class ScalerMethod(enum.Enum):
    STANDARD = "standard"
    RANGE = "range"
    POWER = "power"


@dataclass(frozen=True)
class ScalerModel:
    """Fitted per-column scaling parameters, sufficient for exact inversion."""

    method: ScalerMethod
    n_columns: int
    mean: np.ndarray | None = None       # standard / power
    std: np.ndarray | None = None        # standard / power
    col_min: np.ndarray | None = None    # range
    col_max: np.ndarray | None = None    # range
    lmbda: np.ndarray | None = None      # power
    constant_columns: tuple[int, ...] = ()
    constant_values: dict[int, float] = field(default_factory=dict)


def yeo_johnson(x: np.ndarray, lmbda: float) -> np.ndarray:
    """Yeo-Johnson power transform, strictly increasing in x for every lambda."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    if abs(lmbda) < 1e-12:
        out[pos] = np.log1p(x[pos])
    else:
        out[pos] = (np.power(x[pos] + 1.0, lmbda) - 1.0) / lmbda
    if abs(lmbda - 2.0) < 1e-12:
        out[~pos] = -np.log1p(-x[~pos])
    else:
        out[~pos] = -(np.power(1.0 - x[~pos], 2.0 - lmbda) - 1.0) / (2.0 - lmbda)
    return out


def yeo_johnson_inverse(y: np.ndarray, lmbda: float) -> np.ndarray:
    """Exact inverse of :func:`yeo_johnson` (sign of y selects the branch)."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pos = y >= 0
    if abs(lmbda) < 1e-12:
        out[pos] = np.expm1(y[pos])
    else:
        out[pos] = np.power(y[pos] * lmbda + 1.0, 1.0 / lmbda) - 1.0
    if abs(lmbda - 2.0) < 1e-12:
        out[~pos] = -np.expm1(-y[~pos])
    else:
        out[~pos] = 1.0 - np.power(1.0 - y[~pos] * (2.0 - lmbda), 1.0 / (2.0 - lmbda))
    return out


def yeo_johnson_loglik(x: np.ndarray, lmbda: float) -> float:
    """Gaussian profile log-likelihood of the transformed sample (shifted by
    constants that do not depend on lambda)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    y = yeo_johnson(x, lmbda)
    var = y.var()
    if var <= 0:
        return -np.inf
    jacobian = (lmbda - 1.0) * np.sum(np.sign(x) * np.log1p(np.abs(x)))
    return -0.5 * n * np.log(var) + jacobian


def fit_yeo_johnson_lambda(column: np.ndarray) -> float:
    """MLE exponent over [-5, 5] via bounded scalar search (tolerance 1e-6)."""
    x = np.asarray(column, dtype=float)
    if x.size < 3:
        raise ValidationError("need at least 3 values to fit a power transform")
    if np.ptp(x) == 0:
        raise ValidationError("cannot fit a power transform to a constant column")
    result = minimize_scalar(
        lambda lam: -yeo_johnson_loglik(x, lam),
        bounds=LAMBDA_BOUNDS,
        method="bounded",
        options={"xatol": 1e-6},
    )
    return float(result.x)


def _as_matrix(x) -> np.ndarray:
    values = np.asarray(getattr(x, "values", x), dtype=float)
    if values.ndim != 2:
        raise ValidationError("scaler expects a 2-D matrix")
    return values


def fit_scaler(x, method: ScalerMethod) -> ScalerModel:
    """Fit per-column scaling parameters on at least two rows."""
    values = _as_matrix(x)
    n, m = values.shape
    if n < 2:
        raise ValidationError("scaler fitting needs at least 2 rows")

    constant = np.ptp(values, axis=0) == 0
    constant_idx = tuple(int(i) for i in np.flatnonzero(constant))
    constant_vals = {i: float(values[0, i]) for i in constant_idx}
    if constant_idx:
        warnings.warn(
            f"{len(constant_idx)} constant column(s) {constant_idx} pass through "
            "as zeros",
            stacklevel=2,
        )

    if method is ScalerMethod.STANDARD:
        mean = values.mean(axis=0)
        std = values.std(axis=0)  # population
        std[constant] = 1.0
        return ScalerModel(method, m, mean=mean, std=std,
                           constant_columns=constant_idx, constant_values=constant_vals)

    if method is ScalerMethod.RANGE:
        lo = values.min(axis=0)
        hi = values.max(axis=0)
        hi[constant] = lo[constant] + 1.0
        return ScalerModel(method, m, col_min=lo, col_max=hi,
                           constant_columns=constant_idx, constant_values=constant_vals)

    if method is ScalerMethod.POWER:
        lmbda = np.ones(m)
        transformed = values.copy()
        for j in range(m):
            if constant[j]:
                continue
            lmbda[j] = fit_yeo_johnson_lambda(values[:, j])
            transformed[:, j] = yeo_johnson(values[:, j], lmbda[j])
        mean = transformed.mean(axis=0)
        std = transformed.std(axis=0)
        degenerate = std == 0
        std[degenerate] = 1.0
        return ScalerModel(method, m, mean=mean, std=std, lmbda=lmbda,
                           constant_columns=constant_idx, constant_values=constant_vals)

    raise ValidationError(f"unknown scaler method: {method}")


def apply_scaler(model: ScalerModel, x) -> np.ndarray:
    values = _as_matrix(x)
    if values.shape[1] != model.n_columns:
        raise ValidationError(
            f"matrix has {values.shape[1]} columns, scaler expects {model.n_columns}"
        )
    if model.method is ScalerMethod.STANDARD:
        out = (values - model.mean) / model.std
    elif model.method is ScalerMethod.RANGE:
        out = (values - model.col_min) / (model.col_max - model.col_min)
    else:
        out = np.empty_like(values)
        for j in range(model.n_columns):
            out[:, j] = yeo_johnson(values[:, j], model.lmbda[j])
        out = (out - model.mean) / model.std
    for j in model.constant_columns:
        out[:, j] = 0.0
    return out


def inverse_scaler(model: ScalerModel, scaled) -> np.ndarray:
    values = _as_matrix(scaled)
    if values.shape[1] != model.n_columns:
        raise ValidationError(
            f"matrix has {values.shape[1]} columns, scaler expects {model.n_columns}"
        )
    if model.method is ScalerMethod.STANDARD:
        out = values * model.std + model.mean
    elif model.method is ScalerMethod.RANGE:
        out = values * (model.col_max - model.col_min) + model.col_min
    else:
        raw = values * model.std + model.mean
        out = np.empty_like(raw)
        for j in range(model.n_columns):
            out[:, j] = yeo_johnson_inverse(raw[:, j], model.lmbda[j])
    for j, value in model.constant_values.items():
        out[:, j] = value
    return out
