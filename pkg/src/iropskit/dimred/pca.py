"""Principal component analysis via eigendecomposition of the sample covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray                     # (m,)
    components: np.ndarray               # (d, m), orthonormal rows
    eigenvalues: np.ndarray              # (d,), non-increasing
    explained_variance_ratio: np.ndarray  # (d,), shares of total variance

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def _values(x) -> np.ndarray:
    values = np.asarray(getattr(x, "values", x), dtype=float)
    if values.ndim != 2:
        raise ValidationError("PCA expects a 2-D matrix")
    return values


def pca_fit(x, d: int) -> PcaModel:
    """Fit the top-d principal components.

    Sign convention: each component's largest-magnitude loading is positive,
    so repeated fits of the same data agree exactly.
    """
    values = _values(x)
    n, m = values.shape
    if not 1 <= d <= min(n - 1, m):
        raise ValidationError(f"d must lie in [1, min(n-1, m)] = [1, {min(n - 1, m)}], got {d}")

    mean = values.mean(axis=0)
    cov = np.cov(values, rowvar=False, ddof=1).reshape(m, m)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    eigenvalues = np.maximum(eigenvalues[::-1], 0.0)  # descending, clip noise
    eigenvectors = eigenvectors[:, ::-1]

    components = eigenvectors[:, :d].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0

    total = eigenvalues.sum()
    ratios = eigenvalues[:d] / total if total > 0 else np.zeros(d)
    return PcaModel(
        mean=mean,
        components=components,
        eigenvalues=eigenvalues[:d].copy(),
        explained_variance_ratio=ratios,
    )


def pca_transform(model: PcaModel, x) -> np.ndarray:
    """Project rows onto the fitted basis: (X - mean) @ components.T."""
    values = _values(x)
    if values.shape[1] != model.mean.shape[0]:
        raise ValidationError(
            f"matrix has {values.shape[1]} columns, model expects {model.mean.shape[0]}"
        )
    return (values - model.mean) @ model.components.T
