"""Mutual-information ranking via the Kraskov k-nearest-neighbor estimator."""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from ..errors import ValidationError
from ..flight_data import FeatureMatrix

JITTER_SCALE = 1e-10


def _column_seed(values: np.ndarray, seed: int) -> np.random.Generator:
    # Jitter keyed on the column bytes: identical columns get identical noise,
    # so duplicated features receive exactly equal scores.
    digest = hashlib.sha256(np.ascontiguousarray(values).tobytes()).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))


def _jitter(values: np.ndarray, seed: int) -> np.ndarray:
    rng = _column_seed(values, seed)
    scale = JITTER_SCALE * max(1.0, float(np.mean(np.abs(values))))
    return values + scale * rng.standard_normal(values.shape)


def mi_ksg(x, y, k: int = 3, seed: int = 0) -> float:
    """Kraskov (variant 1) mutual-information estimate in nats, clamped at 0.

    Distance ties are broken by a seeded jitter at relative scale 1e-10, keyed
    on each vector's content so the estimate is deterministic and symmetric
    under duplicated inputs. A constant input carries no information and
    returns 0 with a warning.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValidationError(f"length mismatch: {x.size} vs {y.size}")
    n = x.size
    if n < 3 * k:
        raise ValidationError(f"need at least 3k = {3 * k} samples, got {n}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValidationError("inputs must be finite")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        warnings.warn("constant input has zero mutual information", stacklevel=2)
        return 0.0

    xj = _jitter(x, seed)
    yj = _jitter(y, seed)

    joint = np.column_stack([xj, yj])
    tree = cKDTree(joint)
    # distance to the k-th neighbor in the joint space, Chebyshev metric
    eps = tree.query(joint, k=k + 1, p=np.inf)[0][:, k]

    def strict_count(values: np.ndarray) -> np.ndarray:
        order = np.sort(values)
        hi = np.searchsorted(order, values + eps, side="left")
        lo = np.searchsorted(order, values - eps, side="right")
        return hi - lo - 1  # exclude the point itself

    nx = strict_count(xj)
    ny = strict_count(yj)
    mi = digamma(k) + digamma(n) - np.mean(digamma(nx + 1) + digamma(ny + 1))
    return max(float(mi), 0.0)


@dataclass(frozen=True)
class MirScores:
    """Per-feature mutual information with the target, sorted descending."""

    entries: tuple[tuple[str, float], ...]  # (name, mi_nats)
    k_neighbors: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def score(self, name: str) -> float:
        for entry_name, value in self.entries:
            if entry_name == name:
                return value
        raise ValidationError(f"feature {name!r} not scored")


@dataclass(frozen=True)
class FeatureSubset:
    selected: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.selected)


def mir_rank(x: FeatureMatrix, y, k: int = 3, seed: int = 0,
             target_name: str | None = None) -> MirScores:
    """Rank every feature column by mutual information with the target.

    Ties break lexicographically by feature name. The target must not appear
    among the feature columns.
    """
    y = np.asarray(y, dtype=float).ravel()
    if target_name is not None and target_name in x.feature_names:
        raise ValidationError(f"target {target_name!r} is among the feature columns")
    for name in x.feature_names:
        if np.array_equal(x.column(name), y):
            raise ValidationError(f"feature {name!r} equals the target column")

    scores = [(name, mi_ksg(x.column(name), y, k=k, seed=seed)) for name in x.feature_names]
    scores.sort(key=lambda item: (-item[1], item[0]))
    return MirScores(entries=tuple(scores), k_neighbors=k)


def select_top_k(scores: MirScores, k: int) -> FeatureSubset:
    """The k best-scoring features (ties already resolved by name)."""
    if not 1 <= k <= len(scores.entries):
        raise ValidationError(
            f"k must lie in [1, {len(scores.entries)}], got {k}"
        )
    return FeatureSubset(selected=tuple(name for name, _ in scores.entries[:k]))
