"""Exact t-SNE: perplexity-calibrated affinities and momentum gradient descent.

The O(n^2) inner kernel (low-dimensional affinities, KL cost, analytic
gradient) lives in a compiled extension when available and in a numpy
fallback otherwise; both expose the same kl_and_grad contract and the choice
is made once at import. Set IROPSKIT_TSNE_BACKEND=numpy to force the
fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, ValidationError
from . import _tsne_numpy


def _select_backend():
    choice = os.environ.get("IROPSKIT_TSNE_BACKEND", "auto")
    if choice not in ("auto", "compiled", "numpy"):
        raise ValidationError(f"unknown t-SNE backend {choice!r}")
    if choice == "numpy":
        return _tsne_numpy
    try:
        from .. import _tsne_core

        return _tsne_core
    except ImportError:
        if choice == "compiled":
            raise ValidationError(
                "compiled t-SNE backend requested but the extension is not built"
            ) from None
        return _tsne_numpy


_backend = _select_backend()


def active_backend() -> str:
    """Name of the kernel backend selected at import ('compiled' or 'numpy')."""
    return _backend.backend_name()


ENTROPY_TOL = 1e-5
MAX_CALIBRATION_ITER = 50


def perplexity_calibration(
    sq_dists: np.ndarray, perplexity: float
) -> tuple[float, np.ndarray]:
    """Calibrate one point's Gaussian bandwidth to the requested perplexity.

    ``sq_dists`` holds the squared distances from the point to every other
    point (self excluded). Binary search adjusts sigma until the conditional
    distribution's entropy matches log2(perplexity) within 1e-5 bits; returns
    (sigma, conditional probabilities summing to 1).
    """
    d = np.asarray(sq_dists, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValidationError("need a 1-D row of squared distances")
    if not 2.0 <= perplexity <= d.size:
        raise ValidationError(
            f"perplexity must lie in [2, {d.size}] for this row, got {perplexity}"
        )
    target = math.log2(perplexity)
    d = d - d.min()  # shift-invariant

    beta = 1.0  # 1 / (2 sigma^2)
    beta_lo, beta_hi = 0.0, math.inf
    p = None
    for _ in range(MAX_CALIBRATION_ITER):
        logits = -beta * d
        logits -= logits.max()
        w = np.exp(logits)
        total = w.sum()
        p = w / total
        # Shannon entropy in bits
        nz = p > 0
        entropy = float(-(p[nz] * np.log2(p[nz])).sum())
        gap = entropy - target
        if abs(gap) < ENTROPY_TOL:
            break
        if gap > 0:  # too spread out -> sharpen
            beta_lo = beta
            beta = beta * 2.0 if beta_hi is math.inf else 0.5 * (beta + beta_hi)
        else:
            beta_hi = beta
            beta = beta / 2.0 if beta_lo == 0.0 else 0.5 * (beta + beta_lo)
    else:
        raise ConvergenceError(
            f"perplexity {perplexity} unattainable for this row "
            f"(entropy {entropy:.6f} bits after {MAX_CALIBRATION_ITER} iterations)",
            last_iterate={"beta": beta, "entropy_bits": entropy},
        )
    sigma = math.sqrt(1.0 / (2.0 * beta))
    return sigma, p


def joint_affinities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinity matrix P: p_ij = (p_j|i + p_i|j) / 2n, zero diagonal."""
    n = x.shape[0]
    sq_norms = np.einsum("ij,ij->i", x, x)
    sq_dists = np.maximum(sq_norms[:, None] + sq_norms[None, :] - 2.0 * (x @ x.T), 0.0)
    if np.all(sq_dists == 0.0):
        raise ValidationError("all rows identical; affinities are undefined")

    conditional = np.zeros((n, n))
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        _, p_row = perplexity_calibration(sq_dists[i, mask], perplexity)
        conditional[i, mask] = p_row
    return (conditional + conditional.T) / (2.0 * n)


@dataclass(frozen=True)
class TsneParams:
    perplexity: float = 30.0
    learning_rate: float = 200.0
    n_iter: int = 1000
    early_exaggeration: float = 12.0
    seed: int = 0


@dataclass(frozen=True)
class TsneResult:
    embedding: np.ndarray                      # (n, 2)
    kl_trace: tuple[tuple[int, float], ...]    # (iteration, KL vs true P)
    params: TsneParams
    backend: str = field(default_factory=active_backend)

    @property
    def final_kl(self) -> float:
        return self.kl_trace[-1][1]


EXAGGERATION_ITERS = 250
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
KL_RECORD_INTERVAL = 25


def tsne_embed(x, params: TsneParams = TsneParams()) -> TsneResult:
    """Embed rows of x into 2-D by minimizing KL(P || Q).

    Follows the reference recipe: conditional affinities calibrated per point
    and symmetrized, Student-t (1 dof) low-dimensional kernel, gradient
    descent with momentum 0.5 switching to 0.8 at iteration 250, the
    affinities exaggerated 12x for the first 250 iterations, and a seeded
    Normal(0, 1e-4) initialization. The KL trace always reports the cost
    against the unexaggerated affinities.
    """
    values = np.asarray(getattr(x, "values", x), dtype=float)
    if values.ndim != 2:
        raise ValidationError("t-SNE expects a 2-D matrix")
    n = values.shape[0]
    if n < 10:
        raise ValidationError(f"need at least 10 rows, got {n}")
    max_perp = (n - 1) / 3.0
    if not 2.0 <= params.perplexity <= max_perp:
        raise ValidationError(
            f"perplexity must lie in [2, (n-1)/3] = [2, {max_perp:.1f}], "
            f"got {params.perplexity}"
        )
    if params.n_iter < 1:
        raise ValidationError("n_iter must be positive")

    p = joint_affinities(values, params.perplexity)

    rng = np.random.Generator(np.random.PCG64(params.seed))
    y = rng.standard_normal((n, 2)) * 1e-4
    velocity = np.zeros_like(y)

    exag_until = min(EXAGGERATION_ITERS, params.n_iter)
    trace: list[tuple[int, float]] = []

    for it in range(params.n_iter):
        p_eff = p * params.early_exaggeration if it < exag_until else p
        grad = _backend.gradient(p_eff, y)

        momentum = MOMENTUM_EARLY if it < EXAGGERATION_ITERS else MOMENTUM_LATE
        velocity = momentum * velocity - params.learning_rate * grad
        y = y + velocity
        y = y - y.mean(axis=0)

        last = it == params.n_iter - 1
        if it % KL_RECORD_INTERVAL == (KL_RECORD_INTERVAL - 1) or last:
            trace.append((it + 1, float(_backend.kl_divergence(p, y))))

    return TsneResult(embedding=y, kl_trace=tuple(trace), params=params)
