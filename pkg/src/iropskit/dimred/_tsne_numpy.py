"""Pure-numpy t-SNE inner kernels, the fallback when the extension is absent.

Same contract as iropskit._tsne_core: gradient() for the optimizer loop,
kl_divergence() for trace recording, kl_and_grad() as a convenience.
"""

from __future__ import annotations

import numpy as np

QMIN = 1e-12


def backend_name() -> str:
    return "numpy"


def _student_numerators(y: np.ndarray) -> np.ndarray:
    sq_norms = np.einsum("ij,ij->i", y, y)
    sq_dists = np.maximum(sq_norms[:, None] + sq_norms[None, :] - 2.0 * (y @ y.T), 0.0)
    num = 1.0 / (1.0 + sq_dists)
    np.fill_diagonal(num, 0.0)
    return num


def _check(p: np.ndarray, y: np.ndarray) -> None:
    if p.shape != (y.shape[0], y.shape[0]):
        raise ValueError("affinity matrix shape does not match embedding")


def gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic KL gradient: 4 sum_j (p_ij - q_ij) num_ij (y_i - y_j)."""
    _check(p, y)
    num = _student_numerators(y)
    q = num / num.sum()
    w = (p - q) * num
    return 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P || Q) for the embedding y; q floored at 1e-12 inside the log."""
    _check(p, y)
    num = _student_numerators(y)
    q = num / num.sum()
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], QMIN))))


def kl_and_grad(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    return kl_divergence(p, y), gradient(p, y)
