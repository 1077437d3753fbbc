"""Linear (PCA) and nonlinear (t-SNE) dimensionality reduction."""

from .pca import PcaModel, pca_fit, pca_transform
from .tsne import (
    TsneParams,
    TsneResult,
    active_backend,
    joint_affinities,
    perplexity_calibration,
    tsne_embed,
)

__all__ = [
    "PcaModel",
    "TsneParams",
    "TsneResult",
    "active_backend",
    "joint_affinities",
    "pca_fit",
    "pca_transform",
    "perplexity_calibration",
    "tsne_embed",
]
