"""Feature relevance: KSG mutual information and Gaussian-process regression."""

from .gpr import (
    GprModel,
    gpr_fit,
    gpr_log_marginal_likelihood,
    gpr_predict,
    matern32,
    qq_gap,
    sme_qq,
)
from .mi import FeatureSubset, MirScores, mi_ksg, mir_rank, select_top_k

__all__ = [
    "FeatureSubset",
    "GprModel",
    "MirScores",
    "gpr_fit",
    "gpr_log_marginal_likelihood",
    "gpr_predict",
    "matern32",
    "mi_ksg",
    "mir_rank",
    "qq_gap",
    "select_top_k",
    "sme_qq",
]
