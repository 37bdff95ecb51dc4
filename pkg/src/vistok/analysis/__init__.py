"""Efficiency, robustness, compositionality and alignment measurements."""

from .embedding import (
    ProbeEntry,
    ProbeReport,
    TextEmbedder,
    compose_space,
    compose_sum,
    compositionality_probe,
    cosine_angle,
    load_lexicon,
)
from .flops import (
    QWEN25_VL_3B,
    FlopsEstimate,
    ModelShape,
    estimate_flops,
    flops_reduction,
    table2_scenario,
)
from .metrics import CompressionReport, FertilityReport, compression_ratio, fertility
from .procrustes import ProcrustesResult, layerwise_procrustes, procrustes, random_orthogonal
from .similarity import similarity_sweep, similarity_under_perturbation

__all__ = [
    "CompressionReport", "FertilityReport", "FlopsEstimate", "ModelShape", "ProbeEntry",
    "ProbeReport", "ProcrustesResult", "QWEN25_VL_3B", "TextEmbedder", "compose_space",
    "compose_sum", "compositionality_probe", "compression_ratio", "cosine_angle",
    "estimate_flops", "fertility", "flops_reduction", "layerwise_procrustes", "load_lexicon",
    "procrustes", "random_orthogonal", "similarity_sweep", "similarity_under_perturbation",
    "table2_scenario",
]
