"""Hyperspectral band selection by mutual information and GLCM homogeneity."""

__version__ = "0.1.0"

from .datamodel import (
    Cube,
    GroundTruthMap,
    QuantizedBand,
    SyntheticSpec,
    generate_synthetic,
    load_cube,
    load_ground_truth,
    quantize_band,
    write_cube,
    write_ground_truth,
)
from .evaluation import (
    EvaluationResult,
    SplitAssignment,
    classify_1nn,
    evaluate_subset,
    export_sparse,
    overall_accuracy,
    stratified_split,
    sweep,
)
from .glcm import CooccurrenceMatrix, GlcmParams, band_homogeneity, glcm, homogeneity
from .info import (
    Histogram,
    JointHistogram,
    entropy,
    histogram,
    joint_histogram,
    mutual_information,
)
from .selection import (
    GtEstimate,
    RankingCriterion,
    SelectionConfig,
    SelectionReport,
    greedy_select,
    rank_bands,
    update_estimate,
)

__all__ = [
    "Cube", "GroundTruthMap", "QuantizedBand", "SyntheticSpec", "generate_synthetic",
    "load_cube", "load_ground_truth", "quantize_band", "write_cube", "write_ground_truth",
    "EvaluationResult", "SplitAssignment", "classify_1nn", "evaluate_subset", "export_sparse",
    "overall_accuracy", "stratified_split", "sweep",
    "CooccurrenceMatrix", "GlcmParams", "band_homogeneity", "glcm", "homogeneity",
    "Histogram", "JointHistogram", "entropy", "histogram", "joint_histogram",
    "mutual_information",
    "GtEstimate", "RankingCriterion", "SelectionConfig", "SelectionReport", "greedy_select",
    "rank_bands", "update_estimate",
]
