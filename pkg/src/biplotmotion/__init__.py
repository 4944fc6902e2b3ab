"""PCA biplots across the ordered levels of a time variable: alignment,
comparison measures, animation frames and static facets."""

__version__ = "0.1.0"

from .alignment import (AlignmentResult, SimilarityTransform, align_series, apply_reflection,
                        gpa_consensus, orthogonal_procrustes, reflect_at_levels)
from .animation import Frame, FrameSequence, build_timeline, linear_ease, shadow_trails
from .data import Dataset, TimeSlice, ingest_csv, slice_by_time
from .evaluation import EvaluationRecord, EvaluationReport, evaluate_pair, evaluate_series
from .hull import convex_hull
from .pca import BiplotState, pca_biplot, per_slice_pca, project_slices, standardize

__all__ = [
    "AlignmentResult", "BiplotState", "Dataset", "EvaluationRecord", "EvaluationReport", "Frame",
    "FrameSequence", "SimilarityTransform", "TimeSlice", "align_series", "apply_reflection",
    "build_timeline", "convex_hull", "evaluate_pair", "evaluate_series", "gpa_consensus",
    "ingest_csv", "linear_ease", "orthogonal_procrustes", "pca_biplot", "per_slice_pca",
    "project_slices", "reflect_at_levels", "shadow_trails", "slice_by_time", "standardize",
]
