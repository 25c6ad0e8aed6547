"""Scaling-invariant distances and hierarchical clustering on weighted projective spaces."""

from .cluster import (
    Dendrogram,
    DistanceMatrix,
    LINKAGES,
    PairEvaluationError,
    StabilityBoundError,
    StabilityReport,
    adjusted_rand_index,
    agglomerate,
    cut,
    dendrogram_to_newick,
    distance_matrix,
    kmeans_baseline,
    rand_index,
    stability_check,
)
from .core import (
    InvalidPointError,
    ProjPoint,
    RatProjPoint,
    Tangent,
    WeightMismatchError,
    Weights,
    act,
    act_rational,
    equivalent,
    normalize_geometric,
    normalize_rational,
    weighted_height,
    weighted_norm,
    wgcd,
)
from .datasets import (
    LabeledDataset,
    MODULI_WEIGHTS,
    UndefinedInvariantError,
    absolute_invariant_t1,
    gen_moduli_points,
    gen_synthetic_clusters,
)
from .dissimilarity import (
    DissimilarityOptions,
    RationalScanOptions,
    ViolationReport,
    chord_distance,
    dissimilarity,
    dissimilarity_rational,
    triangle_violation_scan,
)
from .finsler import (
    DegeneratePathError,
    GeodesicOptions,
    GeodesicResult,
    PiecewisePath,
    finsler_norm,
    finsler_norm_rational,
    geodesic_distance,
    geodesic_distance_rational,
    path_length,
)
from .pca import WeightedPCAResult, normalize_dataset, reconstruction_error, weighted_pca

__version__ = "0.1.0"

__all__ = [
    "Dendrogram",
    "DissimilarityOptions",
    "DistanceMatrix",
    "DegeneratePathError",
    "GeodesicOptions",
    "GeodesicResult",
    "InvalidPointError",
    "LINKAGES",
    "LabeledDataset",
    "MODULI_WEIGHTS",
    "PairEvaluationError",
    "PiecewisePath",
    "ProjPoint",
    "RatProjPoint",
    "RationalScanOptions",
    "StabilityBoundError",
    "StabilityReport",
    "Tangent",
    "UndefinedInvariantError",
    "ViolationReport",
    "WeightMismatchError",
    "WeightedPCAResult",
    "Weights",
    "absolute_invariant_t1",
    "act",
    "act_rational",
    "adjusted_rand_index",
    "agglomerate",
    "chord_distance",
    "cut",
    "dendrogram_to_newick",
    "dissimilarity",
    "dissimilarity_rational",
    "distance_matrix",
    "equivalent",
    "finsler_norm",
    "finsler_norm_rational",
    "gen_moduli_points",
    "gen_synthetic_clusters",
    "geodesic_distance",
    "geodesic_distance_rational",
    "kmeans_baseline",
    "normalize_dataset",
    "normalize_geometric",
    "normalize_rational",
    "path_length",
    "rand_index",
    "reconstruction_error",
    "stability_check",
    "triangle_violation_scan",
    "weighted_height",
    "weighted_norm",
    "weighted_pca",
    "wgcd",
]
