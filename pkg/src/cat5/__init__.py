"""Five-point comparison geometry toolkit.

Decide the quadruple comparison for finite metric spaces; when a five-point
space satisfies it, construct an explicit distance-preserving embedding into a
simplicial complex with per-simplex Euclidean metric; classify five-point
arrays in 3-space by facet orientations; and decide graph-comparison
feasibility over Gram matrices.
"""

from .arrays import Array5R3, OrientationProfile, array5, classify, project_along, structural_check
from .errors import Cat5Error
from .forms import (
    MinkowskiEmbedding,
    QuadraticForm,
    Spectrum,
    associated_form,
    eigendecompose,
    euclidean_embedding,
    is_euclidean,
    jacobi_eigh,
    minkowski_embedding,
)
from .gamma import (
    ComparisonGraph,
    GramWitness,
    builtin_graph,
    c4_equivalence_check,
    cycle_implication_check,
    gamma_feasible,
    graph_from_edges,
)
from .metric import (
    ComparisonReport,
    FiniteMetricSpace,
    PlanarTriangle,
    QuadCheckResult,
    cat0_comparison_all,
    model_triangle,
    quad_comparison,
    validate_metric,
)
from .spacelike import (
    ConeOrientation,
    EmbeddingResult,
    SpacelikeComplex,
    build_complex,
    cat0_embed,
    choose_time_orientation,
    complex_from_dict,
    complex_to_dict,
    facet_side_test,
)
from .verify import (
    HuntConfig,
    check_distance_preservation,
    geodesic_upper_bounds,
    hunt_counterexamples,
    random_metric,
)

__version__ = "0.1.0"

__all__ = [
    "Array5R3",
    "Cat5Error",
    "ComparisonGraph",
    "ComparisonReport",
    "ConeOrientation",
    "EmbeddingResult",
    "FiniteMetricSpace",
    "GramWitness",
    "HuntConfig",
    "MinkowskiEmbedding",
    "OrientationProfile",
    "PlanarTriangle",
    "QuadCheckResult",
    "QuadraticForm",
    "SpacelikeComplex",
    "Spectrum",
    "array5",
    "associated_form",
    "build_complex",
    "builtin_graph",
    "c4_equivalence_check",
    "cat0_comparison_all",
    "cat0_embed",
    "check_distance_preservation",
    "choose_time_orientation",
    "classify",
    "complex_from_dict",
    "complex_to_dict",
    "cycle_implication_check",
    "eigendecompose",
    "euclidean_embedding",
    "facet_side_test",
    "gamma_feasible",
    "geodesic_upper_bounds",
    "graph_from_edges",
    "hunt_counterexamples",
    "is_euclidean",
    "jacobi_eigh",
    "minkowski_embedding",
    "model_triangle",
    "project_along",
    "quad_comparison",
    "random_metric",
    "validate_metric",
]
