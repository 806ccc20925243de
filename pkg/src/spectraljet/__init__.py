"""spectraljet: Wick constants, heat-kernel embedding jets, and the induced
angle metric on the multi-index lattice Z_+^n.

The package verifies, at desk scale, that the normalized diagonal jets of the
heat kernel of closed-spectrum manifolds converge to universal signed-pairing
constants, and exercises the geometry those constants induce: isometry
defects, mean curvature, the asymptotic Gauss formula for the Riemann tensor,
and the angle metric on Z_+^n.
"""

from .multiindex import (
    MultiIndex,
    PairProfile,
    empty,
    enumerate_multiindices,
    from_indices,
    pair_profile,
    parse,
    symmetric_difference_size,
)
from .wick import (
    GraphCount,
    WickA,
    WickB,
    b_stabilization_scan,
    check_inductive_relations,
    double_factorial,
    enumerate_admissible_graphs,
    gaussian_moment_oracle,
    gaussian_moment_quadrature,
    wick_a,
    wick_b,
)
from .lattice import (
    AngleDistance,
    angle_distance,
    coset_of,
    distance_comparison_check,
    is_orthogonal,
    run_triple_suite,
    sample_multiindex,
    stabilization_scan,
    verify_metric_axioms,
)
from .jets import (
    COS,
    EXP,
    SIN,
    SQRT_COS,
    SQRT_SINC,
    SQUARED_GEODESIC,
    ChebyshevUKernel,
    LegendreKernel,
    TruncatedSeries,
    compose_univariate,
    extract_mixed_partial,
)
from .manifolds import (
    Circle,
    FlatTorus,
    Sphere,
    TruncationError,
    TruncationPolicy,
    gauss_curvature_difference,
    gauss_curvature_estimate,
    heat_kernel_diag_jet,
    curvature_symmetry_residuals,
    jet_gram,
    levi_civita_check,
    make_model,
    mean_curvature_proxy,
    pullback_metric,
    ricci_scalar_extract,
    squared_distance_jets,
    squared_distance_target,
    third_jet_umbilical,
    truncation_stability,
    PolynomialField,
)
from .asymptotics import (
    ConvergenceRecord,
    LimitFit,
    curvature_suite,
    isometry_suite,
    jet_relation_suite,
    limit_fit,
    mean_curvature_suite,
    normalization_factor,
    scalar_ricci_suite,
    scalar_suite,
    time_grid,
    umbilical_suite,
)

__version__ = "0.1.0"
