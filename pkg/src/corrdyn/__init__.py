"""Escape-time dynamics, Misiurewicz solvers and similarity curves for the
root correspondence z -> (z^p)^(1/q) + c."""

from .core import (
    EscapeConfig,
    Exponent,
    branch_derivative,
    branch_nearest,
    escape_radius,
    forward_images,
    unit_roots,
)
from .errors import (
    BranchJump,
    CorrDynError,
    DivergedFromDomain,
    EmptyCloud,
    NoClosure,
    NoConvergence,
    NotMinimal,
    NotRepelling,
    NotStrictlyPreperiodic,
    PatternMismatch,
    ResidualTooLarge,
    ResolutionTooCoarse,
    UniquenessFailed,
)
from .misiurewicz import (
    MisiurewiczReport,
    SignSequence,
    f_poly_eval,
    mu_constant_42,
    multiplier_42,
    refine_misiurewicz_numeric,
    solve_misiurewicz_42,
    sweep_misiurewicz_42,
    transversality_42,
)
from .orbits import (
    BoundedOrbit,
    MembershipVerdict,
    OrbitSet,
    in_filled_julia,
    iterate_set,
    make_orbit_set,
    unique_bounded_orbit,
)
from .raster import (
    Bitmap,
    PointCloud,
    Window,
    distance_band_cloud,
    extract_point_cloud,
    read_pgm,
    render_julia,
    render_julia_distance,
    render_multibrot,
    render_multibrot_distance,
    write_pgm,
    write_png,
)
from .similarity import (
    KoenigsMap,
    SimilarityCurve,
    default_truncation_radius,
    hausdorff_distance,
    julia_vs_multibrot_curve,
    koenigs_build,
    limit_model,
    rendered_cross_curve,
    rendered_self_curve,
    self_similarity_curve,
    truncate_normalize,
)

__version__ = "0.1.0"
