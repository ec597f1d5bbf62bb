"""coarsegeom: finite-scale computations in coarse metric geometry.

Gromov products and four-point hyperbolicity, short paths and comparison
triangles, rough comparison inequalities, bouquets of short paths and their
equivalence certificates, bouquet/Gromov sequences, and ends of graphs.
"""

from .bouquet import (
    AsymptoticityCertificate,
    Bouquet,
    BouquetValidation,
    LittleOWitness,
    STANDARD_D,
    ShortFunction,
    asymptoticity_profile,
    bouquet_from_paths,
    certify_asymptotic,
    equivalence_spread,
    prune,
    ray_bouquet,
    rebase,
    separation_threshold,
    spread_bound,
    standard_lengths,
    tighten_loose_bouquet,
    tip_sequence,
    validate_bouquet,
)
from .comparison import (
    ComparisonPoint,
    PlanarTriangle,
    RcatReport,
    build_comparison_triangle,
    comparison_point,
    fellow_traveler_gap,
    rcat0_constant_cat0,
    rcat0_constant_hyperbolic,
    rcat0_triangle_check,
    rough_convexity_gap,
    weak_rcat0_check,
)
from .ends import (
    Component,
    EndChain,
    components_outside_ball,
    end_chains,
    eta_map,
    match_chains_across_basepoints,
)
from .errors import (
    CoarseGeomError,
    DisconnectedError,
    EquivalenceError,
    HorizonError,
    InadmissibleError,
    InvalidBouquetError,
    ResolutionError,
    SpaceKindError,
    TriangleError,
    UnknownPointError,
)
from .metric import (
    HyperbolicityReport,
    MetricSpace,
    PathRec,
    VaisGap,
    four_point_delta,
    gromov_product,
    h_bound,
    h_short_path,
    make_path,
    net_allowance,
    point_at,
    snap_allowance,
    tripod_gap,
    truncate_path,
    vais_gap,
)
from .sequences import (
    SeqClaim,
    SeqEquivalenceCertificate,
    SeqRec,
    SequenceValidation,
    gp_identity_residual,
    gromov_classes,
    gromov_to_bouquet_sequence,
    sequence_to_bouquet,
    sequences_equivalent,
    validate_sequence,
)
from .spaces import (
    ExampleFamily,
    RegionSpec,
    explicit_example_points,
    explicit_plane,
    generate,
    path_graph,
    random_tree,
)
from .topology import (
    ChildBouquet,
    MemberVerdict,
    NeighborhoodSpec,
    SeparationReport,
    check_s0_inside_sprime,
    child_of_point,
    neighborhood_member,
    representative_family,
    separation_check,
    shift_truncate,
    sprime_containment_bound,
)

__version__ = "0.1.0"
