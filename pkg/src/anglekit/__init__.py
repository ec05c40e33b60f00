"""anglekit: exact decision pipeline for angle structures on ideal and
partially truncated triangulations of 3-manifolds."""

from .angles import (
    AngleSystem,
    FarkasCertificate,
    SolveResult,
    assemble_angle_system,
    search_taut,
    solve_angles,
    verify_certificate,
)
from .errors import AnglekitError
from .formats import (
    parse_dec,
    parse_tri,
    serialize_dec,
    serialize_tri,
)
from .homology import (
    CellComplex,
    ZeroMapReport,
    compact_complex,
    h1_rank,
    zero_map_check,
)
from .normal import (
    CheckReport,
    CompatibilityMatrix,
    ConeConstraints,
    check_sufficiency,
    chi_A,
    chi_star,
    combinatorial_area,
    compatibility_matrix,
    cone_extreme_points,
    disc_types,
    integerize,
    kernel_basis,
    link_coordinate,
    lt_identity_residual,
    vertical_quads,
)
from .subdivision import (
    ConeAssignment,
    Decomposition,
    Pillow,
    PillowStack,
    PolyGluing,
    Polyhedron,
    build_decomposition,
    cone_polyhedron,
    detect_pillows,
    dual_graph,
    layer_pillow,
    maximal_tree_cone_assignment,
    subdivide,
)
from .triangulation import (
    AngleAssignment,
    FaceGluing,
    Tetrahedron,
    Triangulation,
    build_triangulation,
    link_surface,
    validate_angles,
    validate_triangulation,
)

__version__ = "0.1.0"
