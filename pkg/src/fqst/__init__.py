"""Flow-dependent quadratic Steiner trees in the Euclidean plane.

A directed tree carries each source's supply to a single sink; an edge with
flow f and length L costs f * L^2.  The package embeds given topologies
optimally (a linear-time mass-merging solver for full degree-3 topologies
and a linear-system solver for everything else), certifies local and global
optimality, computes bounds, and finds global optima at desk scale by
exhaustive search under three ways of bounding the Steiner count.
"""

from .analysis import (
    AngleViolation,
    DegreeViolation,
    EdgeOverlap,
    SplitSpec,
    apply_split,
    beaded_spanning_tree,
    centroid_deviations,
    check_angles,
    check_centroid_certificate,
    check_degree_window,
    check_overlapping_edges,
    cost,
    cost_node_weighted,
    expand_beads,
    lower_bound_path,
    optimal_bead_count,
    split_topology,
    steiner_count_bound,
)
from .algebraic_solver import (
    SteinerSystem,
    assemble_system,
    solve_positions,
    solve_topology,
)
from .errors import (
    DocumentError,
    FqstError,
    GeometryError,
    GuardLimitError,
    InternalConsistencyError,
    TopologyError,
    UnsupportedTopologyError,
    UnsupportedWeightsError,
)
from .exact_search import (
    BeadVector,
    SearchReport,
    local_improve_by_splits,
    solve_exact,
)
from .geo_solver import (
    GeoRun,
    MergeProvenance,
    MergeStep,
    QuasiSource,
    merge_quasi_quasi,
    merge_quasi_source,
    merge_sources,
    run_geo_algorithm,
    solve_full_topology,
)
from .geo_solver import supports as geo_solver_supports
from .geometry import MassPoint, Point, angle_at, centroid, lerp, sq_dist
from .render import render_svg
from .strategies import (
    BoundStrategy,
    DegreeBound,
    ExplicitBound,
    NodeWeighted,
    max_steiner_count,
)
from .topology import (
    Instance,
    Topology,
    canonical_form,
    compute_flows,
    enumerate_bounded_topologies,
    enumerate_full_topologies,
    rooted_encoding,
    validate_topology,
)
from .trees import SolvedTree, build_solved_tree, embedded_cost

__version__ = "0.1.0"

__all__ = [
    "AngleViolation",
    "BeadVector",
    "BoundStrategy",
    "DegreeBound",
    "DegreeViolation",
    "DocumentError",
    "EdgeOverlap",
    "ExplicitBound",
    "FqstError",
    "GeoRun",
    "GeometryError",
    "GuardLimitError",
    "Instance",
    "InternalConsistencyError",
    "MassPoint",
    "MergeProvenance",
    "MergeStep",
    "NodeWeighted",
    "Point",
    "QuasiSource",
    "SearchReport",
    "SolvedTree",
    "SplitSpec",
    "SteinerSystem",
    "Topology",
    "TopologyError",
    "UnsupportedTopologyError",
    "UnsupportedWeightsError",
    "angle_at",
    "apply_split",
    "assemble_system",
    "beaded_spanning_tree",
    "build_solved_tree",
    "canonical_form",
    "centroid",
    "centroid_deviations",
    "check_angles",
    "check_centroid_certificate",
    "check_degree_window",
    "check_overlapping_edges",
    "compute_flows",
    "cost",
    "cost_node_weighted",
    "embedded_cost",
    "enumerate_bounded_topologies",
    "enumerate_full_topologies",
    "expand_beads",
    "geo_solver_supports",
    "lerp",
    "local_improve_by_splits",
    "lower_bound_path",
    "max_steiner_count",
    "merge_quasi_quasi",
    "merge_quasi_source",
    "merge_sources",
    "optimal_bead_count",
    "render_svg",
    "rooted_encoding",
    "run_geo_algorithm",
    "solve_exact",
    "solve_full_topology",
    "solve_positions",
    "solve_topology",
    "split_topology",
    "sq_dist",
    "steiner_count_bound",
    "validate_topology",
]
