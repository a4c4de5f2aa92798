"""Relation algebra on finite point sets, coherent configurations, and
checkers for the diameter/expansion/girth bounds they satisfy."""

from .relation import (
    Relation,
    diagonal,
    empty,
    from_pairs,
    full,
    parse_dense,
    parse_edge_list,
)
from .metrics import (
    UNREACHABLE,
    ConnectivityError,
    boundary,
    directed_diameter,
    directed_distances,
    directed_girth,
    geodesic_counts,
    through_vertex_count,
    undirected_diameter,
)
from .scheme import (
    IntransitiveGroupError,
    Scheme,
    in_s_union,
    pair_orbit_scheme,
    parse_generators,
    path_count_invariance_check,
    verify_scheme,
    wl_closure,
)
from .bounds import (
    BoundReport,
    check_comm_ind,
    check_expansion,
    check_pigeonhole_doubling,
    check_ruzsa,
    check_star_ratio,
    comm_bound,
    mains_check,
    mains_explicit_bound,
)
from .construct import (
    CayleySpec,
    CyclicSet,
    HRWitness,
    build_cayley,
    difference_set,
    find_progression_gap,
    girthex_pipeline,
    k_fold,
    normalize_shift,
    scale_set,
    search_hr_set,
    sumset,
)

__version__ = "0.1.0"
