"""Markov maps on metric trees: transition matrices, entropy and exact
low-entropy constructions."""

from .bounds import (ExtractionReport, LipschitzSpec, branch_count_check, extract_and_bound,
                     g_n_profile, p_lipschitz_bound, theta_defect)
from .constructions import (ExtensionResult, certify_lower_bound, comb_map, extend_exact,
                            lower_bound_root, star_map, sweep_walk)
from .dynamics import (ArcPoint, SegmentSet, eval_point, exactness_witness, orbit,
                       periodic_point_in_arc)
from .markov import (MarkovError, MarkovMap, PSReport, TransitionData, check_ps_linear,
                     dynamical_properties, entropy, from_point_images, refine_invariant_set,
                     rescale_constant_slope, transition)
from .spectral import (ConvergenceError, MatrixProfile, RomeData, SpectralError,
                       find_rome, matrix_profile, max_cycle_mean, perron, rome_root,
                       verify_rome)
from .tree import (EdgePoint, MetricTree, TreeError, VertexPoint, build_tree, geodesic,
                   make_comb, make_star, make_ye_tree, subdivide_at)

__version__ = "0.1.0"

__all__ = [
    "ExtractionReport", "LipschitzSpec", "branch_count_check", "extract_and_bound",
    "g_n_profile", "p_lipschitz_bound", "theta_defect", "ExtensionResult",
    "certify_lower_bound", "comb_map", "extend_exact", "lower_bound_root", "star_map",
    "sweep_walk", "ArcPoint", "SegmentSet", "eval_point", "exactness_witness", "orbit",
    "periodic_point_in_arc", "MarkovError", "MarkovMap", "PSReport", "TransitionData",
    "check_ps_linear", "dynamical_properties", "entropy", "from_point_images",
    "refine_invariant_set", "rescale_constant_slope", "transition", "ConvergenceError",
    "MatrixProfile", "RomeData", "SpectralError", "find_rome", "matrix_profile",
    "max_cycle_mean", "perron", "rome_root", "verify_rome", "EdgePoint", "MetricTree",
    "TreeError", "VertexPoint", "build_tree", "geodesic", "make_comb", "make_star",
    "make_ye_tree", "subdivide_at",
]
