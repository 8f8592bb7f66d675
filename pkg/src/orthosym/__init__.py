"""Toolkit for multipartite quantum states with joint orthogonal symmetry.

Builds the pair-projector families spanning O(x)O-invariant states of 2K
qudits, works with such states through their 3**K fidelity coordinates
(partial-transpose maps, PPT tests, separability bounds, twirling,
reconstruction, reductions), and cross-verifies every closed form against
dense brute-force linear algebra.
"""

from .dense import (
    HERM_RTOL,
    MAX_DIM,
    PSD_TOL,
    CapacityError,
    ComplexOperator,
    DomainError,
    identity,
    is_psd,
    kron,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    pure_state_projector,
    random_orthogonal,
    random_unit_vector,
    random_unitary,
)
from .projectors import (
    BipartiteBasis,
    all_multi_indices,
    bipartite_traces,
    build_bipartite,
    build_multipartite,
    doubled_tensor,
    flip,
    maximally_entangled,
    multi_index_digits,
    multi_index_rank,
    multipartite_trace,
    pair_permutation,
    permute_subsystems,
    projector_family,
)
from .simplex import (
    CMatrix,
    FidelityVector,
    IntersectionPoint,
    PairInequalities,
    PPTVerdict,
    SeparabilityBounds,
    all_masks,
    bob_subsystems,
    c_matrix,
    coordinate_bounds,
    default_grid_resolution,
    grid_points,
    hull_vertices,
    intersection_point,
    mask_digits,
    mask_rank,
    pair_vertex_coords,
    ppt_all,
    ppt_check,
    ppt_inequalities,
    product_state_fidelities,
    pt_map,
    reconstruct,
    reduce_mixed,
    reduce_pair,
    sep_bound_check,
    simplex_grid,
    twirl_coords,
)
from .verify import (
    DEFAULT_SEED,
    VerificationReport,
    first_failure,
    run_suite,
    verify_c_matrix,
    verify_coplanarity,
    verify_invariance,
    verify_product_fidelities,
    verify_pt_consistency,
    verify_reduction,
    verify_resolution,
)

__version__ = "0.1.0"
