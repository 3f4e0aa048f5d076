"""Exact integrable boundaries for the multi-species ASEP.

Construction of the boundary family, zero-tolerance verification of the
algebraic integrability identities over exact rationals, exact stationary
states, and continuous-time Monte Carlo cross-validation.
"""

__version__ = "0.1.0"

from .boundary import (
    BoundarySpec,
    Side,
    SpeciesClass,
    Variant,
    build_boundary,
    build_right_boundary,
    classify,
    decompose_boundary,
    deform_boundary,
    enumerate_specs,
    tilde_rates,
)
from .bulk import BulkParams, bulk_markov, hecke_generator_rationalized, local_markov, r_matrix
from .gillespie import DivergenceRecord, SimConfig, SimReport, compare_empirical, simulate
from .kmatrix import (
    dual_k_matrix,
    e0_matrix,
    k_matrix,
    k_matrix_baxterised,
    k_scalar,
    kbar_matrix,
)
from .linalg import (
    QMat,
    Rat,
    TensorSpace,
    embed,
    format_rat,
    invert,
    kron,
    nullspace,
    parse_rat,
    partial_trace,
    partial_transpose,
)
from .markov import LatticeModel, StationaryResult, full_markov, is_irreducible, stationary_distribution
from .verify import (
    CheckReport,
    check_boundary_algebra,
    check_cyclotomic_map,
    check_hecke,
    check_k_unitarity,
    check_lemma_relations,
    check_poly_relations,
    check_r_unitarity,
    check_reflection,
    check_transfer_commutation,
    check_ybe,
    transfer_matrix,
)
