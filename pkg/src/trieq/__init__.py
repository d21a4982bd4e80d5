"""Matrix absolute values, polar decompositions, and the triangle equality.

Working in finite-dimensional complex matrices, this package detects when
|X+Y| = |X| + |Y| holds, constructs the partial isometry U with X = U|X| and
Y = U|Y| that characterizes the equality, and numerically certifies each
identity in the chain connecting the two facts.
"""

from .core import (
    DEFAULT_TOL,
    ConvergenceError,
    NotPositiveSemidefiniteError,
    PairSpecError,
    ShapeMismatchError,
    ToleranceConfig,
    add,
    adjoint,
    as_matrix,
    frobenius_norm,
    hermitian_part,
    mul,
    random_ginibre,
)
from .spectral import (
    CharPoly,
    DiskCheckResult,
    EigenDecomposition,
    PolarFactors,
    SvdDecomposition,
    char_poly,
    char_poly_relative_gap,
    disk_containment_check,
    dist_rel,
    hermitian_eig,
    numerical_range_support,
    operator_norm,
    polar_decompose,
    pseudoinverse,
    psd_sqrt,
    svd,
)
from .triangle import (
    CommonIsometryResult,
    EqualityPreconditionError,
    EqualityReport,
    IsometryMergeResult,
    PairSpec,
    ProofCertificate,
    StepResult,
    abs_val,
    certify_proof_chain,
    common_isometry_least_squares,
    compute_contraction_factors,
    extract_common_isometry,
    make_pair_spec,
    make_projection_counterexample,
    pair_scale,
    synthesize_equality_pair,
    triangle_defect,
)

__version__ = "0.1.0"

__all__ = [
    "CharPoly",
    "CommonIsometryResult",
    "ConvergenceError",
    "DEFAULT_TOL",
    "DiskCheckResult",
    "EigenDecomposition",
    "EqualityPreconditionError",
    "EqualityReport",
    "IsometryMergeResult",
    "NotPositiveSemidefiniteError",
    "PairSpec",
    "PairSpecError",
    "PolarFactors",
    "ProofCertificate",
    "ShapeMismatchError",
    "StepResult",
    "SvdDecomposition",
    "ToleranceConfig",
    "abs_val",
    "add",
    "adjoint",
    "as_matrix",
    "certify_proof_chain",
    "char_poly",
    "char_poly_relative_gap",
    "common_isometry_least_squares",
    "compute_contraction_factors",
    "disk_containment_check",
    "dist_rel",
    "extract_common_isometry",
    "frobenius_norm",
    "hermitian_eig",
    "hermitian_part",
    "make_pair_spec",
    "make_projection_counterexample",
    "mul",
    "numerical_range_support",
    "operator_norm",
    "pair_scale",
    "polar_decompose",
    "pseudoinverse",
    "psd_sqrt",
    "random_ginibre",
    "svd",
    "triangle_defect",
]
