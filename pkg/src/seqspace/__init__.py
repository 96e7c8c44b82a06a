"""Sequence spaces, matrix domains, and mapping-class verdicts.

The package works with infinite matrices acting on the classical sequence
spaces (null, convergent, and bounded sequences, and the spaces of bounded and
convergent series) and with the matrix domains they generate — in particular
the running weighted-sum domains with weights ``k`` ("omega") and ``1/k``
("gamma").  It provides exact transforms and inverses, domain bases,
generalized beta/gamma duals via Abel-summation triangles, a three-valued
mapping-class engine with an independent sampling oracle, and a CLI.
"""

from .conditions import (
    CLASS_TOL,
    DEFAULT_CLASS_N,
    PAIR_CONDITIONS,
    ClassReport,
    ConditionReport,
    OracleReport,
    RegularityReport,
    check_class,
    condition_report,
    condition_trace,
    oracle_check,
    oracle_samples,
    regularity_report,
    source_transfer_matrix,
    supported_pairs,
    target_transfer_matrix,
)
from .domains import (
    basis_element,
    domain_image,
    domain_preimage,
    expansion_coefficients,
    expansion_partial_vector,
    expansion_residual,
    geometric_domain_element,
    preimage_sequence,
    section_residual,
    sections_bounded_probe,
    sections_converge_probe,
    space_from_spec,
    space_membership,
    space_norm,
)
from .duality import (
    DualReport,
    DualTriangle,
    dual_membership,
    dual_transfer_matrix,
    weighted_partial_sums,
)
from .errors import (
    PreconditionError,
    RowSeriesError,
    SeqspaceError,
    SpecError,
    TruncationError,
    UnsupportedClassError,
    ZeroDiagonalError,
)
from .matrices import (
    DENSE_LIMIT,
    InfiniteMatrix,
    apply,
    cesaro_inverse_matrix,
    compose,
    gamma_inverse_matrix,
    gamma_matrix,
    inverse_of,
    invert_triangle,
    matrix_from_spec,
    omega_inverse_matrix,
    omega_matrix,
    truncate_matrix,
)
from .sequences import (
    FiniteVector,
    LimitKind,
    LimitVerdict,
    Sequence,
    SpaceId,
    analyze_limit,
    analyze_sup,
    classify_values,
    detect_limit,
    exact_number,
    finite_vector,
    make_sequence,
    sequence_from_values,
    truncate,
)
from .verdicts import EXIT_CODES, Verdict, conjoin

__version__ = "0.1.0"

__all__ = [
    "CLASS_TOL",
    "DEFAULT_CLASS_N",
    "DENSE_LIMIT",
    "EXIT_CODES",
    "PAIR_CONDITIONS",
    "ClassReport",
    "ConditionReport",
    "DualReport",
    "DualTriangle",
    "FiniteVector",
    "InfiniteMatrix",
    "LimitKind",
    "LimitVerdict",
    "OracleReport",
    "PreconditionError",
    "RegularityReport",
    "RowSeriesError",
    "SeqspaceError",
    "Sequence",
    "SpaceId",
    "SpecError",
    "TruncationError",
    "UnsupportedClassError",
    "Verdict",
    "ZeroDiagonalError",
    "analyze_limit",
    "analyze_sup",
    "apply",
    "basis_element",
    "cesaro_inverse_matrix",
    "check_class",
    "classify_values",
    "compose",
    "condition_report",
    "condition_trace",
    "conjoin",
    "detect_limit",
    "domain_image",
    "domain_preimage",
    "dual_membership",
    "dual_transfer_matrix",
    "exact_number",
    "expansion_coefficients",
    "expansion_partial_vector",
    "expansion_residual",
    "finite_vector",
    "gamma_inverse_matrix",
    "gamma_matrix",
    "geometric_domain_element",
    "inverse_of",
    "invert_triangle",
    "make_sequence",
    "matrix_from_spec",
    "omega_inverse_matrix",
    "omega_matrix",
    "oracle_check",
    "oracle_samples",
    "preimage_sequence",
    "regularity_report",
    "section_residual",
    "sections_bounded_probe",
    "sections_converge_probe",
    "sequence_from_values",
    "source_transfer_matrix",
    "space_from_spec",
    "space_membership",
    "space_norm",
    "supported_pairs",
    "target_transfer_matrix",
    "truncate",
    "truncate_matrix",
    "weighted_partial_sums",
]
