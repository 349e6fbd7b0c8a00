"""Arbitrary-precision harmonic fields on finitely punctured flat tori.

The package builds trial spaces from quasi-periodic elliptic kernels
(regularized Weierstrass zeta/sigma and the wp derivative ladder), fits
them by boundary collocation, and locates Steklov spectra by sweeping
the smallest eigenvalue of a defect pencil.  All arithmetic is gmpy2
multiple precision under an explicit PrecisionContext.
"""

from .errors import (
    ArithmeticDomainError,
    ConditioningError,
    ConfigError,
    DegenerateCandidateError,
    GeometryError,
    ParseError,
    PoleError,
    PrecisionMismatchError,
    RankDeficiencyError,
    ReductionError,
    TorusError,
)
from .precision import (
    BigComplex,
    BigReal,
    PrecisionContext,
    format_decimal,
    parse_decimal,
)
from .lattice import Lattice, eisenstein_direct, lattice_invariants
from .elliptic import EllipticEvaluator
from .geometry import (
    BoundarySample,
    Domain,
    Hole,
    contains,
    double_samples,
    random_interior_points,
    sample_boundary,
)
from .basis import (
    BasisSpec,
    CoefficientVector,
    basis_eval,
    basis_normal_deriv,
    expand_coefficients,
)
from .linalg import (
    DenseMatrix,
    PencilReducer,
    cholesky,
    condition_report,
    least_squares,
    smallest_genpair,
)
from .laplace import (
    BoundaryData,
    LaplaceSolution,
    assemble_dirichlet,
    eval_solution,
    export_field,
    solve_laplace,
)
from .steklov import (
    SigmaPencil,
    SteklovCandidate,
    SteklovConfig,
    aposteriori_residual,
    assemble_steklov,
    export_eigenfunction,
    s_of_sigma,
    scan_and_refine,
    solve_steklov,
)

__version__ = "0.1.0"

__all__ = [
    "ArithmeticDomainError",
    "BasisSpec",
    "BigComplex",
    "BigReal",
    "BoundaryData",
    "BoundarySample",
    "CoefficientVector",
    "ConditioningError",
    "ConfigError",
    "DegenerateCandidateError",
    "DenseMatrix",
    "Domain",
    "EllipticEvaluator",
    "GeometryError",
    "Hole",
    "LaplaceSolution",
    "Lattice",
    "ParseError",
    "PencilReducer",
    "PoleError",
    "PrecisionContext",
    "PrecisionMismatchError",
    "RankDeficiencyError",
    "ReductionError",
    "SigmaPencil",
    "SteklovCandidate",
    "SteklovConfig",
    "TorusError",
    "aposteriori_residual",
    "assemble_dirichlet",
    "assemble_steklov",
    "basis_eval",
    "basis_normal_deriv",
    "cholesky",
    "condition_report",
    "contains",
    "double_samples",
    "eisenstein_direct",
    "eval_solution",
    "expand_coefficients",
    "export_eigenfunction",
    "export_field",
    "format_decimal",
    "lattice_invariants",
    "least_squares",
    "parse_decimal",
    "random_interior_points",
    "sample_boundary",
    "scan_and_refine",
    "smallest_genpair",
    "s_of_sigma",
    "solve_laplace",
    "solve_steklov",
    "__version__",
]
