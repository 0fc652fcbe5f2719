"""supercohom: exact cohomology of graded Lie superalgebras of Hamiltonian
vector fields (Po, H, SH families and their grading-element extensions)."""

__version__ = "0.1.0"

# Sign/grading conventions baked into this implementation; recorded in
# reports and cache keys so results from other conventions are never mixed.
CONVENTION = {"weight_shift": -2, "derivative_side": "left"}

from .algebra import (
    AlgebraBasis,
    AlgebraSpec,
    BasisElement,
    Monomial,
    StructureTable,
    SuperPolynomial,
    VariableSpec,
    algebra_bracket,
    build_structure_table,
    enumerate_basis,
    monomial_mul,
    monomial_str,
    parse_algebra_spec,
    parse_monomial,
    partial_derivative,
    poisson_bracket,
)
from .cochains import (
    ADJOINT,
    TRIVIAL,
    CellBasis,
    Cochain,
    canonicalize,
    cochain_pretty,
    cup_product,
    differential,
    differential_matrix,
    enumerate_cell_basis,
)
from .engine import CohomologyEngine, CohomologyReport, compute_cell, compute_table
from .errors import (
    BasisError,
    ConsistencyError,
    ResourceCapExceeded,
    SerializationError,
    SpecParseError,
    SuperCohomError,
)
from .linalg import (
    EchelonForm,
    QuotientResult,
    SparseMatrix,
    cokernel_constraints,
    nullspace_basis,
    quotient_space,
    row_reduce,
)
