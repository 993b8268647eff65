"""Exact sums-of-squares arithmetic in the ring of integers of the complex
biquadratic field Q(sqrt(-m), sqrt(n)), m = 3 and n = 1 (mod 4) squarefree."""

from .arith import (
    Factorization,
    FactorizationBudgetError,
    factor,
    four_squares,
    is_prime,
    is_squarefree,
    jacobi,
    three_square_criterion,
    two_square_criterion,
)
from .classify import (
    Certificate,
    ClassificationReport,
    RoutesDisagreeError,
    certify_g3,
    classify_m,
)
from .field import (
    FieldParams,
    IntegralCoords,
    KElem,
    QuadElem,
    basis_change_determinant,
    char_poly,
    conjugates,
    integral_basis,
    is_algebraic_integer,
    is_integral,
    kelem_from_dict,
    make_params,
    mul,
    norm,
    to_integral_coords,
    trace,
    trace_in_basis_form,
    trace_to_subfield,
)
from .pell import (
    Branch,
    CaseTrace,
    ContinuedFraction,
    NoConsistentBranchError,
    PellSolution,
    case_analysis,
    cf_sqrt,
    convergents,
    fundamental_solution,
    solve_target,
)
from .squares import (
    SLevelResult,
    SearchExhaustedError,
    SquaresRep,
    compress,
    min_squares_bounded,
    minus_one_as_two_squares,
    moser_table,
    obstruction_scan,
    product_rep,
    quad_ring_level,
    represent_any,
    represent_basis_element,
    represent_integer,
    s_level,
    two_square_obstruction,
)

__version__ = "0.1.0"
