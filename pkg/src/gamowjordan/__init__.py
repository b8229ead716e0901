"""Higher-order Gamow-Jordan structure of S-matrix resonance poles.

Submodules
----------
model
    Resonance S-matrix, Laurent principal part, rational Hardy-class functions.
contour
    Cauchy extraction, pole term, real-axis integrals, contour deformation.
jordan
    Jordan block, Lagrange-Sylvester matrix functions, semigroup evolution.
states
    Dyad algebra for the state operators ``W^(n)`` and survival curves.
exact
    Exact Gaussian-integer verification of the decay combinatorics.
cli
    Config-driven command-line runner.
"""

from .contour import (
    IdentityReport,
    IntegralResult,
    PoleTermResult,
    QuadratureSpec,
    background_integral,
    bra_components,
    cauchy_derivative,
    cauchy_residue_coeffs,
    contour_identity_check,
    direct_integral,
    expansion_coefficients,
    gamow_components,
    pole_term,
    pole_term_from_expansion,
    pole_term_quadrature,
)
from .errors import (
    ConvergenceError,
    DomainError,
    GamowJordanError,
    HardyValidationError,
    PoleEvaluationError,
)
from .exact import (
    GaussInt,
    GaussIntPolynomial,
    binom_cancellation,
    binom_product_identity,
    identity_suite,
    reorder_check,
    symbolic_state_evolution,
)
from .jordan import (
    GamowComponents,
    JordanOperator,
    evolution_matrix,
    evolve_components,
    hamiltonian_block,
    lagrange_sylvester,
    matrix_exp_oracle,
    nilpotency_check,
)
from .model import (
    HardyFunction,
    LaurentPrincipalPart,
    ResonanceModel,
    hardy_derivative,
    hardy_validate,
    laurent_principal,
    smatrix_eval,
)
from .states import (
    DyadCoefficients,
    evolve_dyad,
    evolve_operator,
    evolve_state_closed,
    evolve_state_triple_sum,
    full_state_operator,
    pair_with_observable,
    scattering_probability_evolution,
    state_operator,
    survival_curve,
)

__version__ = "0.1.0"
