"""Fractional integrals, derivatives and Abel equations in Jacobi bases.

The central object is the operational matrix of a Riemann-Liouville
operator in the orthonormal Jacobi basis of L_2((a, b), (x-a)^β (b-x)^γ).
Applying the operator to a function then reduces to a matrix-vector
product on its Jacobi coefficients.
"""

from .errors import (
    AccuracyWarning,
    BasisMismatchError,
    DegenerateFitError,
    DomainError,
    IndexRangeError,
    InterpolationError,
    JacfracError,
    NonConvergenceError,
    ParseError,
    PoleError,
    ResourceError,
    ScopeWarning,
    StabilityWarning,
)
from .jacobi import (
    BasisRange,
    Interval,
    JacobiBasis,
    basis_range,
    delta_n,
    endpoint_derivative,
    eval_all,
    eval_derivatives,
    eval_pn,
    lemma1_admissible,
    taylor_coeff,
)
from .quadrature import (
    CoeffVector,
    GridFunction,
    QuadratureRule,
    analyze,
    gauss_jacobi,
    synthesize,
    weighted_lp_norm,
)
from .opmatrix import (
    OpMatrix,
    a_entry,
    assemble,
    check_ultraspherical_symmetry,
    compose_block,
    oracle_entry,
    singular_value_report,
)
from .fracops import (
    FracOrder,
    apply_coeff,
    power_closed_form,
    rl_quadrature,
    smooth_derivative,
)
from .abel import DecayReport, estimate_decay, residual, solve, zm_condition

__version__ = "0.1.0"
