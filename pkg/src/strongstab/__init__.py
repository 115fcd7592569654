"""Strongly stabilizing weighted-sensitivity controllers for SISO time-delay plants.

The pipeline runs plant -> factorization -> interpolation data -> Pick
feasibility -> interpolant (classical, strip-constrained, or rational unit) ->
controller.  Every transfer function is an evaluable object; the only
closed-form rationals are the Blaschke factors, the weight and the
interpolants.
"""

from .errors import (
    ConditionError,
    InfeasibleError,
    InputError,
    NumericalError,
    PoleError,
    StrongStabError,
)
from .rational import (
    BlaschkeProduct,
    Polynomial,
    RationalFn,
    blaschke_from_zeros,
    hinf_norm_axis,
    mobius_substitute,
    poly_roots,
)
from .quasipoly import QuasiPolynomial, RhpZeroReport, classify, qp_conjugate, rhp_zeros
from .factorization import PlantFactorization, factorize, regularize_outer, relative_degree
from .nevpick import (
    InterpData,
    NPParametrization,
    gamma_ss,
    gamma_wsm,
    interp_data,
    np_interpolant,
    np_parametrization,
    pick_matrix,
)
from .strip import StripInterpolant, StripMaps, curve_gamma_vs_rho, feasible_gamma_interval, gamma_ss_rho, strip_interpolant
from .unitsearch import charpoly, find_unit, stability_boundaries, verify_unit
from .synthesis import assemble_controller, controller_norm_bound, verify_design

__version__ = "0.1.0"
