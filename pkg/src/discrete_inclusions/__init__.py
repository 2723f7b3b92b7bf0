"""Multiple solutions of discrete differential inclusions ``Au in lam [g-(u), g+(u)]``.

The package builds the structured SPD matrices of second-order, fourth-order
and two-dimensional difference problems, checks the hypotheses that
guarantee three (or two nontrivial) solutions, computes the admissible
lambda range, and finds and certifies the solutions numerically.
"""

from .errors import *  # noqa: F401,F403
from .matrix_zoo import (
    GridShape,
    SpdMatrix,
    Spectrum,
    build_fourth_order,
    build_grid_laplacian,
    build_second_order,
    build_tridiagonal,
    grid_index,
    grid_index_inverse,
    jacobi_eigenvalues,
    ones_quadratic,
    quadratic_form,
    spectrum,
    tridiagonal_eigenvalue,
)
from .nonlinearity import (
    AsymptoticBound,
    PiecewiseNonlinearity,
    WeightVector,
    asymptotic_linear_bound,
    asymptotic_quadratic_bound,
    constant,
    envelope_minus,
    envelope_plus,
    linear,
    potential,
    shared,
    step,
    sup_potential,
    truncated_power,
    value_range,
)
from .hypotheses import (
    CorollaryReport,
    HypothesisReport,
    check_g1,
    check_g2,
    check_h_conditions,
    lambda_interval,
    minimize_delta_ratio,
    optimize_threshold,
    specialize_fourth_order,
    specialize_grid,
    specialize_fourth_order_h,
    specialize_tridiagonal,
)
from .variational import (
    CertifiedSolution,
    InclusionProblem,
    certify,
    descent_direction,
    gradient_box,
    is_solution,
    j_lambda,
    phi,
    psi,
    residual,
)
from .solvers import (
    MultiplicityReport,
    SolveConfig,
    brute_force_oracle,
    find_multiplicity,
    minimize_from,
    mountain_pass,
    multistart,
    polish,
)
from .scenario import Scenario, load_scenario, run_scenario

__version__ = "0.1.0"
