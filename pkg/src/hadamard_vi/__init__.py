"""Extragradient-type method for monotone variational inequalities on Hadamard manifolds."""

from .errors import *  # noqa: F401,F403
from .fields import (
    AffineField,
    CheckReport,
    Composite,
    FieldOracle,
    GradientField,
    SampleSpec,
    SubdifferentialField,
    WeightedDistances,
    WeightedSquaredDistances,
    add_normal_cone,
    field_bound,
    field_from_json,
    lsc_spotcheck,
    membership_check,
    monotonicity_falsifier,
)
from .gap import (
    GapEstimate,
    SolutionOracle,
    eps_solution_check,
    fixed_point_residual,
    gap_estimate,
    grid_search,
    projected_gradient_descent,
    solve_reference,
)
from .manifold import (
    Euclidean,
    Hyperboloid,
    Point,
    Tangent,
    dist,
    exp,
    geodesic_point,
    inner,
    log,
    norm,
    tangent,
    tangent_basis,
    transport,
)
from .problem import ProblemSpec, load_problem, problem_from_json
from .sets import (
    EuclideanHalfSpace,
    GeodesicBall,
    Intersection,
    LogHalfSpace,
    ProjectionResult,
    WholeManifold,
    box,
    set_from_json,
    vi_residual,
)
from .solver import (
    MonitorReport,
    RunReport,
    SolverConfig,
    StepTrace,
    backtrack,
    check_stop,
    halfspace_update,
    run,
    select_u,
)

__version__ = "0.1.0"
