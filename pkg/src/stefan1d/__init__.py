"""Maximal solutions of the one-dimensional supercooled Stefan problem.

The package computes the saturated two-block target measure of a step
density on a bounded open set, certifies it with exact Newtonian potential
order checks, reproduces the monotonicity and Lipschitz failure examples
and the weak-convergence stability of the target map, and cross-validates
everything with a front-freezing Brownian particle system.
"""

from .errors import (
    AdmissibilityError,
    InfeasibilityError,
    ParameterError,
    RangeError,
    SamplingError,
    SingularityError,
    SupportError,
    ValidationError,
    VerificationError,
)
from .measure import (
    DEFAULT_TOL,
    OpenSet1D,
    StepMeasure,
    canonicalize,
    cdf,
    first_moment,
    indicator,
    l1_distance,
    make_step_measure,
    mass,
    measures_allclose,
    pointwise_leq,
    positive_part_l1,
    quantile,
    restrict,
    sum_measures,
    zero_measure,
)
from .particles import (
    ComparisonReport,
    ComponentRunReport,
    FrontState,
    RunReport,
    SimConfig,
    compare_to_formula,
    run,
    sample_initial,
)
from .potential import (
    OrderCertificate,
    PiecewiseLinear,
    PiecewiseQuadratic,
    dominates,
    kernel,
    order_leq_sh_O,
    potential,
    potential_derivative,
)
from .repro import ReproManifest, run_manifest
from .solver import (
    BlockPair,
    ConcaveGrid,
    CostIndependenceReport,
    MaximalSolution,
    check_admissible,
    check_c0_sufficient,
    critical_point,
    independence_check,
    moment_window,
    primal_objective,
    solve,
    solve_by_sweep,
    solve_component,
    sweep_states,
)
from .stability import (
    LipschitzFamilyParams,
    StabilityReport,
    WeakConvergenceTable,
    lipschitz_closed_form_gap,
    lipschitz_closed_form_ratio,
    lipschitz_pair,
    lipschitz_ratio,
    monotonicity_report,
    weak_convergence_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "BlockPair",
    "ComparisonReport",
    "ComponentRunReport",
    "ConcaveGrid",
    "CostIndependenceReport",
    "DEFAULT_TOL",
    "FrontState",
    "InfeasibilityError",
    "LipschitzFamilyParams",
    "MaximalSolution",
    "OpenSet1D",
    "OrderCertificate",
    "ParameterError",
    "PiecewiseLinear",
    "PiecewiseQuadratic",
    "RangeError",
    "ReproManifest",
    "RunReport",
    "SamplingError",
    "SimConfig",
    "SingularityError",
    "StabilityReport",
    "StepMeasure",
    "SupportError",
    "ValidationError",
    "VerificationError",
    "WeakConvergenceTable",
    "canonicalize",
    "cdf",
    "check_admissible",
    "check_c0_sufficient",
    "compare_to_formula",
    "critical_point",
    "dominates",
    "first_moment",
    "independence_check",
    "indicator",
    "kernel",
    "l1_distance",
    "lipschitz_closed_form_gap",
    "lipschitz_closed_form_ratio",
    "lipschitz_pair",
    "lipschitz_ratio",
    "make_step_measure",
    "mass",
    "measures_allclose",
    "moment_window",
    "monotonicity_report",
    "order_leq_sh_O",
    "pointwise_leq",
    "positive_part_l1",
    "potential",
    "potential_derivative",
    "primal_objective",
    "quantile",
    "restrict",
    "run",
    "run_manifest",
    "sample_initial",
    "solve",
    "solve_by_sweep",
    "solve_component",
    "sum_measures",
    "sweep_states",
    "weak_convergence_experiment",
    "zero_measure",
]
