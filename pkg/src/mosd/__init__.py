"""Multiobjective steepest descent: direction, Armijo descent, continuity lab."""

__version__ = "0.1.0"

from .continuity import (
    ExponentFit,
    HolderSample,
    counterexample_pair,
    fit_exponent,
    holder_sample,
    norm_lipschitz_check,
    probe_region,
)
from .descent import DescentParams, DescentTrace, armijo_step, run_descent
from .direction import (
    DirectionResult,
    KktResiduals,
    is_pareto_critical,
    phi,
    primal_value,
    steepest_descent_direction,
)
from .errors import (
    DomainError,
    InvalidInputError,
    LinesearchFailedError,
    MosdError,
    NotConvergedError,
    UnsupportedError,
)
from .minnorm import MinNormResult, min_norm_bruteforce, min_norm_point, project_segment
from .problems import (
    REGISTRY,
    Problem,
    Region,
    RegionConstants,
    check_gradients,
    estimate_region_constants,
    evaluate,
    get_problem,
    jacobian,
    load_problem,
    problem_from_descriptor,
)
