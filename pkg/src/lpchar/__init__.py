"""Generalized-mean functionals and the Hoelder/Minkowski family of inequalities
on finite atomic measure spaces, with numerical characterisation probes."""

from .errors import (
    DegenerateInputError,
    DomainError,
    LpcharError,
    PreconditionError,
    RangeError,
    SizeError,
    ValidationError,
)
from .generators import (
    Generator,
    GeneratorPair,
    conjugate_exponent,
    evaluate,
    inverse,
    mulholland_sum,
    p_functional,
    parse_generator,
    power_pair,
    quasi_mean,
)
from .inequalities import (
    InequalityReport,
    build_two_block,
    generalized_minkowski_report,
    gmi_report,
    holder_report,
    minkowski_triangle_report,
    mulholland_subadditivity_check,
    quasi_mean_midpoint_report,
    reversed_holder_report,
)
from .measure import (
    MeasureSpace,
    ProductIndex,
    StepFunction,
    integrate,
    make_space,
    partial_integral_y,
    pointwise,
    product_space,
    slice_y,
    uniform_space,
)
from .analysis import (
    ConcavityVerdict,
    OptimalityResult,
    PowerFit,
    concavity_scan,
    functional_equivalence_scan,
    hardy_condition_check,
    hessian_fd_check,
    multiplicativity_check,
    optimality_search,
    power_fit,
    power_hessian_det,
    reversed_optimality_search,
    strict_gap_demo,
)
from .search import SearchResult, counterexample_search

__version__ = "0.1.0"
