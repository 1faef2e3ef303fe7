"""Exact scenario-tree and Monte Carlo checks for martingale representation
under filtration enlargement of counting processes."""

__version__ = "0.1.0"

from .finite_space import (
    EXACT_TOL,
    NEVER,
    AdaptedProcess,
    Filtration,
    FiniteProbabilitySpace,
    Partition,
    PointProcess,
    StoppingTime,
    build_space,
    conditional_expectation,
    first_jump_time,
    is_adapted,
    is_predictable,
    rebind,
    stop_process,
)
from .calculus import (
    CompensatorPair,
    OrthogonalityReport,
    compensator,
    dual_projection,
    is_martingale,
    orthogonality_report,
    predictable_covariation,
    quadratic_covariation,
    stochastic_integral,
)
from .enlargement import (
    EnlargementBundle,
    build_bundle,
    initial_enlargement,
    join,
    natural_filtration,
    progressive_enlargement,
    sigma_algebra_of,
    verify_filtration_identities,
)
from .jump_measure import (
    MARKS,
    Mark,
    MarkedMeasure,
    PredictableFunction,
    compensator_measure,
    fundamental_martingales,
    integrate,
    joint_decomposition,
    jump_measure,
)
from .representation import (
    RepresentationSolution,
    independent_decomposition,
    martingale_closure,
    multiplicity,
    orthogonal_spanning_martingales,
    solve_in_basis,
    solve_prp,
    solve_triple,
    solve_wrp,
)
from .random_time import (
    RandomTimeBundle,
    avoidance_check,
    build_random_time_bundle,
    compensator_via_azema,
    cross_validation_gap,
    orthogonality_suite,
)
from .montecarlo import (
    ContinuousPath,
    McReport,
    RandomTimeSpec,
    mc_martingale_test,
    sample_random_time,
    simulate_poisson,
)
