"""Adversary lower bounds for Boolean functions, verified in the
Hamiltonian oracle model by exact piecewise-constant Schrodinger evolution."""

from .adversary import (
    AdversaryMatrix,
    Mode,
    SpectralReport,
    build_uniform_gamma,
    gamma_from_json,
    gamma_sub,
    gamma_to_json,
    min_time_bound,
    optimize_weights,
    sign_conjugate,
    spectral_report,
    validate,
)
from .boolfn import BooleanFunction, differing_indices, evaluate, make_named
from .casestudies import CASE_STUDY_NAMES, CaseStudy, get_case_study
from .errors import (
    AdvBoundError,
    DegenerateMatrixError,
    IntegrationError,
    ValidationError,
)
from .evolve import (
    ProgressTrace,
    Trajectory,
    check_derivative_bound,
    check_final_distinguishability,
    evolve,
    fgg_measure,
    output_condition,
    progress_trace,
    schedule_unitary,
)
from .oracle import (
    QUERY,
    QUERY_UNIT,
    DriverSchedule,
    HamiltonianOracle,
    OracleBlock,
    Segment,
    assemble,
    compile_discrete,
    compile_fractional,
    standard_query_oracle,
    uniform_query_state,
)

__version__ = "0.1.0"
