"""structflo.opspec — normal extensions and spectra of multipoint operators -u'' + iAu.

Quick start::

    import numpy as np
    from structflo.opspec import (
        Block, CoefficientMatrix, Interval, canonical_unitary, det_root_search,
    )

    block = Block(1, Interval(0.0, 1.0), CoefficientMatrix(np.array([[2.0]])))
    w = canonical_unitary("periodic", block.dim)
    for ev in det_root_search(block, w):
        print(ev.value, ev.multiplicity)

Discrete engine::

    from structflo.opspec.discrete import discretize, eigen, normality_residual

    op = discretize(block, w, m=201)
    print(normality_residual(op))

Whole problems from a config or a bundled preset::

    from structflo.opspec import load_preset, solve_problem

    config = load_preset("mixed_three")
    report = solve_problem(config.problem, engine="both", region=config.search)
    df = report.to_dataframe()
"""

from structflo.opspec._errors import (
    BoundaryEncodingError,
    ConfigError,
    EigenSolverError,
    GridTooCoarseError,
    MatchingError,
    MatrixValidationError,
    OpspecError,
    ResourceCapError,
    ShapeError,
)
from structflo.opspec._results import Eigenvalue, PairingRow, SearchRegion, SpectrumReport
from structflo.opspec.analytic import analytic_spectrum, characteristic_matrix, det_root_search
from structflo.opspec.boundary import (
    AdmissibilityReport,
    BoundaryUnitary,
    BoundaryVector,
    admissibility_check,
    boundary_residual,
    canonical_unitary,
    gamma1,
    gamma2,
)
from structflo.opspec.config import (
    ProblemConfig,
    list_presets,
    load_config,
    load_preset,
    parse_config,
)
from structflo.opspec.directsum import (
    CounterexampleSpec,
    MultipointProblem,
    aggregate_spectrum,
    bounded_coefficient_check,
    counterexample_norms,
    direct_sum_membership,
    project_block,
    solve_problem,
)
from structflo.opspec.hilbert import (
    Block,
    CoefficientMatrix,
    GridFunction,
    Interval,
    apply_expression,
    derivative,
    generate_minimal_domain_function,
    inner_product,
    minimal_domain_test,
)

__version__ = "0.1.0"

__all__ = [
    # Spaces and functions
    "Interval",
    "CoefficientMatrix",
    "Block",
    "GridFunction",
    "inner_product",
    "derivative",
    "apply_expression",
    "minimal_domain_test",
    "generate_minimal_domain_function",
    # Boundary conditions
    "BoundaryVector",
    "BoundaryUnitary",
    "AdmissibilityReport",
    "gamma1",
    "gamma2",
    "boundary_residual",
    "canonical_unitary",
    "admissibility_check",
    # Spectra
    "Eigenvalue",
    "SearchRegion",
    "SpectrumReport",
    "PairingRow",
    "characteristic_matrix",
    "det_root_search",
    "analytic_spectrum",
    # Direct sums
    "MultipointProblem",
    "CounterexampleSpec",
    "aggregate_spectrum",
    "project_block",
    "counterexample_norms",
    "bounded_coefficient_check",
    "direct_sum_membership",
    "solve_problem",
    # Configuration
    "ProblemConfig",
    "parse_config",
    "load_config",
    "load_preset",
    "list_presets",
    # Errors
    "OpspecError",
    "ShapeError",
    "GridTooCoarseError",
    "MatrixValidationError",
    "BoundaryEncodingError",
    "EigenSolverError",
    "ResourceCapError",
    "MatchingError",
    "ConfigError",
]
