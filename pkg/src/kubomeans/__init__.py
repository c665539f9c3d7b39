"""Kubo-Ando operator connections and means on positive semidefinite matrices.

A connection is carried by a finite positive Borel measure on [0, 1] and
evaluated as A sigma B = int A !_t B dmu(t); this package provides the
measure model, the quadrature engine behind that integral, a catalog of
classical means with closed forms, randomized property suites, and a CLI.
"""

from .errors import (
    EigenSolverError,
    IfsBudgetError,
    NotPsdError,
    QuadratureError,
    ShapeError,
    SingularPencilError,
    SpectralDomainError,
)
from .spd import (
    SpdMatrix,
    SymMatrix,
    apply_spectral_function,
    congruence,
    load_matrix,
    loewner_leq,
    matrix_power,
    random_spd,
    save_matrix,
    spectral_norm,
)
from .measures import (
    Density,
    DensityTerm,
    HalfLineDensity,
    HalfLineMeasure,
    IfsMeasure,
    UnitMeasure,
    cantor_ifs,
    cantor_measure,
    decompose_measure,
    dirac,
    geometric_density,
    halfline_dirac,
    halfline_geometric,
    halfline_logmean,
    is_probability,
    is_symmetric,
    lebesgue_density,
    logmean_density,
    measure_from_json,
    measure_to_json,
    pushforward_psi,
    pushforward_theta,
    total_mass,
)
from .quadrature import (
    DEFAULT_SPEC,
    IntegrationReport,
    QuadratureSpec,
    integrate_matrix,
    integrate_measure,
    integrate_scalar,
    node_table,
)
from .connections import (
    Connection,
    EvalReport,
    RepFunction,
    add_connections,
    decompose_connection,
    evaluate,
    evaluate_canonical,
    evaluate_report,
    is_mean,
    is_symmetric_connection,
    mean_convex_decomposition,
    parallel_sum,
    representing_function,
    scale_connection,
    symmetrize,
    transpose,
    transpose_rep_function,
    weighted_harmonic,
)
from .catalog import (
    CatalogEntry,
    catalog,
    catalog_ids,
    closed_form_eval,
    entry_from_id,
    representing_function_closed,
)
from .harness import (
    SUITES,
    SuiteReport,
    applicable_suites,
    run_all,
    run_suite,
    thread_count,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ShapeError",
    "NotPsdError",
    "SpectralDomainError",
    "EigenSolverError",
    "QuadratureError",
    "IfsBudgetError",
    "SingularPencilError",
    # spd
    "SymMatrix",
    "SpdMatrix",
    "spectral_norm",
    "apply_spectral_function",
    "matrix_power",
    "congruence",
    "loewner_leq",
    "random_spd",
    "load_matrix",
    "save_matrix",
    # measures
    "DensityTerm",
    "Density",
    "IfsMeasure",
    "UnitMeasure",
    "HalfLineDensity",
    "HalfLineMeasure",
    "dirac",
    "lebesgue_density",
    "geometric_density",
    "logmean_density",
    "cantor_ifs",
    "cantor_measure",
    "halfline_dirac",
    "halfline_geometric",
    "halfline_logmean",
    "total_mass",
    "is_probability",
    "pushforward_theta",
    "pushforward_psi",
    "is_symmetric",
    "decompose_measure",
    "measure_to_json",
    "measure_from_json",
    # quadrature
    "QuadratureSpec",
    "IntegrationReport",
    "DEFAULT_SPEC",
    "integrate_measure",
    "integrate_scalar",
    "integrate_matrix",
    "node_table",
    # connections
    "Connection",
    "RepFunction",
    "EvalReport",
    "weighted_harmonic",
    "parallel_sum",
    "evaluate",
    "evaluate_report",
    "evaluate_canonical",
    "representing_function",
    "transpose_rep_function",
    "transpose",
    "is_mean",
    "is_symmetric_connection",
    "symmetrize",
    "add_connections",
    "scale_connection",
    "decompose_connection",
    "mean_convex_decomposition",
    # catalog
    "CatalogEntry",
    "catalog",
    "catalog_ids",
    "entry_from_id",
    "closed_form_eval",
    "representing_function_closed",
    # harness
    "SuiteReport",
    "SUITES",
    "run_suite",
    "run_all",
    "applicable_suites",
    "thread_count",
]
