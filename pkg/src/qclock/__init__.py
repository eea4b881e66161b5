"""Simulation and estimation toolkit for few-qubit quantum clocks.

Three clock designs (one-qubit, two-qubit with a slow and a fast splitting,
and an n-qubit GHZ register) with exact outcome statistics, Fisher
information and Cramer-Rao bounds, closed-form and numeric maximum
likelihood time estimators, and seeded Monte-Carlo error/bias experiments.
"""

from .clocks import (
    ClockModel,
    GhzClock,
    OneQubitClock,
    TwoQubitClock,
    evolved_distribution,
    ghz_distribution,
    n_probe_count_distribution,
    one_qubit_distribution,
    recurrence_time,
    two_qubit_distribution,
)
from .counts import (
    CountVector,
    GhzCounts,
    OneQubitCounts,
    TwoQubitCounts,
    reduce_counts,
)
from .estimators import (
    Branch,
    DegenerateCountsError,
    EstimateReport,
    coarse_estimator,
    combined_estimator,
    log_likelihood,
    mle_ghz,
    mle_numeric,
    mle_one_qubit,
    mle_two_qubit_roots,
    two_qubit_score,
)
from .fisher import (
    DegenerateTimeError,
    FisherKind,
    FisherReport,
    classical_fisher,
    crb,
    fisher_one_qubit_analytic,
    quantum_fisher,
)
from .montecarlo import (
    ConfigError,
    ErrorCurve,
    ErrorCurvePoint,
    EstimatorKind,
    ExperimentConfig,
    ResourceComparison,
    ResourceRow,
    apply_estimator,
    compare_resources,
    error_curve,
    mean_estimator_curve,
    sample_counts,
    trial_rng,
)
from .states import (
    DiagonalHamiltonian,
    OutcomeDistribution,
    ProjectiveMeasurement,
    PureState,
    bit_labels,
    evolve,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "ClockModel",
    "ConfigError",
    "CountVector",
    "DegenerateCountsError",
    "DegenerateTimeError",
    "DiagonalHamiltonian",
    "ErrorCurve",
    "ErrorCurvePoint",
    "EstimateReport",
    "EstimatorKind",
    "ExperimentConfig",
    "FisherKind",
    "FisherReport",
    "GhzClock",
    "GhzCounts",
    "OneQubitClock",
    "OneQubitCounts",
    "OutcomeDistribution",
    "ProjectiveMeasurement",
    "PureState",
    "ResourceComparison",
    "ResourceRow",
    "TwoQubitClock",
    "TwoQubitCounts",
    "__version__",
    "apply_estimator",
    "bit_labels",
    "classical_fisher",
    "coarse_estimator",
    "combined_estimator",
    "compare_resources",
    "crb",
    "error_curve",
    "evolve",
    "evolved_distribution",
    "fisher_one_qubit_analytic",
    "ghz_distribution",
    "log_likelihood",
    "mean_estimator_curve",
    "mle_ghz",
    "mle_numeric",
    "mle_one_qubit",
    "mle_two_qubit_roots",
    "n_probe_count_distribution",
    "one_qubit_distribution",
    "quantum_fisher",
    "recurrence_time",
    "reduce_counts",
    "sample_counts",
    "trial_rng",
    "two_qubit_distribution",
    "two_qubit_score",
]
