"""Seeded Monte-Carlo experiments over the clock models.

Produces the error/bias curves behind the estimator benchmarks: repeated
count sampling at each grid time, estimation, and summary statistics
(mean, standard error, bias, the matching Cramer-Rao bound, and how many
trials produced a usable estimate). Every trial draws from its own RNG
stream derived from (master seed, grid index, trial index), so results are
a pure function of the configuration and seed: worker count and scheduling
order cannot change a single bit of the output.

``mean_estimator_curve`` switches to exact enumeration of the count space
when it is small enough, replacing sampling noise with the true estimator
expectation. ``compare_resources`` runs the three designs side by side at
an equal total qubit budget.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clocks import (
    ClockModel,
    GhzClock,
    OneQubitClock,
    TwoQubitClock,
    n_probe_count_distribution,
)
from .counts import CountVector, GhzCounts, OneQubitCounts, TwoQubitCounts
from .estimators import (
    DegenerateCountsError,
    EstimateReport,
    coarse_estimator,
    combined_estimator,
    mle_ghz,
    mle_numeric,
    mle_one_qubit,
)
from .fisher import DegenerateTimeError, classical_fisher

# Environment override for the default worker count.
THREADS_ENV = "QCLOCK_THREADS"

# Count spaces with n_probes at or below this are enumerated exactly in
# mean_estimator_curve; the multinomial case then holds at most C(15,3) = 455
# distinct count vectors.
MAX_EXACT_PROBES = 12


class EstimatorKind(enum.Enum):
    CLOSED_FORM = "closed-form"
    NUMERIC = "numeric"
    COMBINED = "combined"
    COARSE = "coarse"


class ConfigError(ValueError):
    """The experiment configuration is internally inconsistent."""


def _is_harmonic(model: TwoQubitClock) -> bool:
    return abs(model.Omega - 2.0 * model.omega) <= 1e-9 * model.Omega


@dataclass(frozen=True)
class ExperimentConfig:
    """One batch experiment: a model, probe count, time grid, and estimator."""

    model: ClockModel
    n_probes: int
    t_grid: tuple[float, ...]
    trials: int
    seed: int
    estimator: EstimatorKind = EstimatorKind.CLOSED_FORM

    def __post_init__(self):
        if not isinstance(self.n_probes, int) or isinstance(self.n_probes, bool) or self.n_probes < 1:
            raise ConfigError(f"n_probes must be a positive integer, got {self.n_probes!r}")
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        grid = tuple(float(t) for t in self.t_grid)
        if not grid:
            raise ConfigError("t_grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("t_grid must be strictly increasing")
        top = self.model.window_top
        if grid[0] < 0.0 or grid[-1] > top * (1.0 + 1e-12):
            raise ConfigError(
                f"t_grid must lie within [0, {top}] for this model, got [{grid[0]}, {grid[-1]}]"
            )
        object.__setattr__(self, "t_grid", grid)
        kind = self.estimator
        if kind in (EstimatorKind.COMBINED, EstimatorKind.COARSE) and not isinstance(
            self.model, TwoQubitClock
        ):
            raise ConfigError(f"{kind.value} estimator requires the two-qubit model")
        if (
            kind in (EstimatorKind.CLOSED_FORM, EstimatorKind.COMBINED)
            and isinstance(self.model, TwoQubitClock)
            and not _is_harmonic(self.model)
        ):
            raise ConfigError(
                "closed-form two-qubit estimation requires Omega = 2 omega; "
                "use the numeric estimator otherwise"
            )


@dataclass(frozen=True)
class ErrorCurvePoint:
    """Estimator statistics at one grid time.

    n_valid counts the contributions that produced a usable estimate
    (trials for sampled curves, count vectors for exact curves); mean,
    std_error, and bias are NaN when nothing contributed. crb is NaN where
    the Fisher information degenerates (grid edges with sin(omega t) = 0).
    """

    t: float
    mean_estimate: float
    std_error: float
    bias: float
    crb: float
    n_valid: int


@dataclass(frozen=True)
class ErrorCurve:
    points: tuple[ErrorCurvePoint, ...]

    COLUMNS = ("t", "mean_estimate", "std_error", "bias", "crb", "n_valid")

    def rows(self) -> list[tuple]:
        return [
            (p.t, p.mean_estimate, p.std_error, p.bias, p.crb, p.n_valid)
            for p in self.points
        ]


@dataclass(frozen=True)
class ResourceRow:
    """Measured precision of each design at one time, equal qubit budget.

    Columns are NaN where the grid time falls outside that design's
    identifiable window.
    """

    t: float
    dt_one_qubit: float
    dt_two_qubit: float
    dt_ghz: float
    crb_one_qubit: float
    crb_two_qubit: float
    crb_ghz: float


@dataclass(frozen=True)
class ResourceComparison:
    budget_qubits: int
    rows: tuple[ResourceRow, ...]

    COLUMNS = (
        "t",
        "dt_one_qubit",
        "dt_two_qubit",
        "dt_ghz",
        "crb_one_qubit",
        "crb_two_qubit",
        "crb_ghz",
    )

    def as_rows(self) -> list[tuple]:
        return [
            (
                r.t,
                r.dt_one_qubit,
                r.dt_two_qubit,
                r.dt_ghz,
                r.crb_one_qubit,
                r.crb_two_qubit,
                r.crb_ghz,
            )
            for r in self.rows
        ]


def trial_rng(seed: int, t_index: int, trial_index: int) -> np.random.Generator:
    """Independent RNG stream for one (grid point, trial) cell.

    Streams are derived by spawn key rather than by sequential draws, so any
    subset of cells can be computed in any order with identical results.
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(t_index, trial_index))
    )


def sample_counts(
    model: ClockModel, n_probes: int, t: float, rng: np.random.Generator
) -> CountVector:
    """Draw the outcome tallies of n_probes independent probes at time t."""
    if n_probes < 1:
        raise ValueError("n_probes must be at least 1")
    if isinstance(model, OneQubitClock):
        p_minus = model.distribution(t)["-"]
        return OneQubitCounts(n_probes, int(rng.binomial(n_probes, p_minus)))
    if isinstance(model, TwoQubitClock):
        dist = model.distribution(t)
        pvals = np.array([dist[label] for label in model.outcome_labels])
        pvals = np.clip(pvals, 0.0, 1.0)
        draw = rng.multinomial(n_probes, pvals / pvals.sum())
        return TwoQubitCounts(
            fast_minus=int(draw[3]),
            fast_plus=int(draw[2]),
            slow_minus=int(draw[1]),
            slow_plus=int(draw[0]),
        )
    if isinstance(model, GhzClock):
        # Only the parity of '-' signs is informative; its tally is binomial.
        p_odd = math.sin(0.5 * model.n_entangled * model.omega * t) ** 2
        return GhzCounts(n_probes, int(rng.binomial(n_probes, min(p_odd, 1.0))))
    raise ValueError(f"unsupported model type: {type(model).__name__}")


def apply_estimator(
    model: ClockModel, counts: CountVector, kind: EstimatorKind
) -> EstimateReport:
    if kind is EstimatorKind.NUMERIC:
        return mle_numeric(model, counts)
    if kind is EstimatorKind.COMBINED:
        return combined_estimator(counts, model.omega, model.Omega)
    if kind is EstimatorKind.COARSE:
        return coarse_estimator(counts, model.omega)
    if isinstance(model, OneQubitClock):
        return mle_one_qubit(counts, model.omega, model.chi)
    if isinstance(model, TwoQubitClock):
        return combined_estimator(counts, model.omega, model.Omega)
    return mle_ghz(counts, model.omega, model.n_entangled)


def _crb_or_nan(model: ClockModel, t: float, n_probes: int) -> float:
    try:
        return classical_fisher(model, t).crb(n_probes)
    except DegenerateTimeError:
        return math.nan


def _summarize(t: float, estimates: list[float], crb: float) -> ErrorCurvePoint:
    n_valid = len(estimates)
    if n_valid == 0:
        return ErrorCurvePoint(t, math.nan, math.nan, math.nan, crb, 0)
    arr = np.asarray(estimates)
    mean = float(arr.mean())
    std = float(arr.std(ddof=0))
    return ErrorCurvePoint(t, mean, std, mean - t, crb, n_valid)


def _sampled_point(config: ExperimentConfig, index: int, t: float) -> ErrorCurvePoint:
    estimates = []
    for j in range(config.trials):
        rng = trial_rng(config.seed, index, j)
        counts = sample_counts(config.model, config.n_probes, t, rng)
        try:
            report = apply_estimator(config.model, counts, config.estimator)
        except DegenerateCountsError:
            continue
        if report.valid:
            estimates.append(report.t_hat)
    return _summarize(t, estimates, _crb_or_nan(config.model, t, config.n_probes))


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "1"))
    if workers < 1:
        raise ValueError("worker count must be at least 1")
    return workers


def _map_grid(fn, config: ExperimentConfig, workers: int | None) -> tuple:
    workers = _resolve_workers(workers)
    items = list(enumerate(config.t_grid))
    if workers == 1 or len(items) == 1:
        return tuple(fn(config, i, t) for i, t in items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(lambda it: fn(config, it[0], it[1]), items))


def error_curve(config: ExperimentConfig, workers: int | None = None) -> ErrorCurve:
    """Sampled estimator statistics over the configured time grid.

    Trials whose estimator raised on degenerate counts or returned an
    invalid report are excluded from the moments and from n_valid.
    """
    return ErrorCurve(points=_map_grid(_sampled_point, config, workers))


def _ghz_count_distribution(model: GhzClock, n_probes: int, t: float):
    p_odd = min(math.sin(0.5 * model.n_entangled * model.omega * t) ** 2, 1.0)
    for k in range(n_probes + 1):
        weight = (
            math.comb(n_probes, k) * p_odd**k * (1.0 - p_odd) ** (n_probes - k)
        )
        yield GhzCounts(n_probes, k), weight


def _exact_point(config: ExperimentConfig, index: int, t: float) -> ErrorCurvePoint:
    if isinstance(config.model, GhzClock):
        pairs = _ghz_count_distribution(config.model, config.n_probes, t)
    else:
        pairs = n_probe_count_distribution(config.model, config.n_probes, t).items()
    total_mass = 0.0
    first = 0.0
    second = 0.0
    n_valid = 0
    for counts, weight in pairs:
        if weight == 0.0:
            continue
        try:
            report = apply_estimator(config.model, counts, config.estimator)
        except DegenerateCountsError:
            continue
        if not report.valid:
            continue
        total_mass += weight
        first += weight * report.t_hat
        second += weight * report.t_hat**2
        n_valid += 1
    crb = _crb_or_nan(config.model, t, config.n_probes)
    if total_mass == 0.0:
        return ErrorCurvePoint(t, math.nan, math.nan, math.nan, crb, 0)
    mean = first / total_mass
    var = max(second / total_mass - mean * mean, 0.0)
    return ErrorCurvePoint(t, mean, math.sqrt(var), mean - t, crb, n_valid)


def mean_estimator_curve(
    config: ExperimentConfig, workers: int | None = None
) -> ErrorCurve:
    """Estimator expectation over the grid, exactly where enumerable.

    For n_probes <= MAX_EXACT_PROBES the count space is enumerated and the
    moments are exact expectations (renormalized over the count vectors that
    produce a valid estimate; trials is ignored). Larger probe counts fall
    back to the sampled curve.
    """
    if config.n_probes <= MAX_EXACT_PROBES:
        return ErrorCurve(points=_map_grid(_exact_point, config, workers))
    return error_curve(config, workers)


def compare_resources(
    budget_qubits: int,
    omega: float,
    Omega: float,
    t_grid,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> ResourceComparison:
    """Measured precision of the three designs at an equal qubit budget.

    The budget buys budget_qubits one-qubit probes, budget_qubits/2
    two-qubit pairs, or budget_qubits/2 shots of the two-qubit GHZ state.
    The two-qubit column uses the combined estimator when Omega = 2 omega
    and the numeric maximizer otherwise. All columns share the master seed
    (common random numbers), and each is NaN at grid times outside that
    design's window.
    """
    if not isinstance(budget_qubits, int) or budget_qubits < 2 or budget_qubits % 2:
        raise ConfigError(f"budget_qubits must be an even integer >= 2, got {budget_qubits!r}")
    grid = tuple(float(t) for t in t_grid)
    models: list[tuple[ClockModel, int, EstimatorKind]] = [
        (OneQubitClock(omega=omega), budget_qubits, EstimatorKind.CLOSED_FORM),
        (
            TwoQubitClock(omega=omega, Omega=Omega),
            budget_qubits // 2,
            EstimatorKind.COMBINED
            if _is_harmonic(TwoQubitClock(omega=omega, Omega=Omega))
            else EstimatorKind.NUMERIC,
        ),
        (GhzClock(omega=omega, n_entangled=2), budget_qubits // 2, EstimatorKind.CLOSED_FORM),
    ]
    columns: list[dict[float, tuple[float, float]]] = []
    for model, n_probes, kind in models:
        top = model.window_top * (1.0 + 1e-12)
        inside = tuple(t for t in grid if 0.0 <= t <= top)
        lookup: dict[float, tuple[float, float]] = {}
        if inside:
            config = ExperimentConfig(
                model=model,
                n_probes=n_probes,
                t_grid=inside,
                trials=trials,
                seed=seed,
                estimator=kind,
            )
            curve = error_curve(config, workers)
            for point in curve.points:
                lookup[point.t] = (point.std_error, point.crb)
        columns.append(lookup)
    rows = []
    nan = (math.nan, math.nan)
    for t in grid:
        one = columns[0].get(t, nan)
        two = columns[1].get(t, nan)
        ghz = columns[2].get(t, nan)
        rows.append(
            ResourceRow(
                t=t,
                dt_one_qubit=one[0],
                dt_two_qubit=two[0],
                dt_ghz=ghz[0],
                crb_one_qubit=one[1],
                crb_two_qubit=two[1],
                crb_ghz=ghz[1],
            )
        )
    return ResourceComparison(budget_qubits=budget_qubits, rows=tuple(rows))
