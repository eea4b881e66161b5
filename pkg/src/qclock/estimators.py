"""Maximum-likelihood time estimators for the clock readouts.

Each estimator maps an observed count vector to a time estimate inside the
window where the clock's statistics identify t uniquely:

* one-qubit:  t_hat = (2/omega) asin sqrt(k_minus / (n chi)),
  window [0, pi/omega];
* GHZ:        t_hat = (2/(n omega)) asin sqrt(k_odd / shots),
  window [0, pi/(n omega)];
* two-qubit with Omega = 2 omega: the score has four stationary points per
  period, found exactly as roots of a quartic in u = tan(omega t / 2). The
  coarse (slow-sector) tally picks the correct branch, extending the usable
  window to the full slow period [0, pi/omega].

``mle_numeric`` maximizes the log-likelihood on a grid plus golden-section
refinement and is the reference the closed forms are checked against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .clocks import ClockModel, GhzClock, OneQubitClock, TwoQubitClock
from .counts import CountVector, GhzCounts, OneQubitCounts, TwoQubitCounts, reduce_counts

# Grid resolution and convergence target for the numeric maximizer.
GRID_POINTS = 2001
REFINE_TOL = 1e-10


class Branch(enum.Enum):
    """Which likelihood branch produced an estimate."""

    SINGLE_WINDOW = "single-window"
    GHZ_WINDOW = "ghz-window"
    COARSE_ONLY = "coarse-only"
    ROOT1 = "root1"
    ROOT3 = "root3"


class DegenerateCountsError(ValueError):
    """The observed counts leave the estimator undefined."""


@dataclass(frozen=True)
class EstimateReport:
    """A time estimate, the branch that produced it, and its validity window."""

    t_hat: float
    branch: Branch
    window: tuple[float, float]
    coarse_t: float | None = None
    valid: bool = True


def _require(counts, kind, name: str):
    if not isinstance(counts, kind):
        raise TypeError(f"{name} expects {kind.__name__}, got {type(counts).__name__}")


def mle_one_qubit(counts: OneQubitCounts, omega: float, chi: float = 1.0) -> EstimateReport:
    """Closed-form MLE for the one-qubit clock.

    Inverts the observed |-> fraction through P_- = chi sin^2(omega t / 2);
    fractions exceeding chi clip to the window edge pi/omega and are flagged
    invalid (possible only for chi < 1). chi = 0 leaves t unidentifiable and
    raises.
    """
    _require(counts, OneQubitCounts, "mle_one_qubit")
    counts = reduce_counts(counts)
    clock = OneQubitClock(omega=omega, chi=chi)
    if clock.chi == 0.0:
        raise ValueError("chi = 0 statistics carry no time dependence")
    if counts.n == 0:
        raise DegenerateCountsError("no probes recorded")
    ratio = counts.k_minus / (counts.n * clock.chi)
    clipped = ratio > 1.0
    t_hat = 2.0 / clock.omega * math.asin(math.sqrt(min(1.0, ratio)))
    return EstimateReport(
        t_hat, Branch.SINGLE_WINDOW, (0.0, math.pi / clock.omega), valid=not clipped
    )


def mle_ghz(counts: GhzCounts, omega: float, n_entangled: int) -> EstimateReport:
    """Closed-form MLE for the GHZ clock.

    The parity tally is binomial with p_odd = sin^2(n omega t / 2), so the
    estimate is the one-qubit form at the amplified frequency n omega.
    """
    _require(counts, GhzCounts, "mle_ghz")
    counts = reduce_counts(counts)
    clock = GhzClock(omega=omega, n_entangled=n_entangled)
    if counts.n == 0:
        raise DegenerateCountsError("no probes recorded")
    eff = clock.n_entangled * clock.omega
    t_hat = 2.0 / eff * math.asin(math.sqrt(counts.k_odd / counts.n))
    return EstimateReport(t_hat, Branch.GHZ_WINDOW, (0.0, math.pi / eff))


def _check_harmonic(omega: float, Omega: float) -> tuple[float, float]:
    omega = float(omega)
    Omega = float(Omega)
    if omega <= 0.0 or Omega <= 0.0:
        raise ValueError("frequencies must be positive")
    if abs(Omega - 2.0 * omega) > 1e-9 * Omega:
        raise ValueError(
            f"closed-form two-qubit estimators require Omega = 2 omega, "
            f"got omega={omega}, Omega={Omega}"
        )
    return omega, Omega


def mle_two_qubit_roots(
    counts: TwoQubitCounts, omega: float = 0.5, Omega: float = 1.0
) -> tuple[float, float, float, float]:
    """Stationary points of the two-qubit log-likelihood, in closed form.

    With Omega = 2 omega and u = tan(omega t / 2) the score vanishes where

        (k1 + k4) u^4 - (2 k1 + 4 k2 + k3 + k4) u^2 + (k1 + k3) = 0,

    k1..k4 being the (fast-, fast+, slow-, slow+) tallies. Both squared
    roots are real and non-negative, and u_-^2 <= 1 <= u_+^2 always (the
    quartic is <= 0 at u = 1), so the first root lies at or below the
    half-window pi/(2 omega) and the third at or above it. Returned as

        (t1, -t1, t3, -t3),  t1 = (2/omega) atan(u_-),  t3 = (2/omega) atan(u_+),

    the principal-period representatives; the negative pair are their
    time-reversed images. All slow-sector information concentrated in the
    fast tallies being absent (k1 = k4 = 0) leaves the quartic degenerate
    and raises.
    """
    _require(counts, TwoQubitCounts, "mle_two_qubit_roots")
    counts = reduce_counts(counts)
    omega, Omega = _check_harmonic(omega, Omega)
    k1, k2 = counts.fast_minus, counts.fast_plus
    k3, k4 = counts.slow_minus, counts.slow_plus
    lead = k1 + k4
    if lead == 0:
        raise DegenerateCountsError(
            "fast-minus and slow-plus tallies are both zero: quartic degenerates"
        )
    a_coef = 2 * k1 + 4 * k2 + k3 + k4
    rad = (k4 - k3) ** 2 + 8 * (k4 + k3 + 2 * k1) * k2 + 16 * k2 * k2
    root = math.sqrt(rad)
    u_minus_sq = (a_coef - root) / (2.0 * lead)
    u_plus_sq = (a_coef + root) / (2.0 * lead)
    u_minus = math.sqrt(max(u_minus_sq, 0.0))
    u_plus = math.sqrt(u_plus_sq)
    t1 = 2.0 / omega * math.atan(u_minus)
    t3 = 2.0 / omega * math.atan(u_plus)
    return (t1, -t1, t3, -t3)


def coarse_estimator(counts: TwoQubitCounts, omega: float = 0.5) -> EstimateReport:
    """MLE from the slow sector alone, resolving the full window [0, pi/omega].

    Conditioned on landing in the slow sector the '-' tally is binomial with
    p = sin^2(omega t / 2), so t_hat = (2/omega) atan sqrt(k_minus/k_plus),
    with the k_plus = 0 edge mapping to the window top. No slow-sector
    events at all leave t unidentified and raise.
    """
    _require(counts, TwoQubitCounts, "coarse_estimator")
    counts = reduce_counts(counts)
    omega = float(omega)
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    kp, km = counts.coarse_plus, counts.coarse_minus
    if kp + km == 0:
        raise DegenerateCountsError("no slow-sector events recorded")
    if kp == 0:
        t_hat = math.pi / omega
    else:
        t_hat = 2.0 / omega * math.atan(math.sqrt(km / kp))
    return EstimateReport(t_hat, Branch.COARSE_ONLY, (0.0, math.pi / omega))


def combined_estimator(
    counts: TwoQubitCounts, omega: float = 0.5, Omega: float = 1.0
) -> EstimateReport:
    """Two-qubit MLE over the full slow period.

    The quartic yields one stationary maximum in each half of the window;
    the coarse estimate selects the half (ties go to the lower branch). The
    chosen root is the global maximizer of the likelihood on its half.
    """
    omega, Omega = _check_harmonic(omega, Omega)
    coarse = coarse_estimator(counts, omega)
    roots = mle_two_qubit_roots(counts, omega, Omega)
    window = (0.0, math.pi / omega)
    half = 0.5 * math.pi / omega
    if coarse.t_hat <= half:
        t_hat, branch = roots[0], Branch.ROOT1
    else:
        t_hat, branch = roots[2], Branch.ROOT3
    return EstimateReport(t_hat, branch, window, coarse_t=coarse.t_hat)


def two_qubit_score(
    counts: TwoQubitCounts, t, omega: float = 0.5, Omega: float = 1.0
):
    """Derivative of the two-qubit log-likelihood at time t.

        score(t) = k1 Omega cot(Omega t/2) - k2 Omega tan(Omega t/2)
                 + k3 omega cot(omega t/2) - k4 omega tan(omega t/2)

    Terms with a zero tally are omitted entirely so their poles do not
    contaminate the value. Accepts scalar or array t.
    """
    _require(counts, TwoQubitCounts, "two_qubit_score")
    t_arr = np.asarray(t, dtype=float)
    total = np.zeros_like(t_arr)
    half_fast = 0.5 * Omega * t_arr
    half_slow = 0.5 * omega * t_arr
    if counts.fast_minus:
        total = total + counts.fast_minus * Omega * np.cos(half_fast) / np.sin(half_fast)
    if counts.fast_plus:
        total = total - counts.fast_plus * Omega * np.tan(half_fast)
    if counts.slow_minus:
        total = total + counts.slow_minus * omega * np.cos(half_slow) / np.sin(half_slow)
    if counts.slow_plus:
        total = total - counts.slow_plus * omega * np.tan(half_slow)
    return float(total) if np.isscalar(t) or t_arr.ndim == 0 else total


def _xlogy(k: int, p: np.ndarray) -> np.ndarray:
    # k log p with the conventions k = 0 -> 0 and p = 0, k > 0 -> -inf.
    if k == 0:
        return np.zeros_like(p)
    with np.errstate(divide="ignore"):
        return k * np.log(p)


def log_likelihood(model: ClockModel, counts: CountVector, t):
    """Log-likelihood of the counts at time(s) t, up to count-only constants.

    Vectorized over t. Outcomes with zero tally contribute nothing even
    where their probability vanishes; a positive tally against a vanishing
    probability gives -inf.
    """
    t_arr = np.asarray(t, dtype=float)
    if isinstance(model, OneQubitClock):
        _require(counts, OneQubitCounts, "log_likelihood[one-qubit]")
        p_minus = model.chi * np.sin(0.5 * model.omega * t_arr) ** 2
        total = _xlogy(counts.k_minus, p_minus) + _xlogy(counts.k_plus, 1.0 - p_minus)
    elif isinstance(model, TwoQubitClock):
        _require(counts, TwoQubitCounts, "log_likelihood[two-qubit]")
        fast = np.sin(0.5 * model.Omega * t_arr) ** 2
        slow = np.sin(0.5 * model.omega * t_arr) ** 2
        total = (
            _xlogy(counts.fast_minus, 0.5 * fast)
            + _xlogy(counts.fast_plus, 0.5 * (1.0 - fast))
            + _xlogy(counts.slow_minus, 0.5 * slow)
            + _xlogy(counts.slow_plus, 0.5 * (1.0 - slow))
        )
    elif isinstance(model, GhzClock):
        _require(counts, GhzCounts, "log_likelihood[ghz]")
        scale = 2.0 ** (model.n_entangled - 1)
        p_odd = np.sin(0.5 * model.n_entangled * model.omega * t_arr) ** 2
        total = _xlogy(counts.k_odd, p_odd / scale) + _xlogy(
            counts.k_even, (1.0 - p_odd) / scale
        )
    else:
        raise TypeError(f"unsupported model type: {type(model).__name__}")
    return float(total) if np.isscalar(t) or t_arr.ndim == 0 else total


def _golden_section_max(f, lo: float, hi: float, tol: float) -> float:
    # Golden-section search for a maximum of a unimodal f on [lo, hi].
    invphi = 0.5 * (math.sqrt(5.0) - 1.0)
    invphi2 = 1.0 - invphi
    a, b = lo, hi
    h = b - a
    c = a + invphi2 * h
    d = a + invphi * h
    fc = f(c)
    fd = f(d)
    while h > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + invphi2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + invphi * h
            fd = f(d)
    return 0.5 * (a + b)


def mle_numeric(
    model: ClockModel,
    counts: CountVector,
    window: tuple[float, float] | None = None,
    grid_points: int = GRID_POINTS,
) -> EstimateReport:
    """Grid-plus-refinement maximizer of the log-likelihood over a window.

    Counts are reduced by their common divisor first, which rescales the
    log-likelihood uniformly and makes the returned estimate exactly
    invariant under integer rescaling of the counts. The grid argmax is
    refined by golden-section search between its neighbors. A likelihood
    with no finite variation over the window (e.g. chi = 0, or counts that
    are impossible at every t) yields the window midpoint flagged invalid.
    """
    counts = reduce_counts(counts)
    if window is None:
        window = (0.0, model.window_top)
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError(f"empty window {window!r}")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    branch = Branch.GHZ_WINDOW if isinstance(model, GhzClock) else Branch.SINGLE_WINDOW

    ts = np.linspace(lo, hi, grid_points)
    ll = log_likelihood(model, counts, ts)
    finite = np.isfinite(ll)
    midpoint = 0.5 * (lo + hi)
    if not finite.any():
        return EstimateReport(midpoint, branch, (lo, hi), valid=False)
    ll_max = float(ll[finite].max())
    ll_min = float(ll[finite].min())
    if ll_max - ll_min <= 1e-12 * max(1.0, abs(ll_max)):
        return EstimateReport(midpoint, branch, (lo, hi), valid=False)

    i = int(np.argmax(np.where(finite, ll, -np.inf)))
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, grid_points - 1)]
    t_hat = _golden_section_max(
        lambda x: log_likelihood(model, counts, x),
        float(a),
        float(b),
        REFINE_TOL * max(1.0, abs(hi)),
    )
    return EstimateReport(t_hat, branch, (lo, hi))
