"""The three clock designs and their outcome statistics.

A clock here is a fixed initial state, a Hamiltonian diagonal in its
eigenbasis, and a fixed projective readout. Three designs are covered:

* ``OneQubitClock`` -- a single qubit prepared in |+>, read out in the
  |+/-> basis. The general energy eigenbasis is parameterized by a mixing
  angle; the readout statistics depend on it only through the visibility
  chi = sin^2(2 theta), giving P_-(t) = chi sin^2(omega t / 2).
* ``TwoQubitClock`` -- two qubits prepared in |+>|+> with level splittings
  omega (first qubit |0> sector) and Omega (first qubit |1> sector),
  read out with the four projectors |0,+/-><0,+/-| and |1,+/-><1,+/-|.
  The slow pair oscillates at omega, the fast pair at Omega.
* ``GhzClock`` -- n qubits prepared in (|0...0> + |1...1>)/sqrt(2) with all
  local splittings equal to omega, read out in the product |+/-> basis.
  Only the parity of '-' outcomes is informative and it oscillates at the
  amplified frequency n*omega.

Closed-form distributions are the fast path; ``evolved_distribution``
computes the same thing through explicit state evolution and projection and
exists so tests can cross-check the closed forms against first principles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .counts import CountVector, GhzCounts, OneQubitCounts, TwoQubitCounts
from .states import (
    DiagonalHamiltonian,
    OutcomeDistribution,
    ProjectiveMeasurement,
    PureState,
    evolve,
)

# Count spaces up to this many probes are enumerated exactly elsewhere; the
# factor also caps the GHZ register size (2**n amplitudes).
MAX_GHZ_QUBITS = 16


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")
    return value


@dataclass(frozen=True)
class OneQubitClock:
    """Single-qubit clock with frequency omega and visibility chi."""

    omega: float
    chi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "omega", _check_positive("omega", self.omega))
        chi = float(self.chi)
        if not 0.0 <= chi <= 1.0:
            raise ValueError(f"chi must lie in [0, 1], got {chi!r}")
        object.__setattr__(self, "chi", chi)

    @classmethod
    def from_mixing_angle(cls, theta: float, omega: float) -> "OneQubitClock":
        """Clock whose energy eigenbasis is rotated by theta from |+/->.

        The eigenvectors are |e0> = cos(theta)|+> - sin(theta)|-> and
        |e1> = sin(theta)|+> + cos(theta)|->, giving chi = sin^2(2 theta).
        """
        return cls(omega=omega, chi=math.sin(2.0 * float(theta)) ** 2)

    @classmethod
    def from_eigenbasis(
        cls, a: float, b: float, c: float, d: float, omega: float, tol: float = 1e-9
    ) -> "OneQubitClock":
        """Clock from eigenvector coefficients |e0> = a|+> - b|->, |e1> = c|+> + d|->.

        The coefficients must satisfy a^2 + b^2 = 1, c^2 + d^2 = 1 and
        a c - b d = 0 (orthonormal eigenbasis). The visibility follows from
        the Born rule: P_-(t) = [4 (b d)^2 / (a d + b c)^2] sin^2(omega t/2),
        and on the constraint surface (b d)^2 = a b c d, so
        chi = 4 a b c d / (a d + b c)^2.
        """
        if abs(a * a + b * b - 1.0) > tol or abs(c * c + d * d - 1.0) > tol:
            raise ValueError("eigenvector coefficients are not normalized")
        if abs(a * c - b * d) > tol:
            raise ValueError("eigenvectors are not orthogonal (a c - b d != 0)")
        denom = (a * d + b * c) ** 2
        if denom <= tol * tol:
            raise ValueError("degenerate eigenbasis: a d + b c = 0")
        chi = 4.0 * a * b * c * d / denom
        chi = min(max(chi, 0.0), 1.0)
        return cls(omega=omega, chi=chi)

    @property
    def kind(self) -> str:
        return "one-qubit"

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        return ("+", "-")

    @property
    def window_top(self) -> float:
        """Largest time identifiable from the statistics: pi / omega."""
        return math.pi / self.omega

    @property
    def mixing_angle(self) -> float:
        # chi = sin^2(2 theta) with theta in [0, pi/4]
        return 0.5 * math.asin(math.sqrt(self.chi))

    def initial_state(self) -> PureState:
        th = self.mixing_angle
        return PureState(np.array([math.cos(th), math.sin(th)]), ("0", "1"))

    def hamiltonian(self) -> DiagonalHamiltonian:
        # Energies in the clock's own eigenbasis; omega = E1 - E0.
        return DiagonalHamiltonian(
            np.array([-0.5 * self.omega, 0.5 * self.omega]), ("0", "1")
        )

    def measurement(self) -> ProjectiveMeasurement:
        th = self.mixing_angle
        plus = np.array([[math.cos(th), math.sin(th)]])
        minus = np.array([[-math.sin(th), math.cos(th)]])
        return ProjectiveMeasurement((("+", plus), ("-", minus)))

    def distribution(self, t: float) -> OutcomeDistribution:
        return one_qubit_distribution(self.chi, self.omega, t)


@dataclass(frozen=True)
class TwoQubitClock:
    """Two-qubit clock with slow splitting omega and fast splitting Omega."""

    omega: float
    Omega: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _check_positive("omega", self.omega))
        object.__setattr__(self, "Omega", _check_positive("Omega", self.Omega))

    @property
    def kind(self) -> str:
        return "two-qubit"

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        return ("0+", "0-", "1+", "1-")

    @property
    def window_top(self) -> float:
        """Top of the slow sector's one-to-one window: pi / omega."""
        return math.pi / self.omega

    def initial_state(self) -> PureState:
        return PureState(np.full(4, 0.5), ("00", "01", "10", "11"))

    def hamiltonian(self) -> DiagonalHamiltonian:
        return DiagonalHamiltonian(
            np.array(
                [0.5 * self.omega, -0.5 * self.omega, 0.5 * self.Omega, -0.5 * self.Omega]
            ),
            ("00", "01", "10", "11"),
        )

    def measurement(self) -> ProjectiveMeasurement:
        s = 1.0 / math.sqrt(2.0)
        return ProjectiveMeasurement(
            (
                ("0+", np.array([[s, s, 0.0, 0.0]])),
                ("0-", np.array([[s, -s, 0.0, 0.0]])),
                ("1+", np.array([[0.0, 0.0, s, s]])),
                ("1-", np.array([[0.0, 0.0, s, -s]])),
            )
        )

    def distribution(self, t: float) -> OutcomeDistribution:
        return two_qubit_distribution(self.omega, self.Omega, t)


@dataclass(frozen=True)
class GhzClock:
    """n-qubit GHZ clock with local splitting omega."""

    omega: float
    n_entangled: int = 2

    def __post_init__(self):
        object.__setattr__(self, "omega", _check_positive("omega", self.omega))
        n = self.n_entangled
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ValueError(f"n_entangled must be an integer >= 2, got {n!r}")
        if n > MAX_GHZ_QUBITS:
            raise ValueError(f"n_entangled = {n} exceeds the supported maximum {MAX_GHZ_QUBITS}")

    @property
    def kind(self) -> str:
        return "ghz"

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        n = self.n_entangled
        return tuple(
            format(i, f"0{n}b").replace("0", "+").replace("1", "-") for i in range(2**n)
        )

    @property
    def window_top(self) -> float:
        """One-to-one window shrinks with the amplified frequency: pi / (n omega)."""
        return math.pi / (self.n_entangled * self.omega)

    def initial_state(self) -> PureState:
        amps = np.zeros(2**self.n_entangled, dtype=complex)
        amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
        return PureState(amps)

    def hamiltonian(self) -> DiagonalHamiltonian:
        # H = -(omega/2) * sum_i sigma_z^(i): a basis state with b ones has
        # energy -(omega/2) * (n - 2 b).
        n = self.n_entangled
        ones = np.array([bin(i).count("1") for i in range(2**n)])
        return DiagonalHamiltonian(-0.5 * self.omega * (n - 2 * ones))

    def measurement(self) -> ProjectiveMeasurement:
        # Product |+/-> basis: row j has entries (-1)^popcount(i & j) / 2^(n/2).
        n = self.n_entangled
        dim = 2**n
        scale = 2.0 ** (-n / 2.0)
        labels = self.outcome_labels
        outcomes = []
        for j in range(dim):
            signs = np.array([(-1.0) ** bin(i & j).count("1") for i in range(dim)])
            outcomes.append((labels[j], (scale * signs)[np.newaxis, :]))
        return ProjectiveMeasurement(tuple(outcomes))

    def distribution(self, t: float) -> OutcomeDistribution:
        return ghz_distribution(self.omega, self.n_entangled, t)


ClockModel = Union[OneQubitClock, TwoQubitClock, GhzClock]


def one_qubit_distribution(chi: float, omega: float, t: float) -> OutcomeDistribution:
    """Single-qubit readout statistics: P_-(t) = chi sin^2(omega t / 2)."""
    clock = OneQubitClock(omega=omega, chi=chi)  # validates parameters
    p_minus = clock.chi * math.sin(0.5 * clock.omega * t) ** 2
    return OutcomeDistribution(float(t), {"+": 1.0 - p_minus, "-": p_minus})


def two_qubit_distribution(omega: float, Omega: float, t: float) -> OutcomeDistribution:
    """Four-outcome statistics of the two-frequency register.

    P_{0+} = cos^2(omega t/2)/2,  P_{0-} = sin^2(omega t/2)/2,
    P_{1+} = cos^2(Omega t/2)/2,  P_{1-} = sin^2(Omega t/2)/2.
    """
    clock = TwoQubitClock(omega=omega, Omega=Omega)
    slow = math.sin(0.5 * clock.omega * t) ** 2
    fast = math.sin(0.5 * clock.Omega * t) ** 2
    return OutcomeDistribution(
        float(t),
        {
            "0+": 0.5 * (1.0 - slow),
            "0-": 0.5 * slow,
            "1+": 0.5 * (1.0 - fast),
            "1-": 0.5 * fast,
        },
    )


def ghz_distribution(omega: float, n_entangled: int, t: float) -> OutcomeDistribution:
    """Product-basis statistics of the GHZ clock.

    An outcome string with an even number of '-' signs has probability
    cos^2(n omega t / 2) / 2^(n-1); odd parity gets sin^2(n omega t / 2)
    / 2^(n-1). Each parity class holds 2^(n-1) outcomes.
    """
    clock = GhzClock(omega=omega, n_entangled=n_entangled)
    n = clock.n_entangled
    half = 0.5 * n * clock.omega * t
    p_even = math.cos(half) ** 2 / 2 ** (n - 1)
    p_odd = math.sin(half) ** 2 / 2 ** (n - 1)
    probs = {}
    for j, label in enumerate(clock.outcome_labels):
        parity = bin(j).count("1") & 1
        probs[label] = p_odd if parity else p_even
    return OutcomeDistribution(float(t), probs)


def evolved_distribution(model: ClockModel, t: float) -> OutcomeDistribution:
    """Same statistics as ``model.distribution`` but via explicit evolution.

    Prepares the initial state, applies the diagonal propagator, and projects
    onto the readout. Slower than the closed forms; used to validate them.
    """
    state = evolve(model.initial_state(), model.hamiltonian(), t)
    return OutcomeDistribution(float(t), model.measurement().probabilities(state))


def _multinomial_pmf(tallies: tuple[int, ...], probs: tuple[float, ...]) -> float:
    n = sum(tallies)
    coeff = 1
    remaining = n
    for k in tallies[:-1]:
        coeff *= math.comb(remaining, k)
        remaining -= k
    value = float(coeff)
    for k, p in zip(tallies, probs):
        if k:
            value *= p**k
    return value


def n_probe_count_distribution(
    model: ClockModel, n_probes: int, t: float
) -> dict[CountVector, float]:
    """Exact count-vector distribution for n independent probes at time t.

    One-qubit probes give a binomial over the |-> tally; two-qubit probes a
    multinomial over the four outcome tallies. GHZ copies are not handled
    here (their single informative tally is sampled in the Monte Carlo
    layer), so that kind raises.
    """
    if not isinstance(n_probes, int) or isinstance(n_probes, bool) or n_probes < 1:
        raise ValueError(f"n_probes must be a positive integer, got {n_probes!r}")
    if isinstance(model, OneQubitClock):
        p_minus = model.distribution(t)["-"]
        return {
            OneQubitCounts(n_probes, k): _multinomial_pmf(
                (k, n_probes - k), (p_minus, 1.0 - p_minus)
            )
            for k in range(n_probes + 1)
        }
    if isinstance(model, TwoQubitClock):
        dist = model.distribution(t)
        p = tuple(dist[label] for label in ("1-", "1+", "0-", "0+"))
        out: dict[CountVector, float] = {}
        for k1 in range(n_probes + 1):
            for k2 in range(n_probes - k1 + 1):
                for k3 in range(n_probes - k1 - k2 + 1):
                    k4 = n_probes - k1 - k2 - k3
                    counts = TwoQubitCounts(
                        fast_minus=k1, fast_plus=k2, slow_minus=k3, slow_plus=k4
                    )
                    out[counts] = _multinomial_pmf((k1, k2, k3, k4), p)
        return out
    if isinstance(model, GhzClock):
        raise ValueError(
            "GHZ count distributions are handled by the Monte Carlo layer "
            "(one parity tally per batch of copies)"
        )
    raise ValueError(f"unsupported model type: {type(model).__name__}")


def _distribution_infidelity(
    model: ClockModel, base: OutcomeDistribution, t: float
) -> float:
    # 1 - classical (Bhattacharyya) fidelity between the outcome statistics
    # at time t and at time 0; invariant under global and per-sector phases,
    # which is what the readout can actually resolve.
    now = model.distribution(t)
    overlap = 0.0
    for label, p0 in base.probs.items():
        if p0 > 0.0:
            overlap += math.sqrt(p0 * now[label])
    return 1.0 - overlap * overlap


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    invphi = 0.5 * (math.sqrt(5.0) - 1.0)
    invphi2 = 1.0 - invphi
    a, b = lo, hi
    h = b - a
    c = a + invphi2 * h
    d = a + invphi * h
    fc = f(c)
    fd = f(d)
    while h > tol:
        if fc <= fd:
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


def recurrence_time(
    model: ClockModel,
    epsilon: float = 1e-6,
    t_max: float = 100.0,
    dt: float = 0.01,
) -> float | None:
    """First time the outcome statistics return within epsilon of their start.

    Scans t = dt, 2 dt, ... after the infidelity has first exceeded epsilon.
    A return can be much narrower than the scan step (the epsilon-ball has
    width of order sqrt(epsilon)), so every local infidelity minimum on the
    grid is refined continuously; the first refined dip dropping below
    epsilon is accepted and the epsilon-crossing is located by bisection to
    dt/100 resolution. Returns None if no recurrence is found by t_max
    (including the degenerate case of a clock whose statistics never become
    epsilon-distinguishable, e.g. chi = 0).
    """
    epsilon = float(epsilon)
    t_max = float(t_max)
    dt = float(dt)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if dt <= 0.0 or t_max <= dt:
        raise ValueError("require 0 < dt < t_max")

    base = model.distribution(0.0)

    def infid(t: float) -> float:
        return _distribution_infidelity(model, base, t)

    def crossing(lo: float, hi: float) -> float:
        # infid(lo) >= epsilon, infid(hi) < epsilon
        while hi - lo > dt / 100.0:
            mid = 0.5 * (lo + hi)
            if infid(mid) < epsilon:
                hi = mid
            else:
                lo = mid
        return hi

    departed = False
    history: list[tuple[float, float]] = []
    k = 1
    while (t := k * dt) <= t_max:
        value = infid(t)
        if not departed:
            if value >= epsilon:
                departed = True
        else:
            if value < epsilon:
                return crossing(history[-1][0], t)
            if len(history) >= 2 and history[-2][1] >= epsilon:
                (t0, v0), (t1, v1) = history[-2], history[-1]
                if v1 <= v0 and v1 <= value:
                    t_star = _golden_min(infid, t0, t, dt / 1000.0)
                    if infid(t_star) < epsilon:
                        return crossing(t0, t_star)
        history.append((t, value))
        if len(history) > 2:
            history.pop(0)
        k += 1
    return None
