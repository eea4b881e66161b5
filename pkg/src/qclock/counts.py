"""Measurement count tallies consumed by the estimators.

Each clock design has its own tally shape. Tallies are plain frozen
dataclasses so they can key dictionaries (exact count-space enumeration)
and cross thread boundaries safely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


def _check_tally(name: str, value: int) -> None:
    if not isinstance(value, (int,)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class OneQubitCounts:
    """n single-qubit probes, k_minus of which landed in the |-> outcome."""

    n: int
    k_minus: int

    def __post_init__(self):
        _check_tally("n", self.n)
        _check_tally("k_minus", self.k_minus)
        if self.k_minus > self.n:
            raise ValueError(f"k_minus = {self.k_minus} exceeds n = {self.n}")

    @property
    def k_plus(self) -> int:
        return self.n - self.k_minus


@dataclass(frozen=True)
class TwoQubitCounts:
    """Outcome tallies of the four-projector two-qubit measurement.

    fast_* count the first-qubit |1> sector, whose pair oscillates at the
    fast frequency; slow_* count the first-qubit |0> sector at the slow
    frequency. The coarse estimator consumes only the slow pair.
    """

    fast_minus: int
    fast_plus: int
    slow_minus: int
    slow_plus: int

    def __post_init__(self):
        for name in ("fast_minus", "fast_plus", "slow_minus", "slow_plus"):
            _check_tally(name, getattr(self, name))

    @property
    def n(self) -> int:
        return self.fast_minus + self.fast_plus + self.slow_minus + self.slow_plus

    @property
    def coarse_plus(self) -> int:
        """Slow-sector |+> tally (the coarse likelihood's cosine count)."""
        return self.slow_plus

    @property
    def coarse_minus(self) -> int:
        """Slow-sector |-> tally (the coarse likelihood's sine count)."""
        return self.slow_minus


@dataclass(frozen=True)
class GhzCounts:
    """n GHZ copies measured in the product |+/-> basis, reduced to parity.

    k_odd counts the copies whose outcome string held an odd number of '-'
    signs; only this tally is informative about time.
    """

    n: int
    k_odd: int

    def __post_init__(self):
        _check_tally("n", self.n)
        _check_tally("k_odd", self.k_odd)
        if self.k_odd > self.n:
            raise ValueError(f"k_odd = {self.k_odd} exceeds n = {self.n}")

    @property
    def k_even(self) -> int:
        return self.n - self.k_odd


CountVector = Union[OneQubitCounts, TwoQubitCounts, GhzCounts]


def reduce_counts(counts: CountVector) -> CountVector:
    """Divide every tally by the common GCD.

    Likelihood maximizers depend only on tally ratios, and reducing first
    makes estimates *exactly* invariant under integer rescaling of the
    counts (bare floating arithmetic would drift by an ulp through terms
    like sqrt(c^2 * r) vs c * sqrt(r)).
    """
    if isinstance(counts, OneQubitCounts):
        g = math.gcd(counts.k_minus, counts.k_plus)
        if g > 1:
            return OneQubitCounts(counts.n // g, counts.k_minus // g)
        return counts
    if isinstance(counts, TwoQubitCounts):
        g = math.gcd(
            math.gcd(counts.fast_minus, counts.fast_plus),
            math.gcd(counts.slow_minus, counts.slow_plus),
        )
        if g > 1:
            return TwoQubitCounts(
                counts.fast_minus // g,
                counts.fast_plus // g,
                counts.slow_minus // g,
                counts.slow_plus // g,
            )
        return counts
    if isinstance(counts, GhzCounts):
        g = math.gcd(counts.k_odd, counts.k_even)
        if g > 1:
            return GhzCounts(counts.n // g, counts.k_odd // g)
        return counts
    raise ValueError(f"unsupported count vector type: {type(counts).__name__}")
