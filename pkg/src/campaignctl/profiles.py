"""Time-varying rate profiles.

A profile maps campaign time t to a nonnegative rate and is evaluated with
``profile.at(t)``. The same variants serve for the effective spreading rate
and, where wanted, a time dependent recovery rate. Profiles are immutable
after construction and safe to share between threads or worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constant",
    "SigmoidUp",
    "SigmoidDown",
    "Cosine",
    "Tabulated",
    "as_profile",
    "sample",
]


def _logistic(x):
    """Numerically stable 1 / (1 + exp(-x))."""
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class Constant:
    """Rate held fixed over the whole horizon."""

    rate: float

    def __post_init__(self):
        if not self.rate >= 0.0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")

    def at(self, t):
        return self.rate


@dataclass(frozen=True)
class SigmoidUp:
    """Rising interest: low + (high - low) / (1 + exp(-steepness (t - center))).

    Monotone nondecreasing in t for steepness >= 0; tends to `high` for
    large t and to `low` for very negative t.
    """

    low: float
    high: float
    steepness: float
    center: float

    def __post_init__(self):
        if not 0.0 <= self.low <= self.high:
            raise ValueError(f"need 0 <= low <= high, got low={self.low}, high={self.high}")

    def at(self, t):
        return self.low + (self.high - self.low) * _logistic(self.steepness * (t - self.center))


@dataclass(frozen=True)
class SigmoidDown:
    """Fading interest: (high - low) (1 - 1 / (1 + exp(-steepness (t - center)))).

    Monotone nonincreasing in t for steepness >= 0. Note the defining
    formula decays to zero for large t, not to `low`; it is kept exactly as
    stated rather than symmetrized.
    """

    low: float
    high: float
    steepness: float
    center: float

    def __post_init__(self):
        if not 0.0 <= self.low <= self.high:
            raise ValueError(f"need 0 <= low <= high, got low={self.low}, high={self.high}")

    def at(self, t):
        return (self.high - self.low) * _logistic(-self.steepness * (t - self.center))


@dataclass(frozen=True)
class Cosine:
    """Fluctuating interest: mean + amplitude cos(2 pi t / period)."""

    mean: float
    amplitude: float
    period: float

    def __post_init__(self):
        if self.period <= 0.0:
            raise ValueError(f"period must be positive, got {self.period}")
        if not 0.0 <= self.amplitude <= self.mean:
            raise ValueError(
                f"need 0 <= amplitude <= mean to keep the rate nonnegative, "
                f"got mean={self.mean}, amplitude={self.amplitude}"
            )

    def at(self, t):
        return self.mean + self.amplitude * math.cos(2.0 * math.pi * t / self.period)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear rate through (time, value) knots; exact at the knots.

    Times must be strictly increasing and are expected to cover the model
    horizon; evaluation outside [times[0], times[-1]] is a domain error.
    """

    times: tuple
    values: tuple
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("times and values must be 1-d sequences of equal length >= 2")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise ValueError("table entries must be finite")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if np.any(v < 0.0):
            raise ValueError("table rates must be nonnegative")
        object.__setattr__(self, "times", tuple(float(x) for x in t))
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_v", v)

    def at(self, t):
        if t < self._t[0] or t > self._t[-1]:
            raise ValueError(
                f"t={t:g} outside table domain [{self._t[0]:g}, {self._t[-1]:g}]"
            )
        return float(np.interp(t, self._t, self._v))


def as_profile(rate):
    """Coerce a bare number to a Constant profile; pass profiles through."""
    if isinstance(rate, (int, float, np.floating, np.integer)):
        return Constant(float(rate))
    if hasattr(rate, "at"):
        return rate
    raise TypeError(f"expected a rate number or profile, got {type(rate).__name__}")


def sample(profile, times):
    """Evaluate a profile at an array of times."""
    return np.array([profile.at(float(t)) for t in np.asarray(times, dtype=float)])
