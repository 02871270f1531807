"""Intensity observables and threshold schedules.

Two observable families live here.  The ladder observable is piecewise
constant, taking the value ``form(m)`` on every gap of order ``m`` of the
ternary Cantor set.  The log-distance observable is ``form(-log d(x, K))``
for a target set ``K``.  Both are strictly increasing transforms of a base
level (the gap order, or the negative log distance), so exceedance events
can always be tested on the base level directly.

Threshold schedules invert the tail of each scaling regime: ``threshold(n,
tau)`` is the level whose expected exceedance count over ``n`` steps is
``tau``, and ``tau(n, level)`` is the inverse map.  ``gumbel_y`` rescales a
level to the standard Gumbel abscissa ``-log tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cantor import distance_to_cantor, gap_order, gap_order_batch

__all__ = [
    "Linear",
    "Exponential",
    "Bounded",
    "ObservableForm",
    "TernaryCantor",
    "Singleton",
    "HarmonicClosure",
    "TargetSet",
    "Ladder",
    "LogDistance",
    "IntensitySpec",
    "distance_to_target",
    "distance_to_target_batch",
    "base_levels",
    "evaluate",
    "evaluate_batch",
    "tail_classification",
    "LadderDiscrete",
    "PowerLaw",
    "DoubleExp",
    "ThresholdRegime",
    "DegenerateThresholdError",
    "threshold_schedule",
]


class DegenerateThresholdError(ValueError):
    """Raised when a (n, tau) pair lies outside a regime's domain."""


# ---------------------------------------------------------------------------
# observable forms


@dataclass(frozen=True)
class Linear:
    """Identity transform: the observable is the base level itself."""

    def apply(self, s: float) -> float:
        return float(s)

    def apply_batch(self, s: np.ndarray) -> np.ndarray:
        return np.asarray(s, dtype=float)


@dataclass(frozen=True)
class Exponential:
    """Unbounded transform exp(s / beta); exceedances get power-law tails."""

    beta: float = 1.5

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    def apply(self, s: float) -> float:
        try:
            return math.exp(s / self.beta)
        except OverflowError:
            return math.inf

    def apply_batch(self, s: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(s, dtype=float) / self.beta)


@dataclass(frozen=True)
class Bounded:
    """Transform D - exp(-s / gamma), increasing to the essential sup D."""

    D: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.D > 0 and self.gamma > 0):
            raise ValueError("D and gamma must be positive")

    def apply(self, s: float) -> float:
        return self.D - math.exp(-s / self.gamma)

    def apply_batch(self, s: np.ndarray) -> np.ndarray:
        return self.D - np.exp(-np.asarray(s, dtype=float) / self.gamma)


ObservableForm = Union[Linear, Exponential, Bounded]


def tail_classification(form: ObservableForm, decay_rate: float):
    """(family, index) of the block-maxima limit for a base level whose
    exceedance probability decays like exp(-decay_rate * s)."""
    if isinstance(form, Linear):
        return "gumbel", None
    if isinstance(form, Exponential):
        return "frechet", decay_rate * form.beta
    if isinstance(form, Bounded):
        return "weibull", decay_rate * form.gamma
    raise TypeError(f"unknown observable form {form!r}")


# ---------------------------------------------------------------------------
# target sets


@dataclass(frozen=True)
class TernaryCantor:
    """The middle-thirds Cantor set."""


@dataclass(frozen=True)
class Singleton:
    """One-point target {1/k}."""

    k: int = 2

    def __post_init__(self):
        if not (isinstance(self.k, int) and self.k >= 2):
            raise ValueError("k must be an integer >= 2")


@dataclass(frozen=True)
class HarmonicClosure:
    """The closed set {0} together with every reciprocal 1/k."""


TargetSet = Union[TernaryCantor, Singleton, HarmonicClosure]


def _harmonic_distance_scalar(x: float) -> float:
    if x == 0.0:
        return 0.0
    k = math.floor(1.0 / x)
    best = x
    for kk in (k - 1, k, k + 1):
        if kk >= 1:
            best = min(best, abs(x - 1.0 / kk))
    return best


def distance_to_target(x, target: TargetSet) -> float:
    """Distance from a point of [0, 1] to the target set."""
    if isinstance(target, TernaryCantor):
        return distance_to_cantor(x)
    xf = float(x)
    if not 0.0 <= xf <= 1.0:
        raise ValueError("point must lie in [0, 1]")
    if isinstance(target, Singleton):
        return abs(xf - 1.0 / target.k)
    if isinstance(target, HarmonicClosure):
        return _harmonic_distance_scalar(xf)
    raise TypeError(f"unknown target set {target!r}")


def distance_to_target_batch(xs, target: TargetSet) -> np.ndarray:
    """Vectorized distance_to_target over an array of points."""
    if isinstance(target, TernaryCantor):
        return distance_to_cantor(np.asarray(xs, dtype=float))
    xs = np.asarray(xs, dtype=float)
    if xs.size and not (xs.min() >= 0.0 and xs.max() <= 1.0):
        raise ValueError("points must lie in [0, 1]")
    if isinstance(target, Singleton):
        return np.abs(xs - 1.0 / target.k)
    if isinstance(target, HarmonicClosure):
        with np.errstate(divide="ignore"):
            k = np.floor(1.0 / xs)
        # one candidate on each side plus one guard against the floor
        # landing low when x is a reciprocal rounded up
        d = np.abs(xs - 1.0 / np.maximum(k, 1.0))
        d = np.minimum(d, np.abs(xs - 1.0 / (np.maximum(k, 1.0) + 1.0)))
        return np.minimum(d, np.abs(xs - 1.0 / np.maximum(k - 1.0, 1.0)))
    raise TypeError(f"unknown target set {target!r}")


# ---------------------------------------------------------------------------
# intensity specifications


@dataclass(frozen=True)
class Ladder:
    """Piecewise-constant observable on the gaps of the Cantor set."""

    form: ObservableForm = Linear()


@dataclass(frozen=True)
class LogDistance:
    """Observable built from the negative log distance to a target set."""

    target: TargetSet = TernaryCantor()
    form: ObservableForm = Linear()


IntensitySpec = Union[Ladder, LogDistance]


def base_levels(spec: IntensitySpec, xs) -> np.ndarray:
    """Base level of each point: the gap order for Ladder intensities, the
    negative log distance otherwise.  Points on the target (or unresolved
    at scan depth) get +inf."""
    if isinstance(spec, Ladder):
        m = gap_order_batch(xs)
        return np.where(m > 0, m.astype(float), np.inf)
    if isinstance(spec, LogDistance):
        d = distance_to_target_batch(xs, spec.target)
        with np.errstate(divide="ignore"):
            return -np.log(d)
    raise TypeError(f"unknown intensity spec {spec!r}")


def evaluate(spec: IntensitySpec, x) -> float:
    """Observable value at one point; +inf on the target set (except for
    the Bounded form, which attains its essential sup there)."""
    if isinstance(spec, Ladder):
        m = gap_order(x)
        s = float(m) if m > 0 else math.inf
    elif isinstance(spec, LogDistance):
        d = distance_to_target(x, spec.target)
        s = -math.log(d) if d > 0.0 else math.inf
    else:
        raise TypeError(f"unknown intensity spec {spec!r}")
    return spec.form.apply(s)


def evaluate_batch(spec: IntensitySpec, xs) -> np.ndarray:
    return spec.form.apply_batch(base_levels(spec, xs))


# ---------------------------------------------------------------------------
# threshold schedules


@dataclass(frozen=True)
class LadderDiscrete:
    """Integer-level schedule for gap-order observables.

    Only the discrete set tau = n (2 delta)^m can be realized; threshold()
    returns the nearest integer level and tau() the realized intensity,
    which callers should report alongside the requested one.
    """

    delta: float = 1.0 / 3.0

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")

    @property
    def decay_rate(self) -> float:
        return -math.log(2.0 * self.delta)

    def threshold(self, n: int, tau: float) -> int:
        if not tau > 0:
            raise ValueError("tau must be positive")
        # floor(x + 0.5): round() would tie to even and flip exact levels
        return int(math.floor(math.log(n / tau) / self.decay_rate + 0.5))

    def tau(self, n: int, level) -> float:
        return float(n) * (2.0 * self.delta) ** level

    def gumbel_y(self, level, n: int):
        return self.decay_rate * level - math.log(n)


@dataclass(frozen=True)
class PowerLaw:
    """Schedule for tails F_bar(h) = A exp(-d_M h), the power-law
    neighborhood regime with dimension deficit d_M and amplitude A."""

    d_M: float
    A: float

    def __post_init__(self):
        if not (self.d_M > 0 and self.A > 0):
            raise ValueError("d_M and A must be positive")

    def threshold(self, n: int, tau: float) -> float:
        if not tau > 0:
            raise ValueError("tau must be positive")
        return math.log(self.A * n / tau) / self.d_M

    def tau(self, n: int, level) -> float:
        return self.A * float(n) * math.exp(-self.d_M * level)

    def gumbel_y(self, level, n: int):
        return self.d_M * level - math.log(self.A * n)


@dataclass(frozen=True)
class DoubleExp:
    """Schedule for doubly exponential tails F_bar(h) = B exp(-D e^{q h})."""

    B: float
    D: float
    q: float

    def __post_init__(self):
        if not (self.B > 0 and self.D > 0 and self.q > 0):
            raise ValueError("B, D and q must be positive")

    def threshold(self, n: int, tau: float) -> float:
        if not tau > 0:
            raise ValueError("tau must be positive")
        inner = math.log(n * self.B / tau)
        if inner <= 0.0:
            raise DegenerateThresholdError(
                "degenerate threshold: tau >= n B is outside the law's domain"
            )
        # sign fixed by the inversion requirement tau(n, threshold(n, t)) == t
        return math.log(inner / self.D) / self.q

    def tau(self, n: int, level) -> float:
        return float(n) * self.B * math.exp(-self.D * math.exp(self.q * level))

    def gumbel_y(self, level, n: int):
        return self.D * math.exp(self.q * level) - math.log(n * self.B)


ThresholdRegime = Union[LadderDiscrete, PowerLaw, DoubleExp]


def threshold_schedule(regime: ThresholdRegime, n: int, tau: float):
    """Level whose expected exceedance count over n steps is tau."""
    return regime.threshold(n, tau)
