"""Neighborhood measures and their scaling fits.

mu(N_eps(K)) is estimated exactly where a closed or summable form exists
(Lebesgue measure of ternary-Cantor neighborhoods, question-mark measure
of singleton and harmonic-closure neighborhoods) and by Monte Carlo
otherwise.  The standard fit extracts a Minkowski dimension and a Cesaro
averaged content; the non-standard fit extracts the stretched-exponential
constants (B, D, q) that replace them when the measure is singular enough
that no power law survives.

Monte-Carlo curves share one sample set across the whole eps grid, so the
estimated curve is monotone by construction and grid points differ only
by binomial noise on the common distances.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar

from .cantor import lebesgue_neighborhood_exact
from .intensity import (
    HarmonicClosure,
    Singleton,
    TernaryCantor,
    distance_to_target_batch,
)
from .maps import STREAM_SAMPLE, mobius_anchor, raw_words, uniform_block
from .qmark import LOG2, ball_measure_asymptotic, interval_measure, small_x_asymptotic

__all__ = [
    "Lebesgue",
    "Qmark",
    "Exact",
    "MonteCarlo",
    "ExactLebesgue",
    "ExactQmark",
    "NeighborhoodCurve",
    "neighborhood_curve",
    "ScalingFit",
    "fit_standard",
    "NonStandardFit",
    "fit_nonstandard",
    "harmonic_series_measure",
    "harmonic_series_asymptotic",
    "saddle_point_constants",
    "saddle_exponent_coefficient",
]

_LOG3 = math.log(3.0)
_CHUNK = 12500  # replicates per chunk; fixed so results never depend on workers
_ANCHOR_WORDS = 64  # 4096-bit window per question-mark sample


@dataclass(frozen=True)
class Lebesgue:
    pass


@dataclass(frozen=True)
class Qmark:
    pass


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class MonteCarlo:
    samples: int
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("need at least 1000 Monte-Carlo samples")


@dataclass(frozen=True)
class ExactLebesgue:
    pass


@dataclass(frozen=True)
class ExactQmark:
    pass


@dataclass
class NeighborhoodCurve:
    eps_grid: np.ndarray
    mu_hat: np.ndarray
    stderr: np.ndarray
    source: object
    target: object
    measure: object

    def __post_init__(self):
        if np.any(np.diff(self.mu_hat) < 0):
            raise AssertionError("mu_hat must be non-decreasing in eps")
        if np.any((self.mu_hat < 0) | (self.mu_hat > 1)):
            raise AssertionError("mu_hat must lie in [0, 1]")


# ---------------------------------------------------------------------------
# exact harmonic-closure measure

_MAX_BALL_TERMS = 10**6


def _merge_threshold(eps: Fraction) -> int:
    """Smallest k whose ball at 1/k overlaps the ball at 1/(k+1)."""
    k = max(int((math.sqrt(1.0 + 2.0 / float(eps)) - 1.0) / 2.0), 1)
    while 2 * k * (k + 1) * eps < 1:
        k += 1
    while k > 1 and 2 * (k - 1) * k * eps >= 1:
        k -= 1
    return k


def harmonic_series_measure(eps: float) -> float:
    """Question-mark measure of the eps-neighborhood of {1/k} and 0.

    Balls past the overlap threshold chain down to 0 and are measured as
    one interval; the finitely many isolated balls are summed exactly.
    The asymptotic-series companion is `harmonic_series_asymptotic`.
    """
    if not 0 < eps <= 0.1:
        raise ValueError("eps must lie in (0, 0.1]")
    feps = Fraction(eps)
    k_merge = _merge_threshold(feps)
    if k_merge > _MAX_BALL_TERMS:
        raise RuntimeError("tail not converged")
    total = interval_measure(0, Fraction(1, k_merge) + feps)
    for k in range(1, k_merge):
        lo = Fraction(1, k) - feps
        hi = min(Fraction(1, k) + feps, Fraction(1))
        total += interval_measure(lo, hi)
    return min(total, 1.0)


def harmonic_series_asymptotic(eps: float) -> float:
    """Ball-by-ball asymptotic series for the harmonic-closure measure."""
    if not 0 < eps <= 0.1:
        raise ValueError("eps must lie in (0, 0.1]")
    delta = math.sqrt(eps / 2.0)
    total = small_x_asymptotic(delta) + small_x_asymptotic(eps)
    for k in range(2, int(math.sqrt(2.0 / eps)) + 1):
        total += ball_measure_asymptotic(k, eps)
    return total


def _singleton_exact(k: int, eps: float) -> float:
    feps = Fraction(eps)
    lo = max(Fraction(1, k) - feps, Fraction(0))
    hi = min(Fraction(1, k) + feps, Fraction(1))
    return interval_measure(lo, hi)


@lru_cache(maxsize=None)
def _cantor_gap_table(max_level: int) -> tuple:
    """Removed middle thirds down to width 3**-max_level, as (level, a, b)."""
    intervals = [(Fraction(0), Fraction(1))]
    gaps = []
    for m in range(1, max_level + 1):
        nxt = []
        for a, b in intervals:
            w = (b - a) / 3
            gaps.append((m, a + w, b - w))
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        intervals = nxt
    return tuple(gaps)


def _qmark_cantor_exact(eps: float) -> float:
    """Gap-sum value of the question-mark measure of an eps-neighborhood
    of the ternary Cantor set.

    The neighborhood is the unit interval minus every removed gap shrunk
    by eps at both ends, so the measure is one minus the sum of the
    shrunk-gap measures over gaps wider than 2 eps.
    """
    feps = Fraction(eps)
    max_level = 0
    while Fraction(1, 3 ** (max_level + 1)) > 2 * feps:
        max_level += 1
    total = 0.0
    for m, a, b in _cantor_gap_table(max_level):
        if b - a > 2 * feps:
            total += interval_measure(a + feps, b - feps)
    return max(0.0, min(1.0, 1.0 - total))


# ---------------------------------------------------------------------------
# curves


def _qmark_samples(seed: int, start: int, count: int) -> np.ndarray:
    words = raw_words(seed, start * _ANCHOR_WORDS, count * _ANCHOR_WORDS)
    return mobius_anchor(words.reshape(count, _ANCHOR_WORDS), 0)


def _mc_chunk_counts(args):
    target, measure, eps, seed, start, count = args
    if isinstance(measure, Lebesgue):
        x = uniform_block(seed, start, count, STREAM_SAMPLE)
    else:
        x = _qmark_samples(seed, start, count)
    d = np.sort(distance_to_target_batch(x, target))
    return np.searchsorted(d, eps, side="right")


def neighborhood_curve(
    target, measure, eps_grid, method, workers: int = 1
) -> NeighborhoodCurve:
    """Measure of the eps-neighborhood of the target set, on a grid."""
    eps = np.asarray(eps_grid, dtype=float)
    if eps.size == 0 or np.any(eps <= 0) or np.any(np.diff(eps) <= 0):
        raise ValueError("eps_grid must be positive and strictly increasing")

    if isinstance(method, Exact):
        if isinstance(target, TernaryCantor) and isinstance(measure, Lebesgue):
            mu = np.array([lebesgue_neighborhood_exact(e) for e in eps])
            source = ExactLebesgue()
        elif isinstance(target, TernaryCantor) and isinstance(measure, Qmark):
            mu = np.array([_qmark_cantor_exact(e) for e in eps])
            source = ExactQmark()
        elif isinstance(target, Singleton) and isinstance(measure, Qmark):
            mu = np.array([_singleton_exact(target.k, e) for e in eps])
            source = ExactQmark()
        elif isinstance(target, HarmonicClosure) and isinstance(measure, Qmark):
            mu = np.array([harmonic_series_measure(e) for e in eps])
            source = ExactQmark()
        else:
            raise ValueError(
                f"no exact path for {type(target).__name__} under "
                f"{type(measure).__name__}; use MonteCarlo"
            )
        return NeighborhoodCurve(eps, mu, np.zeros_like(eps), source, target, measure)

    if not isinstance(method, MonteCarlo):
        raise TypeError(f"unknown method {method!r}")
    tasks = [
        (target, measure, eps, method.seed, s, min(_CHUNK, method.samples - s))
        for s in range(0, method.samples, _CHUNK)
    ]
    if workers <= 1 or len(tasks) == 1:
        parts = [_mc_chunk_counts(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_chunk_counts, tasks))
    counts = np.sum(parts, axis=0)
    mu = counts / method.samples
    stderr = np.sqrt(mu * (1.0 - mu) / method.samples)
    return NeighborhoodCurve(eps, mu, stderr, method, target, measure)


# ---------------------------------------------------------------------------
# fits


@dataclass
class ScalingFit:
    d_M: float
    content: float
    residual_band: float


@dataclass
class NonStandardFit:
    B: float
    D: float
    q: float


def _fit_points(curve: NeighborhoodCurve):
    mu = curve.mu_hat
    keep = mu > 0
    keep &= (curve.stderr == 0) | (curve.stderr < 0.1 * mu)
    return np.log(curve.eps_grid[keep]), np.log(mu[keep])


def fit_standard(curve: NeighborhoodCurve) -> ScalingFit:
    """Power-law fit mu ~ A eps^d_M with Cesaro-averaged content.

    The content averages log(mu eps^-d_M) over a window covering a whole
    number of log-3 periods below the largest retained eps, which cancels
    the lattice oscillation of ternary-type sets; the window is half open
    so a uniform log-3-commensurate grid counts each period once.
    """
    le, lm = _fit_points(curve)
    if le.size < 3 or le.max() - le.min() < 3.0 * math.log(10.0) - 1e-9:
        raise RuntimeError("insufficient span")
    d_M = float(np.polyfit(le, lm, 1)[0])
    periods = int((le.max() - le.min()) / _LOG3 + 1e-9)
    window_lo = le.max() - periods * _LOG3
    win = le > window_lo + 1e-9
    z = lm[win] - d_M * le[win]
    content = float(np.exp(z.mean()))
    return ScalingFit(d_M, content, float(np.abs(z - z.mean()).max()))


def fit_nonstandard(curve: NeighborhoodCurve) -> NonStandardFit:
    """Stretched-exponential fit log mu = log B - D eps^-q.

    Initialized at q = 1 with D from a through-origin regression, then
    refined by nonlinear least squares.
    """
    if np.any(curve.mu_hat <= 0):
        warnings.warn("zero mu_hat points excluded from the non-standard fit")
    keep = curve.mu_hat > 0
    eps = curve.eps_grid[keep]
    y = np.log(curve.mu_hat[keep])
    if eps.size < 4:
        raise RuntimeError("nonlinear fit diverged")
    log_b0 = y.max() + 0.1
    x = 1.0 / eps
    d0 = float((log_b0 - y) @ x / (x @ x))

    def model(e, log_b, d, q):
        return log_b - d * np.power(e, -q)

    try:
        popt, _ = curve_fit(
            model, eps, y, p0=(log_b0, max(d0, 1e-12), 1.0), maxfev=20000
        )
    except RuntimeError as exc:
        raise RuntimeError("nonlinear fit diverged") from exc
    log_b, d, q = (float(v) for v in popt)
    if not (math.isfinite(log_b) and d > 0 and q > 0):
        raise RuntimeError("nonlinear fit diverged")
    return NonStandardFit(math.exp(log_b), d, q)


# ---------------------------------------------------------------------------
# saddle-point oracle for the harmonic closure


def _saddle_exponent(k: float, eps: float) -> float:
    return LOG2 * (k + 1.0 / k + 1.0 / (k * k * eps))


def saddle_exponent_coefficient(eps: float) -> float:
    """Minimized exponent rescaled by eps^(1/3); flat in eps when the
    stretched-exponential form holds."""
    k_star = (2.0 / eps) ** (1.0 / 3.0)
    res = minimize_scalar(
        _saddle_exponent,
        bounds=(1.0, 10.0 * k_star),
        args=(eps,),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return res.fun * eps ** (1.0 / 3.0)


def saddle_point_constants(eps_ladder=None):
    """Analytic decay constant and a Laplace-approximation prefactor.

    The exponent LOG2 (k + 1/k + 1/(k^2 eps)) is minimized near
    k = (2/eps)^(1/3), giving the analytic eps^(-1/3) coefficient
    3 log2 2^(-2/3).  The prefactor comes from the curvature at the
    minimum; it drifts slowly (as eps^(-1/6)) so the geometric mean over
    the ladder is reported as the single comparison number.
    """
    d_theory = 3.0 * LOG2 * 2.0 ** (-2.0 / 3.0)
    if eps_ladder is None:
        eps_ladder = np.geomspace(1e-6, 1e-3, 13)
    log_pref = []
    for eps in eps_ladder:
        k_star = (2.0 / eps) ** (1.0 / 3.0)
        res = minimize_scalar(
            _saddle_exponent,
            bounds=(1.0, 10.0 * k_star),
            args=(eps,),
            method="bounded",
            options={"xatol": 1e-10},
        )
        k = res.x
        curvature = LOG2 * (2.0 / k**3 + 6.0 / (k**4 * eps))
        log_pref.append(math.log(8.0 * math.sqrt(2.0 * math.pi / curvature)))
    return d_theory, math.exp(float(np.mean(log_pref)))
