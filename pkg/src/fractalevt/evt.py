"""Block-maxima engine.

Each replicate is one fresh trajectory; its running maximum is sampled at
every configured block length in a single pass.  All statistics work on
the base level of the intensity (gap order, or negative log distance),
since every observable form is strictly increasing; the form is applied
only where actual observable values matter.

Replicates are partitioned into fixed-size chunks whose boundaries do not
depend on the worker count, each chunk derives its randomness from the
config seed and its replicate indices alone, and results are merged in
chunk order.  Empirical laws are therefore byte-identical for any number
of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .intensity import (
    Bounded,
    Exponential,
    Linear,
    base_levels,
)
from .maps import (
    STREAM_SAMPLE,
    Mobius,
    Rotation,
    Tent,
    mobius_anchor,
    mobius_backward_orbit,
    raw_words,
    uniform_block,
)

__all__ = [
    "SyntheticIID",
    "BlockMaximaConfig",
    "BlockMaxima",
    "block_maxima",
    "EmpiricalLaw",
    "empirical_law",
    "law_deviation",
    "ThetaEstimate",
    "estimate_theta",
    "GumbelCurves",
    "gumbel_normalize",
    "TailFit",
    "frechet_weibull_check",
    "level_set_exponent",
]

_CHUNK = 12500  # replicates per chunk; fixed so chunking never depends on workers
_ANCHOR_WINDOW_BITS = 4096


@dataclass(frozen=True)
class SyntheticIID:
    """i.i.d. base levels quantile(u) with u uniform, for engine validation.

    Plays the role of a map spec; the intensity is bypassed.  quantile must
    be a picklable callable for multi-worker runs.
    """

    quantile: Callable


@dataclass(frozen=True)
class BlockMaximaConfig:
    map: object
    intensity: object
    block_lengths: tuple
    samples: int
    seed: int
    level_grid: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_lengths", tuple(self.block_lengths))
        object.__setattr__(self, "level_grid", tuple(self.level_grid))
        ns = self.block_lengths
        if not ns or any(n < 1 for n in ns) or any(
            b <= a for a, b in zip(ns, ns[1:])
        ):
            raise ValueError("block_lengths must be strictly increasing positives")
        if self.samples < 1000:
            raise ValueError("need at least 1000 replicates per block length")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.level_grid:
            raise ValueError("level grid must be nonempty")


@dataclass
class BlockMaxima:
    """Base-level running maxima, one (J,) array per block length."""

    config: BlockMaximaConfig
    base_maxima: dict

    def observable_maxima(self, n: int) -> np.ndarray:
        form = getattr(self.config.intensity, "form", Linear())
        return form.apply_batch(self.base_maxima[n])


def _mobius_words_per_replicate(n_max: int) -> int:
    return 4 * ((n_max + _ANCHOR_WINDOW_BITS + 255) // 256)


def _chunk_maxima(cfg: BlockMaximaConfig, start: int, count: int) -> list:
    """Base-level maxima of replicates [start, start+count), one array per
    block length.  Pure function of (cfg, start, count)."""
    cuts = cfg.block_lengths
    n_max = cuts[-1]
    running = np.full(count, -np.inf)
    out = []

    if isinstance(cfg.map, Mobius):
        words_per = _mobius_words_per_replicate(n_max)
        words = raw_words(cfg.seed, start * words_per, count * words_per).reshape(
            count, words_per
        )
        lo = 0
        for cut in cuts:
            t = cut - 1
            x = mobius_anchor(words, t, cfg.map.tol)
            seg = base_levels(cfg.intensity, x)
            for _, xj in mobius_backward_orbit(words, t, lo, x):
                np.maximum(seg, base_levels(cfg.intensity, xj), out=seg)
            np.maximum(running, seg, out=running)
            out.append(running.copy())
            lo = cut
        return out

    if isinstance(cfg.map, SyntheticIID):
        # step-major word addressing: draw (r, j) lives at word j*J + r, so a
        # chunk reads the same words no matter how replicates were split
        total = cfg.samples
        next_cut = 0
        for j in range(n_max):
            u = uniform_block(cfg.seed, j * total + start, count, STREAM_SAMPLE)
            np.maximum(running, cfg.map.quantile(u), out=running)
            if j + 1 == cuts[next_cut]:
                out.append(running.copy())
                next_cut += 1
        return out

    if isinstance(cfg.map, (Tent, Rotation)):
        x0 = uniform_block(cfg.seed, start, count)
        if isinstance(cfg.map, Rotation):
            mult = cfg.map.omega.multiples(1, n_max - 1) if n_max > 1 else np.empty(0)
        x = x0
        next_cut = 0
        for j in range(n_max):
            if j > 0:
                if isinstance(cfg.map, Tent):
                    p = cfg.map.p
                    x = np.where(x < p, x / p, (1.0 - x) / (1.0 - p))
                else:
                    x = x0 + mult[j - 1]
                    x -= np.floor(x)
            np.maximum(running, base_levels(cfg.intensity, x), out=running)
            if j + 1 == cuts[next_cut]:
                out.append(running.copy())
                next_cut += 1
        return out

    raise TypeError(f"unknown map spec {cfg.map!r}")


def _chunk_task(args):
    return _chunk_maxima(*args)


def block_maxima(cfg: BlockMaximaConfig, workers: int = 1) -> BlockMaxima:
    """Running maxima of J fresh replicates at every block length."""
    tasks = [
        (cfg, s, min(_CHUNK, cfg.samples - s))
        for s in range(0, cfg.samples, _CHUNK)
    ]
    if workers <= 1 or len(tasks) == 1:
        parts = [_chunk_maxima(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    merged = {
        n: np.concatenate([p[i] for p in parts])
        for i, n in enumerate(cfg.block_lengths)
    }
    return BlockMaxima(cfg, merged)


# ---------------------------------------------------------------------------
# empirical laws


@dataclass
class EmpiricalLaw:
    """Counts of blocks staying below each level, with the matching tau."""

    levels: np.ndarray
    block_lengths: np.ndarray
    count_below: np.ndarray  # (levels, block_lengths)
    total: int
    tau: np.ndarray
    theta_ref: float = 1.0

    def __post_init__(self):
        cb = self.count_below
        if np.any(np.diff(cb, axis=0) < 0):
            raise AssertionError("a_hat must be non-decreasing in level")
        if np.any(np.diff(cb, axis=1) > 0):
            raise AssertionError("a_hat must be non-increasing in n")

    @property
    def a_hat(self) -> np.ndarray:
        return self.count_below / self.total

    @property
    def stderr(self) -> np.ndarray:
        a = self.a_hat
        return np.sqrt(a * (1.0 - a) / self.total)


def empirical_law(
    maxima: BlockMaxima,
    level_grid=None,
    regime=None,
    tau_override: Optional[np.ndarray] = None,
    theta_ref: float = 1.0,
) -> EmpiricalLaw:
    """Fraction of replicates with M_n at or below each level.

    tau comes from the regime's closed form unless an exact grid is passed
    via tau_override (shape levels x block lengths).
    """
    cfg = maxima.config
    levels = np.asarray(
        cfg.level_grid if level_grid is None else level_grid, dtype=float
    )
    if np.any(np.diff(levels) <= 0):
        raise ValueError("level grid must be strictly increasing")
    ns = np.asarray(cfg.block_lengths)
    count = np.empty((levels.size, ns.size), dtype=np.int64)
    for i, n in enumerate(cfg.block_lengths):
        count[:, i] = np.searchsorted(
            np.sort(maxima.base_maxima[n]), levels, side="right"
        )
    if tau_override is not None:
        tau = np.asarray(tau_override, dtype=float)
        if tau.shape != count.shape:
            raise ValueError("tau_override shape must match (levels, ns)")
    else:
        tau = np.array(
            [[regime.tau(n, lv) for n in cfg.block_lengths] for lv in levels]
        )
    return EmpiricalLaw(levels, ns, count, maxima.config.samples, tau, theta_ref)


def law_deviation(law: EmpiricalLaw, theta: float = None):
    """Pointwise |a_hat - exp(-theta tau)| and its sup over levels per n."""
    if theta is None:
        theta = law.theta_ref
    dev = np.abs(law.a_hat - np.exp(-theta * law.tau))
    return dev, dev.max(axis=0)


# ---------------------------------------------------------------------------
# extremal index


@dataclass
class ThetaEstimate:
    value: float
    stderr: float
    n: int
    points: int


_RETAIN_A = (0.05, 0.95)
_RETAIN_TAU = (0.05, 3.0)


def estimate_theta(law: EmpiricalLaw, n_boot: int = 200, seed: int = 1) -> ThetaEstimate:
    """Through-origin slope of -log a_hat on tau over the retained bulk.

    Uses the largest block length that keeps at least 5 points after the
    retention filter; the standard error comes from multinomial bootstrap
    resampling of the replicate level histogram.
    """
    a = law.a_hat
    for i in reversed(range(law.block_lengths.size)):
        mask = (
            (a[:, i] >= _RETAIN_A[0])
            & (a[:, i] <= _RETAIN_A[1])
            & (law.tau[:, i] >= _RETAIN_TAU[0])
            & (law.tau[:, i] <= _RETAIN_TAU[1])
        )
        if mask.sum() >= 5:
            break
    else:
        raise RuntimeError("insufficient grid coverage")
    x = law.tau[mask, i]
    total = law.total
    y = -np.log(law.count_below[mask, i] / total)
    denom = float(x @ x)
    theta = float(x @ y) / denom

    # bootstrap: resample J replicates from the level-bin histogram at n_i
    cb = law.count_below[:, i]
    bins = np.diff(np.concatenate([[0], cb, [total]]))
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(total, bins / total, size=n_boot)
    cb_star = np.cumsum(draws, axis=1)[:, :-1][:, mask]
    a_star = np.maximum(cb_star, 1) / total
    thetas = (np.log(a_star) @ -x) / denom
    return ThetaEstimate(
        theta, float(np.std(thetas, ddof=1)), int(law.block_lengths[i]), int(mask.sum())
    )


# ---------------------------------------------------------------------------
# Gumbel rescaling and tail families


@dataclass
class GumbelCurves:
    """Law in rescaled coordinates y = -log tau, against exp(-exp(-y))."""

    y: np.ndarray
    cdf: np.ndarray
    reference: np.ndarray
    levels: np.ndarray
    block_lengths: np.ndarray


def gumbel_normalize(law: EmpiricalLaw, regime) -> GumbelCurves:
    y = np.array(
        [[regime.gumbel_y(lv, n) for n in law.block_lengths] for lv in law.levels]
    )
    return GumbelCurves(
        y, law.a_hat, np.exp(-np.exp(-y)), law.levels, law.block_lengths
    )


@dataclass
class TailFit:
    family: str
    exponent: float
    points: int


def frechet_weibull_check(
    maxima: BlockMaxima,
    form=None,
    n: int = None,
    band=(0.02, 0.98),
    max_level: int = 60,
) -> TailFit:
    """Tail exponent of the maxima distribution on integer base levels.

    Regresses log(-log a_hat) on the log of the (shifted) observable level;
    the slope estimates the Frechet exponent for the Exponential form and
    the Weibull exponent for the Bounded form.
    """
    if form is None:
        form = getattr(maxima.config.intensity, "form", None)
    if isinstance(form, Linear) or form is None:
        raise ValueError("tail fit needs an Exponential or Bounded form")
    if n is None:
        n = maxima.config.block_lengths[-1]
    s = np.sort(maxima.base_maxima[n])
    grid = np.arange(1, max_level + 1)
    a_hat = np.searchsorted(s, grid, side="right") / s.size
    keep = (a_hat >= band[0]) & (a_hat <= band[1])
    if keep.sum() < 3:
        raise RuntimeError("insufficient tail points")
    z = np.log(-np.log(a_hat[keep]))
    if isinstance(form, Exponential):
        x = grid[keep] / form.beta  # log of the observable level
        slope = np.polyfit(x, z, 1)[0]
        return TailFit("frechet", -float(slope), int(keep.sum()))
    if isinstance(form, Bounded):
        x = -grid[keep] / form.gamma  # log of the gap below the sup
        slope = np.polyfit(x, z, 1)[0]
        return TailFit("weibull", float(slope), int(keep.sum()))
    raise TypeError(f"unknown observable form {form!r}")


def level_set_exponent(
    samples: np.ndarray, form: Exponential, m_lo: int = 1, m_hi: int = 12
) -> float:
    """Slope of the level-set occupation law on raw (not maxima) samples.

    For the Exponential form the fraction of samples with observable at or
    above the level decays as a power of the level; the fitted exponent
    should match the Frechet index.  Free intercept, so the discrete level
    spacing introduces no bias.
    """
    if not isinstance(form, Exponential):
        raise ValueError("level-set law is fitted for the Exponential form")
    ms = np.arange(m_lo, m_hi + 1)
    frac = np.array([np.mean(samples >= m) for m in ms])
    keep = frac > 0
    if keep.sum() < 3:
        raise RuntimeError("insufficient tail points")
    slope = np.polyfit(ms[keep] / form.beta, np.log(frac[keep]), 1)[0]
    return -float(slope)
