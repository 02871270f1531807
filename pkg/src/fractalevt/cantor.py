"""Middle-third Cantor set geometry: gap order, distances, neighborhoods.

Points of [0, 1] are classified by the ternary subdivision.  The gap
order m(x) is the depth at which x falls into a removed middle third
(the first ternary digit equal to 1); points of the Cantor set K never
do.  The Lebesgue measure of the depth-m prefractal is (2/3)^m, which
makes m(x) a geometric random variable under the uniform measure and
drives the staircase hitting laws in `evt`.

All digit extraction is exact integer arithmetic.  A double x is read as
the dyadic rational round(x * 2^53) / 2^53 (exact for anything our
samplers produce); one ternary digit costs a multiply, a shift and a
mask, and the batch path takes six digits at a time through a 729-entry
table.  When the first 1-digit appears at depth m the residual integer
is the position of x inside its gap scaled to [0, 1), so distances to K
come out with pure relative rounding error even at depths where the gap
endpoints themselves are not representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

#: Minkowski (box-counting) dimension of the middle-third Cantor set.
CANTOR_DIMENSION = math.log(2.0) / math.log(3.0)

#: Codimension 1 - log2/log3, the scaling exponent of Leb(N_eps(K)).
CANTOR_CODIMENSION = 1.0 - CANTOR_DIMENSION

_BITS = 53
_ONE = 1 << _BITS
_MASK = _ONE - 1

# Ternary digits scanned before declaring a point a member of K.  A double
# carries 53 bits, about 34 ternary digits of information; 48 = 8 blocks of
# 6 keeps scalar and batch paths in exact agreement.  Points surviving the
# scan are treated as Cantor points (probability (2/3)^48 ~ 3e-10 under any
# of the sampled measures).
DEFAULT_SCAN_DEPTH = 48
_BATCH_BLOCKS = 8  # 6 digits per block

_POW3_SMALL = np.array([3**k for k in range(7)], dtype=np.int64)

# 3^-m as float64; indices past the underflow point clamp to zero
_POW3_NEG = np.exp(-np.arange(1200, dtype=np.float64) * math.log(3.0))


def _build_block_tables():
    order = np.zeros(729, dtype=np.int8)
    for v in range(729):
        w = v
        digits = []
        for _ in range(6):
            digits.append(w % 3)
            w //= 3
        digits.reverse()
        for i, d in enumerate(digits):
            if d == 1:
                order[v] = i + 1
                break
    return order


_ORDER6 = _build_block_tables()


def _digit_scan_fraction(p: int, q: int, max_depth: int):
    """First 1-digit of the ternary expansion of p/q in [0, 1].

    Returns (m, u) where u = position inside the depth-m gap as a
    Fraction in (0, 1), or (0, None) when no gap shows up within
    max_depth digits (the point is in K, exactly so when the remainder
    hits zero).
    """
    y = p
    for j in range(1, max_depth + 1):
        y *= 3
        d, y = divmod(y, q)
        if d == 1:
            if y == 0:
                return 0, None  # left gap endpoint, a member of K
            return j, Fraction(y, q)
        if y == 0:
            return 0, None      # ternary expansion terminates in 0s or 2s
    return 0, None


def _as_unit_fraction(x):
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, (int, np.integer)):
        f = Fraction(int(x))
    elif isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            raise ValueError("gap order is undefined for nan")
        f = Fraction(x)
    else:
        raise TypeError(f"unsupported argument type {type(x)!r}")
    if f < 0 or f > 1:
        raise ValueError(f"argument {x!r} outside [0, 1]")
    return f


def gap_order(x, max_depth: int = DEFAULT_SCAN_DEPTH) -> int:
    """Depth of the removed middle third containing x, or 0 for x in K.

    Exact for float and Fraction input.  A return of 0 means no gap was
    seen within `max_depth` ternary digits; for rational x whose
    expansion terminates or avoids the digit 1 this is a definite
    membership statement, otherwise a statement about the tested depth.
    """
    f = _as_unit_fraction(x)
    m, _ = _digit_scan_fraction(f.numerator, f.denominator, max_depth)
    return m


@dataclass(frozen=True)
class GapDescriptor:
    """One removed middle third: order m, exact left endpoint, length 3^-m."""

    order: int
    left: Fraction
    length: Fraction

    @property
    def right(self) -> Fraction:
        return self.left + self.length


def locate_gap(x, max_depth: int = DEFAULT_SCAN_DEPTH) -> GapDescriptor:
    """The open gap containing x, with exact rational endpoints.

    Raises ValueError when x lies in K (to the scanned depth):
    membership has no surrounding gap.
    """
    f = _as_unit_fraction(x)
    m, u = _digit_scan_fraction(f.numerator, f.denominator, max_depth)
    if m == 0:
        raise ValueError(f"{x!r} is in the Cantor set (to depth {max_depth})")
    length = Fraction(1, 3**m)
    return GapDescriptor(m, f - u * length, length)


def _scan_batch(x: np.ndarray, blocks: int = _BATCH_BLOCKS):
    """Vectorized first-1-digit scan.

    Returns (m, u) as int arrays: m = 0 flags membership of K to the
    scanned depth, otherwise u / 2^53 is the position of the point
    inside its order-m gap.  Input values are quantized to the 2^-53
    grid, which is exact for anything built from 53 random bits.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size and (np.nanmin(x) < 0.0 or np.nanmax(x) > 1.0 or np.isnan(x).any()):
        raise ValueError("batch input must lie in [0, 1]")
    p = np.round(np.ldexp(x, _BITS)).astype(np.int64)
    m = np.zeros(x.shape, dtype=np.int32)
    u = np.zeros(x.shape, dtype=np.int64)
    found = (p == 0) | (p == _ONE)  # endpoints belong to K, m stays 0
    y = np.where(found, 0, p)
    for b in range(blocks):
        t = y * 729
        v = t >> _BITS
        o = _ORDER6[v]
        new = (~found) & (o > 0)
        if new.any():
            r = o[new].astype(np.int64)
            u[new] = (y[new] * _POW3_SMALL[r]) & _MASK
            m[new] = 6 * b + r
            found[new] = True
        y = t & _MASK
    return m, u


def gap_order_batch(x) -> np.ndarray:
    """Vectorized `gap_order` on an array of doubles."""
    m, _ = _scan_batch(x)
    return m


def distance_to_cantor(x):
    """Distance to the middle-third Cantor set.

    Scalar floats and Fractions go through the exact digit scan; numpy
    arrays through the vectorized one.  The distance inside an order-m
    gap is 3^-m * min(u, 1-u) with u the relative position, a product of
    exactly-known factors, so no cancellation occurs for deep gaps.
    """
    if isinstance(x, np.ndarray):
        m, u = _scan_batch(x)
        rel = np.minimum(u, _ONE - u) * (0.5**_BITS)
        scale = _POW3_NEG[np.minimum(np.maximum(m, 1), len(_POW3_NEG) - 1)]
        return np.where(m > 0, scale * rel, 0.0)
    f = _as_unit_fraction(x)
    m, u = _digit_scan_fraction(f.numerator, f.denominator, DEFAULT_SCAN_DEPTH)
    if m == 0:
        return 0.0
    rel = min(u, 1 - u)
    return math.exp(math.log(float(rel)) - m * math.log(3.0))


def prefractal_measure(m: int) -> float:
    """Lebesgue measure (2/3)^m of the depth-m prefractal E_m."""
    if m < 0:
        raise ValueError("depth must be >= 0")
    return (2.0 / 3.0) ** m


def gap_count(m: int) -> int:
    """Number of gaps of order exactly m (2^(m-1) for m >= 1)."""
    if m < 1:
        raise ValueError("gap order must be >= 1")
    return 1 << (m - 1)


def mean_log_distance_on_gap(gap) -> float:
    """Mean of log dist(x, K) for x uniform on a gap.

    Accepts a GapDescriptor or a bare positive length.  The distance to
    K inside a gap is the distance to the nearer endpoint, so the
    average is log(length) - log(2) - 1; the offset 1 + log 2 does not
    depend on the gap.
    """
    length = float(gap.length) if isinstance(gap, GapDescriptor) else float(gap)
    if length <= 0:
        raise ValueError("gap length must be positive")
    return math.log(length) - math.log(2.0) - 1.0


def lebesgue_neighborhood_exact(eps: float) -> float:
    """Exact Lebesgue measure of the eps-neighborhood of K within [0, 1].

    Gaps longer than 2 eps retain an uncovered middle; with M the
    largest order for which 3^-M > 2 eps the measure is
    (2/3)^M + 2 eps (2^M - 1).  Exhibits the log-periodic oscillation
    around the eps^(1 - log2/log3) power law that the fitting routines
    quantify.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps != eps or eps == math.inf:
        raise ValueError("eps must be finite")
    f = Fraction(eps)
    M = 0
    while 3 ** (M + 1) * 2 * f < 1:
        M += 1
    return (2.0 / 3.0) ** M + 2.0 * eps * (2.0**M - 1.0)
