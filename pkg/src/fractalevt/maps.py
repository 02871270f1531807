"""Trajectory generation for the three model dynamical systems.

The tent map and the irrational rotation are iterated forward in double
precision; the rotation reduces the multiple j * omega with 160-bit
fixed-point arithmetic so that no error accumulates along the orbit.

The Moebius map (x/(1-x) on the left half, 2 - 1/x on the right) preserves
the singular question-mark measure, and forward iteration of it is
ill-conditioned.  Points are therefore sampled through the conjugacy with
the doubling map: a fair-bit stream is interpreted as the binary expansion
of Q(x), and x is recovered by composing the two inverse branches
w0(t) = t/(1+t) and w1(t) = 1/(2-t) as integer Moebius matrices.  Each
appended bit multiplies the matrix on the right by [[1,0],[1,1]] (bit 0)
or [[1,1],[0,1]] (bit 1); the matrix [[a,b],[c,d]] encloses the point in
the interval [b/(b+d), a/(a+c)] of width 1/((a+c)(b+d)).  Shifting the bit
stream left by one applies the forward map, so trajectory element j is the
point built from bits j+1, j+2, ...

Word-granular random access into a Philox counter stream keeps every bit a
pure function of (seed, position), which is what makes replay across
worker counts byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import isqrt

import numpy as np

__all__ = [
    "STREAM_SYMBOLS",
    "STREAM_INIT",
    "STREAM_SAMPLE",
    "STREAM_BOOT",
    "raw_words",
    "uniform_block",
    "OmegaExtended",
    "golden_omega",
    "continued_fraction_terms",
    "Tent",
    "Rotation",
    "Mobius",
    "MapSpec",
    "tent_step",
    "rotation_step",
    "rotation_multiples",
    "mobius_step",
    "SymbolStream",
    "MobiusWord",
    "qmark_point",
    "mobius_anchor",
    "mobius_backward_orbit",
    "UniformSeed",
    "SymbolicSeed",
    "trajectory",
]

# substream tags, kept apart in the 128-bit Philox key space so one scenario
# seed yields independent bit, initial-point, sampling and bootstrap streams
STREAM_SYMBOLS = 0
STREAM_INIT = 1
STREAM_SAMPLE = 2
STREAM_BOOT = 3

_WORDS_PER_BLOCK = 4  # Philox4x64: one counter increment emits 4 words


def _philox(seed: int, stream: int):
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Philox(key=(stream << 64) | seed)


def raw_words(seed: int, start_word: int, count: int, stream: int = STREAM_SYMBOLS):
    """Words [start_word, start_word+count) of the keyed Philox stream.

    Equivalent to random_raw(start_word + count)[start_word:], but seeks in
    O(1) via advance(); the counter moves in blocks of four 64-bit words.
    """
    if start_word < 0 or count < 0:
        raise ValueError("start_word and count must be nonnegative")
    gen = _philox(seed, stream)
    block, offset = divmod(start_word, _WORDS_PER_BLOCK)
    if block:
        gen.advance(block)
    return gen.random_raw(count + offset)[offset:]


def uniform_block(
    seed: int, start: int, count: int, stream: int = STREAM_INIT
) -> np.ndarray:
    """Uniform [0,1) doubles i of the keyed stream, i in [start, start+count)."""
    w = raw_words(seed, start, count, stream)
    return (w >> np.uint64(11)) * 2.0**-53


# ---------------------------------------------------------------------------
# rotation angle in extended precision

_OMEGA_BITS = 160
_OMEGA_MASK = (1 << _OMEGA_BITS) - 1


@dataclass(frozen=True)
class OmegaExtended:
    """Rotation angle stored as floor(omega * 2^160).

    Multiples are reduced mod 1 in integer arithmetic, so frac(j * omega)
    carries absolute error at most j * 2^-160: after 1e8 steps still below
    1e-40, far inside the 1e-10 budget.
    """

    scaled: int

    def __post_init__(self):
        if not 0 < self.scaled < 1 << _OMEGA_BITS:
            raise ValueError("scaled angle must lie strictly inside (0, 2^160)")

    @property
    def value(self) -> float:
        return self.scaled / (1 << _OMEGA_BITS)

    def multiple(self, m: int) -> float:
        """frac(m * omega) rounded to double."""
        return ((m * self.scaled) & _OMEGA_MASK) / (1 << _OMEGA_BITS)

    def multiples(self, start: int, count: int) -> np.ndarray:
        """frac(m * omega) for m in [start, start+count)."""
        out = np.empty(count, dtype=float)
        acc = (start * self.scaled) & _OMEGA_MASK
        for i in range(count):
            out[i] = acc / (1 << _OMEGA_BITS)
            acc = (acc + self.scaled) & _OMEGA_MASK
        return out

    @classmethod
    def from_float(cls, x: float) -> "OmegaExtended":
        if not 0.0 < x < 1.0:
            raise ValueError("angle must lie in (0, 1)")
        return cls(round(x * (1 << _OMEGA_BITS)))


def golden_omega() -> OmegaExtended:
    """(sqrt(5) - 1) / 2, the most badly approximable angle."""
    return OmegaExtended((isqrt(5 << 2 * _OMEGA_BITS) - (1 << _OMEGA_BITS)) >> 1)


def continued_fraction_terms(p: int, q: int, count: int) -> list:
    """First partial quotients [a0; a1, a2, ...] of p/q (at most count)."""
    terms = []
    while q and len(terms) < count:
        a, r = divmod(p, q)
        terms.append(a)
        p, q = q, r
    return terms


# ---------------------------------------------------------------------------
# map specifications


@dataclass(frozen=True)
class Tent:
    """Asymmetric tent map, Lebesgue-invariant for every peak position p."""

    p: float = 0.45

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")


@dataclass(frozen=True)
class Rotation:
    """Rigid rotation by an irrational angle, Lebesgue-invariant."""

    omega: OmegaExtended = field(default_factory=golden_omega)
    quotient_cap: int = 64

    def __post_init__(self):
        # guard against near-rational angles: the first 20 partial
        # quotients of the stored value must exist and stay small
        terms = continued_fraction_terms(self.omega.scaled, 1 << _OMEGA_BITS, 21)
        tail = terms[1:]
        if len(tail) < 20 or max(tail[:20]) > self.quotient_cap:
            raise ValueError(
                "rotation angle fails the irrationality check "
                f"(partial quotients {tail[:20]}, cap {self.quotient_cap})"
            )


@dataclass(frozen=True)
class Mobius:
    """Piecewise-Moebius map preserving the question-mark measure."""

    tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")


MapSpec = (Tent, Rotation, Mobius)


# ---------------------------------------------------------------------------
# single steps


def tent_step(x: float, p: float) -> float:
    if x < p:
        return x / p
    return (1.0 - x) / (1.0 - p)


def rotation_step(x: float, omega, j: int) -> float:
    """frac(x + (j+1) * omega): the state after step j from x."""
    if isinstance(omega, OmegaExtended):
        mu = omega.multiple(j + 1)
    else:
        mu = math.fmod((j + 1) * omega, 1.0)
    v = x + mu
    return v - math.floor(v)


def rotation_multiples(omega: OmegaExtended, start: int, count: int) -> np.ndarray:
    return omega.multiples(start, count)


def mobius_step(x: float) -> float:
    if x <= 0.5:
        return x / (1.0 - x)
    return 2.0 - 1.0 / x


# ---------------------------------------------------------------------------
# symbolic sampling of the question-mark measure


class SymbolStream:
    """Random-access fair-bit stream.

    bit(i) is a pure function of (seed, index + i); streams with equal
    seeds agree everywhere, which the replay guarantees rest on.  index
    offsets the whole stream, letting one seed's word space be carved into
    per-replicate windows.
    """

    generator = "philox4x64"
    _CACHE_WORDS = 256

    def __init__(self, seed: int, index: int = 0):
        if index < 0:
            raise ValueError("index must be nonnegative")
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.index = index
        self._blocks = {}

    def bit(self, i: int) -> int:
        """The i-th bit, i >= 1."""
        if i < 1:
            raise ValueError("bit positions start at 1")
        pos = self.index + i - 1
        w, r = divmod(pos, 64)
        blk, off = divmod(w, self._CACHE_WORDS)
        words = self._blocks.get(blk)
        if words is None:
            words = raw_words(self.seed, blk * self._CACHE_WORDS, self._CACHE_WORDS)
            self._blocks[blk] = words
        return int((words[off] >> np.uint64(63 - r)) & np.uint64(1))


_ENTRY_CAP = float(1 << 53)


@dataclass
class MobiusWord:
    """Composition of inverse-branch runs as a 2x2 matrix with det +1.

    Entries stay exact integers until one exceeds 2^53, then the matrix is
    carried in floating form (the enclosure only needs entry ratios, which
    rescaling preserves).
    """

    runs: list = field(default_factory=list)
    matrix: tuple = (1, 0, 0, 1)
    floating: bool = False

    def append_run(self, symbol: int, length: int):
        if symbol not in (0, 1) or length < 1:
            raise ValueError("run must be (symbol in {0,1}, positive length)")
        a, b, c, d = self.matrix
        if symbol == 0:
            a, c = a + b * length, c + d * length
        else:
            b, d = a * length + b, c * length + d
        if self.runs and self.runs[-1][0] == symbol:
            self.runs[-1] = (symbol, self.runs[-1][1] + length)
        else:
            self.runs.append((symbol, length))
        if not self.floating and max(a, b, c, d) > _ENTRY_CAP:
            self.floating = True
            a, b, c, d = float(a), float(b), float(c), float(d)
        elif self.floating:
            top = max(a, b, c, d)
            if top > 1e250:
                a, b, c, d = a / top, b / top, c / top, d / top
        self.matrix = (a, b, c, d)

    @property
    def image_interval(self):
        a, b, c, d = self.matrix
        lo = b / (b + d)
        hi = a / (a + c)
        if lo > hi:  # sub-ulp enclosure collapsed by division rounding
            lo = hi = 0.5 * (lo + hi)
        return lo, hi

    @property
    def width(self) -> float:
        lo, hi = self.image_interval
        return hi - lo

    def midpoint(self) -> float:
        lo, hi = self.image_interval
        return 0.5 * (lo + hi)

    def limit_point(self, symbol: int) -> float:
        """Limit of the enclosure under an infinite run of symbol."""
        lo, hi = self.image_interval
        return hi if symbol else lo


def qmark_point(stream, offset: int, tol: float = 1e-12, max_bits: int = 10**6):
    """Point whose question-mark image has binary expansion bits
    offset+1, offset+2, ... of the stream.

    Bits are consumed in runs of equal symbols, each composed in closed
    form.  A run reaching the end of the bit window is treated as
    infinite, which pins the point to the enclosure edge exactly (a fair
    stream produces such runs with probability ~2^-max_bits).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    word = MobiusWord()
    pos = offset + 1
    consumed = 0
    while True:
        if word.width < tol:
            return word.midpoint()
        if consumed >= max_bits:
            raise RuntimeError("window exhausted")
        symbol = stream.bit(pos)
        cap = max_bits - consumed
        length = 1
        while length < cap and stream.bit(pos + length) == symbol:
            length += 1
        if length >= cap:
            word.append_run(symbol, length)
            if word.width < tol:
                return word.midpoint()
            return word.limit_point(symbol)
        word.append_run(symbol, length)
        pos += length
        consumed += length


def _bit_column(words: np.ndarray, pos: int) -> np.ndarray:
    """Bit at 0-based position pos of each row of a (J, R) word matrix."""
    w, r = divmod(pos, 64)
    return (words[:, w] >> np.uint64(63 - r)) & np.uint64(1)


def mobius_anchor(words: np.ndarray, t: int, tol: float = 1e-12) -> np.ndarray:
    """Trajectory element t for every row of a word matrix.

    Runs the enclosure descent on all rows at once with float64 matrices;
    entries are exact below 2^53 and the enclosure is scale-invariant, so
    occasional rescaling costs nothing.  Raises "window exhausted" if some
    row's enclosure has not shrunk below tol when the words run out.
    """
    n_rows, n_words = words.shape
    a = np.ones(n_rows)
    b = np.zeros(n_rows)
    c = np.zeros(n_rows)
    d = np.ones(n_rows)
    active = np.ones(n_rows, dtype=bool)
    pos = t
    while pos < n_words * 64:
        bits = _bit_column(words, pos) == 1
        one = active & bits
        zero = active & ~bits
        s1 = a + b
        s2 = c + d
        a = np.where(zero, s1, a)
        c = np.where(zero, s2, c)
        b = np.where(one, s1, b)
        d = np.where(one, s2, d)
        pos += 1
        top = np.maximum(np.maximum(a, b), np.maximum(c, d))
        if top.max() > 1e250:
            scale = np.where(top > 1e250, top, 1.0)
            a, b, c, d = a / scale, b / scale, c / scale, d / scale
        lo = b / (b + d)
        hi = a / (a + c)
        active &= (hi - lo) >= tol
        if not active.any():
            break
    if active.any():
        raise RuntimeError("window exhausted")
    return 0.5 * (b / (b + d) + a / (a + c))


def mobius_backward_orbit(words: np.ndarray, j_hi: int, j_lo: int, x_hi: np.ndarray):
    """Yield (j, x_j) for j = j_hi - 1 down to j_lo, given x at j_hi.

    One backward step applies the inverse branch selected by bit j+1:
    x_j = w0(x_{j+1}) on a 0-bit, w1(x_{j+1}) on a 1-bit.  Both branches
    are weak contractions of [0,1], so the anchor error never grows.  The
    yielded array is reused between steps; copy it to keep it.
    """
    x = np.array(x_hi, dtype=float, copy=True)
    for j in range(j_hi - 1, j_lo - 1, -1):
        bits = _bit_column(words, j) == 1
        x = np.where(bits, 1.0 / (2.0 - x), x / (1.0 + x))
        yield j, x


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class UniformSeed:
    """Lebesgue-distributed initial point drawn from the seed."""

    seed: int


@dataclass(frozen=True)
class SymbolicSeed:
    """Question-mark-distributed start defined by a symbol stream."""

    stream: SymbolStream


def trajectory(map_spec, init, n: int) -> np.ndarray:
    """Elements x_0 .. x_{n-1} of one orbit, x_j distributed per the
    invariant measure of the map."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(map_spec, (Tent, Rotation)):
        if not isinstance(init, UniformSeed):
            raise ValueError("measure/map mismatch: this map needs UniformSeed")
        x0 = float(uniform_block(init.seed, 0, 1)[0])
        out = np.empty(n, dtype=float)
        out[0] = x0
        if isinstance(map_spec, Tent):
            x = x0
            for j in range(1, n):
                x = tent_step(x, map_spec.p)
                out[j] = x
        else:
            mult = map_spec.omega.multiples(1, n - 1) if n > 1 else []
            for j in range(1, n):
                v = x0 + mult[j - 1]
                out[j] = v - math.floor(v)
        return out
    if isinstance(map_spec, Mobius):
        if not isinstance(init, SymbolicSeed):
            raise ValueError("measure/map mismatch: Mobius needs SymbolicSeed")
        return np.array(
            [qmark_point(init.stream, j, map_spec.tol) for j in range(n)]
        )
    raise TypeError(f"unknown map spec {map_spec!r}")
