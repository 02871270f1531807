"""Minkowski question-mark function: evaluation, inversion, interval measure.

The question-mark function Q maps [0, 1] onto itself, sending the
Stern-Brocot (Farey) subdivision to the dyadic subdivision.  It satisfies
the two branch identities

    Q(x / (1 + x)) = Q(x) / 2
    Q(1 / (2 - x)) = (Q(x) + 1) / 2

together with Q(0) = 0, Q(1) = 1 and the symmetry Q(x) + Q(1 - x) = 1.
Viewed as a distribution function, Q is the invariant measure of the
Mobius interval map implemented in `maps`, and it is singular continuous:
all the mass sits on a set of zero Lebesgue measure.

Two independent evaluators are provided.  `qmark_eval` walks the
Stern-Brocot tree, emitting one output bit per left/right descent and
compressing runs of equal bits so that double-precision inputs terminate
exactly.  `qmark_eval_cf` sums the alternating series over continued
fraction digits,

    Q([0; a1, a2, ...]) = sum_i (-1)^(i+1) * 2^(1 - (a1 + ... + ai)),

and exists mainly to cross-check the first.  Near rational points Q is
flatter than any power law, so interval measures collapse below the
double-precision floor almost immediately; the `_log2` variants carry an
explicit base-2 exponent for that regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

LOG2 = math.log(2.0)

# Run compression emits one continued-fraction digit per loop pass, so the
# pass count is O(log q) for p/q; the cap is a safety net, not a budget.
_MAX_DESCENT_RUNS = 1 << 20


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, int):
        f = Fraction(x)
    elif isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise ValueError("argument must be a finite number in [0, 1]")
        f = Fraction(x)
    else:
        raise TypeError(f"unsupported argument type {type(x)!r}")
    if f < 0 or f > 1:
        raise ValueError(f"argument {x!r} outside [0, 1]")
    return f


@dataclass(frozen=True)
class ContinuedFraction:
    """Canonical continued fraction [0; a1, a2, ..., ar] of a number in (0, 1].

    Canonical means every digit is a positive integer and the last digit is
    at least 2, except for the single-digit expansion [0; 1] of 1 itself.
    """

    terms: tuple

    def __post_init__(self):
        t = tuple(int(a) for a in self.terms)
        if len(t) == 0:
            raise ValueError("empty continued fraction")
        if any(a < 1 for a in t):
            raise ValueError("continued fraction digits must be >= 1")
        if len(t) > 1 and t[-1] < 2:
            raise ValueError("canonical form requires last digit >= 2")
        object.__setattr__(self, "terms", t)

    @classmethod
    def from_rational(cls, p: int, q: int) -> "ContinuedFraction":
        """Expansion of p/q with 0 < p <= q."""
        if not (0 < p <= q):
            raise ValueError("need 0 < p <= q")
        terms = []
        a, b = q, p
        while b:
            terms.append(a // b)
            a, b = b, a % b
        return cls(tuple(terms))

    def value(self) -> Fraction:
        v = Fraction(0)
        for a in reversed(self.terms):
            v = 1 / (a + v)
        return v


def qmark_eval(x, tol: float = 1e-15) -> float:
    """Q(x) by Stern-Brocot descent.

    Each descent step halves the dyadic output interval; runs of equal
    steps are taken in closed form, so rational input (every float is one)
    terminates after at most O(log q) runs and the returned value is the
    exact dyadic Q(x) rounded once to double precision.  The absolute
    error never exceeds `tol`.
    """
    mant, exp = _qmark_parts(_as_fraction(x))
    del tol  # the exact path always does better; kept for interface stability
    return math.ldexp(mant, -exp)


def qmark_eval_log2(x) -> float:
    """log2 of Q(x), finite for x > 0 even when Q(x) underflows a double."""
    f = _as_fraction(x)
    if f == 0:
        return -math.inf
    mant, exp = _qmark_parts(f)
    return math.log2(mant) - exp


def _qmark_parts(f: Fraction):
    """Q(f) as (mantissa, exponent) with Q = mantissa * 2**-exponent.

    The mantissa lies in [1, 2) for f in (0, 1); the endpoints return
    (0.0, 0) and (1.0, 0).
    """
    p, q = f.numerator, f.denominator
    if p == 0:
        return 0.0, 0
    if p == q:
        return 1.0, 0

    # Stern-Brocot frame [pl/ql, pr/qr], starting at [0/1, 1/1].  Writing
    # x = p/q, the two comparisons below reduce to a run-subtraction on
    #   alpha = p*ql - pl*q   (distance to the left fraction, scaled)
    #   beta  = pr*q - p*qr   (distance to the right fraction, scaled)
    # A left step (output bit 0) keeps alpha and replaces beta by
    # beta - alpha; a right step (bit 1) does the opposite.  Equality
    # alpha == beta means x is the mediant and the value closes exactly.
    alpha, beta = p, q - p
    emitted = 0          # bits emitted so far
    lead = None          # position of the first 1 bit (sets the exponent)
    mant = 0.0           # accumulated mantissa, scaled by 2**-lead later
    for _ in range(_MAX_DESCENT_RUNS):
        if alpha == beta:
            # exact mediant: append bit 1 and terminate
            if lead is None:
                lead = emitted
            mant += math.ldexp(1.0, lead - emitted)
            break
        if alpha < beta:
            r = (beta - 1) // alpha
            beta -= r * alpha
            emitted += r
        else:
            r = (alpha - 1) // beta
            alpha -= r * beta
            if lead is None:
                lead = emitted
            # run of r ones at bit positions emitted+1 .. emitted+r,
            # normalized so the leading output bit carries weight 1
            mant += math.ldexp(1.0, lead - emitted + 1) - math.ldexp(1.0, lead - emitted + 1 - r)
            emitted += r
    else:
        raise RuntimeError("question-mark descent failed to terminate")
    return mant, lead + 1


def qmark_eval_cf(cf) -> float:
    """Q from a continued fraction, by the alternating dyadic series.

    Accepts a ContinuedFraction or a bare digit sequence.  Evaluated
    backward in Horner form, u_i = 2**-a_i * (1 - u_{i+1}), which keeps
    every partial result in [0, 1/2]; Q = 2 * u_1.
    """
    terms = cf.terms if isinstance(cf, ContinuedFraction) else ContinuedFraction(tuple(cf)).terms
    u = 0.0
    for a in reversed(terms):
        u = math.ldexp(1.0 - u, -a)
    return 2.0 * u


def qmark_inverse(y, tol: float = 1e-15) -> float:
    """The inverse function Q^{-1}(y) for y in [0, 1].

    The binary digits of y drive the two inverse branches
    w0: t -> t/(1+t) and w1: t -> 1/(2-t); a double's digit string is
    finite, the all-zero tail contracts onto the fixed point 0 of w0, and
    the result is an exact rational rounded once.
    """
    f = _as_fraction(y)
    del tol
    p, s = f.numerator, f.denominator
    if p == 0:
        return 0.0
    if p == s:
        return 1.0
    # digits of p/s, s a power of two for float input; for odd denominators
    # fall back to long division digit by digit (still terminates: the
    # public contract only admits dyadic y).
    if s & (s - 1):
        raise ValueError("qmark_inverse expects a dyadic rational in [0, 1]")
    nbits = s.bit_length() - 1
    # compose W = w_{b1} w_{b2} ... as an integer Mobius matrix, then apply
    # to the point 0.  Runs of equal bits have closed forms:
    #   w0^a = [[1, 0], [a, 1]]      w1^a = [[1-a, a], [-a, 1+a]]
    a11, a12, a21, a22 = 1, 0, 0, 1
    i = nbits - 1
    while i >= 0:
        bit = (p >> i) & 1
        run = 1
        while i - run >= 0 and ((p >> (i - run)) & 1) == bit:
            run += 1
        if bit == 0:
            b11, b12, b21, b22 = 1, 0, run, 1
        else:
            b11, b12, b21, b22 = 1 - run, run, -run, 1 + run
        a11, a12, a21, a22 = (
            a11 * b11 + a12 * b21,
            a11 * b12 + a12 * b22,
            a21 * b11 + a22 * b21,
            a21 * b12 + a22 * b22,
        )
        i -= run
    return a12 / a22


def _run0(p: int, q: int) -> int:
    # consecutive applications of t -> t/(1-t) available from p/q <= 1/2
    return (q - 2 * p) // p + 1


def _run1(p: int, q: int) -> int:
    # consecutive applications of t -> 2 - 1/t available from p/q >= 1/2
    return q // (q - p) - 1


def _interval_parts(a, b):
    """Q(b) - Q(a) as (mantissa, exponent), measure = mantissa * 2**-exponent.

    Follows the common branch prefix of the two endpoints with run
    compression, then splits at the frame midpoint: in the current frame
    Q(b') - Q(a') = (Q(b1) + Q(1 - a1)) / 2 with b1 = 2 - 1/b' and
    a1 = a'/(1 - a').  Both summands are plain question-mark values of
    points near 0, evaluated without any subtraction, so no cancellation
    occurs at any scale.
    """
    fa, fb = _as_fraction(a), _as_fraction(b)
    if fb < fa:
        raise ValueError("interval endpoints out of order")
    if fa == fb:
        return 0.0, 0
    pa, qa = fa.numerator, fa.denominator
    pb, qb = fb.numerator, fb.denominator
    k = 0
    for _ in range(_MAX_DESCENT_RUNS):
        if 2 * pb <= qb:
            # both endpoints in the left branch
            j = _run0(pb, qb)
            if pa > 0:
                j = min(j, _run0(pa, qa))
            qa -= j * pa
            qb -= j * pb
            k += j
        elif 2 * pa >= qa:
            # both in the right branch
            ra, rb = qa - pa, qb - pb
            j = _run1(pa, qa)
            if rb > 0:
                j = min(j, _run1(pb, qb))
            pa, qa = qa - (j + 1) * ra, qa - j * ra
            pb, qb = qb - (j + 1) * rb, qb - j * rb
            k += j
        else:
            break
    else:
        raise RuntimeError("interval descent failed to terminate")

    # split: a' < 1/2 < b' (weak inequalities collapse to Q = 0 terms)
    m1, e1 = _qmark_parts(Fraction(2 * pb - qb, pb))            # Q(2 - 1/b')
    m2, e2 = _qmark_parts(Fraction(qa - 2 * pa, qa - pa))       # Q(1 - a'/(1-a'))
    if m1 == 0.0 and m2 == 0.0:
        return 0.0, 0
    e = min(e1 if m1 else e2, e2 if m2 else e1)
    mant = 0.0
    if m1:
        mant += math.ldexp(m1, e - e1)
    if m2:
        mant += math.ldexp(m2, e - e2)
    return mant, e + k + 1


def interval_measure(a, b, tol: float = 1e-15) -> float:
    """Question-mark measure Q(b) - Q(a) of the interval (a, b).

    Exact up to a single rounding; underflows to 0.0 once the measure
    drops below the double-precision range (around 1e-308), for which case
    `interval_measure_log2` keeps the exponent explicitly.
    """
    del tol
    mant, exp = _interval_parts(a, b)
    return math.ldexp(mant, -exp)


def interval_measure_log2(a, b) -> float:
    """log2 of the interval measure; -inf for an empty interval."""
    mant, exp = _interval_parts(a, b)
    if mant == 0.0:
        return -math.inf
    return math.log2(mant) - exp


def small_x_asymptotic(eps: float) -> float:
    """Leading behaviour 2 * exp(-log(2)/eps) of Q(eps) as eps -> 0."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return 2.0 * math.exp(-LOG2 / eps)


def small_x_asymptotic_log2(eps: float) -> float:
    if eps <= 0:
        raise ValueError("eps must be positive")
    return 1.0 - 1.0 / eps


def ball_measure_asymptotic(k: int, eps: float) -> float:
    """Asymptotic measure 2^(3-k-1/k) * exp(-log(2)/(k^2 eps)) of the
    eps-ball at 1/k.

    Valid as a large-k leading form; at small k it is accurate only up to
    a bounded factor (about 0.85-0.91 at k = 4), which the exact
    `interval_measure` resolves.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return 2.0 ** (3.0 - k - 1.0 / k) * math.exp(-LOG2 / (k * k * eps))


def ball_measure_asymptotic_log2(k: int, eps: float) -> float:
    if k < 2:
        raise ValueError("k must be >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return (3.0 - k - 1.0 / k) - 1.0 / (k * k * eps)
