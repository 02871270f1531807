"""Tests for the question-mark evaluators and interval measure."""

import math
import random
from fractions import Fraction

import pytest

from fractalevt.qmark import (
    ContinuedFraction,
    ball_measure_asymptotic,
    ball_measure_asymptotic_log2,
    interval_measure,
    interval_measure_log2,
    qmark_eval,
    qmark_eval_cf,
    qmark_eval_log2,
    qmark_inverse,
    small_x_asymptotic,
    small_x_asymptotic_log2,
)


def test_spot_values():
    assert qmark_eval(0.0) == 0.0
    assert qmark_eval(1.0) == 1.0
    assert qmark_eval(0.5) == 0.5
    assert qmark_eval(Fraction(1, 3)) == 0.25
    assert qmark_eval(Fraction(2, 5)) == 0.375
    assert qmark_eval(Fraction(1, 4)) == 0.125
    assert qmark_eval(Fraction(2, 3)) == 0.75


@pytest.mark.parametrize("n", [2, 3, 5, 10, 25, 50])
def test_unit_fractions_exact(n):
    # Q(1/n) = 2^(1-n), exactly representable and exactly computed
    assert qmark_eval(Fraction(1, n)) == math.ldexp(1.0, 1 - n)


def test_monotone_and_symmetric():
    pts = sorted(set(Fraction(p, q) for q in range(1, 41) for p in range(q + 1)))
    vals = [qmark_eval(x) for x in pts]
    for a, b in zip(vals, vals[1:]):
        assert b > a
    for x, v in zip(pts, vals):
        assert abs(v + qmark_eval(1 - x) - 1.0) < 1e-15


def test_descent_agrees_with_cf_series():
    worst = 0.0
    for q in range(2, 201):
        for p in range(1, q):
            f = Fraction(p, q)
            a = qmark_eval(f)
            b = qmark_eval_cf(ContinuedFraction.from_rational(p, q))
            worst = max(worst, abs(a - b))
    assert worst < 1e-15


def test_functional_equations_on_random_floats():
    rng = random.Random(7)
    for _ in range(500):
        x = rng.random()
        qx = qmark_eval(x)
        fx = Fraction(x)
        assert abs(qmark_eval(fx / (1 + fx)) - qx / 2) < 1e-15
        assert abs(qmark_eval(1 / (2 - fx)) - (qx + 1) / 2) < 1e-15


def test_continued_fraction_canonical_form():
    assert ContinuedFraction.from_rational(2, 5).terms == (2, 2)
    assert ContinuedFraction.from_rational(1, 3).terms == (3,)
    assert ContinuedFraction.from_rational(1, 1).terms == (1,)
    with pytest.raises(ValueError):
        ContinuedFraction((2, 1))
    with pytest.raises(ValueError):
        ContinuedFraction((0, 2))
    with pytest.raises(ValueError):
        ContinuedFraction(())
    cf = ContinuedFraction.from_rational(3, 7)
    assert cf.value() == Fraction(3, 7)


def test_inverse_dyadic_exact():
    assert qmark_inverse(0.0) == 0.0
    assert qmark_inverse(1.0) == 1.0
    assert qmark_inverse(0.5) == 0.5
    assert qmark_inverse(0.25) == 1 / 3
    assert qmark_inverse(0.75) == 2 / 3
    assert qmark_inverse(0.125) == 0.25


def test_inverse_round_trip():
    # Q is Holder with exponent ~0.72 at its steepest, so one ulp on the
    # preimage can move the image by ~3e-12; the bound reflects that.
    rng = random.Random(11)
    for _ in range(500):
        y = rng.random()
        x = qmark_inverse(y)
        assert abs(qmark_eval(Fraction(x)) - y) < 1e-10


def test_inverse_rejects_non_dyadic():
    with pytest.raises(ValueError):
        qmark_inverse(Fraction(1, 3))


def test_interval_measure_matches_endpoint_difference():
    rng = random.Random(13)
    for _ in range(500):
        a, b = sorted((rng.random(), rng.random()))
        m = interval_measure(a, b)
        d = qmark_eval(Fraction(b)) - qmark_eval(Fraction(a))
        assert abs(m - d) < 1e-15
    assert interval_measure(Fraction(1, 3), Fraction(2, 3)) == 0.5
    assert interval_measure(0.0, 1.0) == 1.0
    assert interval_measure(0.25, 0.25) == 0.0


def test_interval_measure_additive():
    rng = random.Random(17)
    for _ in range(200):
        a, c, b = sorted(rng.random() for _ in range(3))
        whole = interval_measure(a, b)
        parts = interval_measure(a, c) + interval_measure(c, b)
        assert abs(whole - parts) < 1e-15


def test_deep_interval_log2_against_asymptotic():
    # mu(B_eps(1/k)) ~ 2^(3-k-1/k) exp(-log2/(k^2 eps)) up to a bounded
    # oscillating factor; frozen reference ratios computed from the exact
    # split identity mu = (Q(w+) + Q(w-))/2 with 1/w_pm = 1/(k^2 eps) -+ 1/k.
    cases = [
        (4, 1e-3, 0.867174),
        (4, 1e-4, 0.891905),
        (4, 1e-5, 0.891905),
        (2, 1e-3, 1.060660),
        (2, 1e-6, 1.060660),
    ]
    for k, eps, ratio in cases:
        lg = interval_measure_log2(Fraction(1, k) - Fraction(eps), Fraction(1, k) + Fraction(eps))
        asy = ball_measure_asymptotic_log2(k, eps)
        assert 2.0 ** (lg - asy) == pytest.approx(ratio, abs=5e-5)


def test_log2_variants_consistent_with_plain():
    for x in (0.3, Fraction(2, 7), 0.9):
        assert qmark_eval_log2(x) == pytest.approx(math.log2(qmark_eval(x)), abs=1e-12)
    a, b = Fraction(1, 5), Fraction(2, 5)
    assert interval_measure_log2(a, b) == pytest.approx(
        math.log2(interval_measure(a, b)), abs=1e-12
    )
    assert interval_measure_log2(a, a) == -math.inf
    for k, eps in ((3, 1e-2), (5, 1e-3)):
        assert ball_measure_asymptotic_log2(k, eps) == pytest.approx(
            math.log2(ball_measure_asymptotic(k, eps)), abs=1e-9
        )
    assert small_x_asymptotic_log2(1e-2) == pytest.approx(
        math.log2(small_x_asymptotic(1e-2)), abs=1e-9
    )


def test_small_x_asymptotic_sharp():
    # Q(eps)/(2 exp(-log2/eps)) -> 1 when 1/eps is close to an integer
    for eps in (1e-2, 1e-3):
        r = 2.0 ** (qmark_eval_log2(Fraction(eps)) - small_x_asymptotic_log2(eps))
        assert r == pytest.approx(1.0, abs=1e-3)


def test_underflow_regime():
    # measure far below double range: plain value underflows to zero, the
    # log2 companion stays finite
    a = Fraction(1, 4) - Fraction(1, 100000)
    b = Fraction(1, 4) + Fraction(1, 100000)
    assert interval_measure(a, b) == 0.0
    lg = interval_measure_log2(a, b)
    assert math.isfinite(lg)
    assert lg == pytest.approx(ball_measure_asymptotic_log2(4, 1e-5) + math.log2(0.891906), abs=1e-3)


def test_input_validation():
    for bad in (-0.1, 1.1, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            qmark_eval(bad)
    with pytest.raises(TypeError):
        qmark_eval("0.5")
    with pytest.raises(ValueError):
        interval_measure(0.6, 0.4)
    with pytest.raises(ValueError):
        ball_measure_asymptotic(1, 1e-3)
    with pytest.raises(ValueError):
        ball_measure_asymptotic(3, 0.0)
    with pytest.raises(ValueError):
        small_x_asymptotic(-1e-3)
