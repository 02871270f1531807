import math
from fractions import Fraction

import numpy as np
import pytest

from fractalevt.cantor import CANTOR_CODIMENSION, gap_order_batch
from fractalevt.intensity import (
    Bounded,
    DegenerateThresholdError,
    DoubleExp,
    Exponential,
    HarmonicClosure,
    Ladder,
    LadderDiscrete,
    Linear,
    LogDistance,
    PowerLaw,
    Singleton,
    TernaryCantor,
    base_levels,
    distance_to_target,
    distance_to_target_batch,
    evaluate,
    evaluate_batch,
    tail_classification,
    threshold_schedule,
)


def test_distance_to_target_spots():
    assert distance_to_target(0.3, Singleton(4)) == pytest.approx(0.05)
    assert distance_to_target(0.25, Singleton(4)) == 0.0
    assert distance_to_target(0.3, HarmonicClosure()) == pytest.approx(1 / 30)
    assert distance_to_target(0.5, TernaryCantor()) == pytest.approx(1 / 6)
    assert distance_to_target(0.0, HarmonicClosure()) == 0.0
    assert distance_to_target(1.0, HarmonicClosure()) == 0.0
    with pytest.raises(ValueError):
        distance_to_target(1.5, Singleton(2))


def test_harmonic_distance_brute_force():
    # oracle: nearest reciprocal by exhaustive search over k <= 2e6
    ks = np.arange(1, 2_000_001, dtype=float)
    rng = np.random.default_rng(7)
    xs = [1e-6] + list(10.0 ** rng.uniform(-6, -0.1, size=40))
    for x in xs:
        brute = min(x, np.min(np.abs(x - 1.0 / ks)))
        assert distance_to_target(x, HarmonicClosure()) == pytest.approx(
            brute, rel=1e-12, abs=0.0
        )


def test_distance_batch_matches_scalar():
    rng = np.random.default_rng(11)
    xs = rng.random(1000)
    for target in (TernaryCantor(), Singleton(3), HarmonicClosure()):
        got = distance_to_target_batch(xs, target)
        want = np.array([distance_to_target(x, target) for x in xs])
        np.testing.assert_allclose(got, want, rtol=1e-12)


def test_evaluate_spots():
    assert evaluate(Ladder(Linear()), 0.5) == 1.0
    # 0.15 sits in a second-level gap
    assert evaluate(Ladder(Exponential(beta=2.0)), 0.15) == pytest.approx(math.e)
    got = evaluate(LogDistance(TernaryCantor(), Linear()), 0.5)
    assert got == pytest.approx(math.log(6))
    got = evaluate(LogDistance(Singleton(4), Linear()), 0.3)
    assert got == pytest.approx(-math.log(0.05))


def test_evaluate_on_target():
    quarter = Fraction(1, 4)  # a Cantor point that is not a gap endpoint
    assert evaluate(Ladder(Linear()), quarter) == math.inf
    assert evaluate(Ladder(Exponential()), quarter) == math.inf
    # the bounded form reaches its essential sup instead of overflowing
    assert evaluate(Ladder(Bounded(D=2.5)), quarter) == 2.5
    assert evaluate(LogDistance(Singleton(2), Bounded()), 0.5) == 1.0
    s = base_levels(Ladder(Linear()), np.array([0.25, 0.5]))
    assert s[0] == math.inf and s[1] == 1.0


def test_evaluate_batch_matches_scalar():
    rng = np.random.default_rng(3)
    xs = rng.random(300)
    specs = [
        Ladder(Exponential(beta=1.5)),
        LogDistance(TernaryCantor(), Linear()),
        LogDistance(HarmonicClosure(), Bounded(D=1.0, gamma=1.0)),
    ]
    for spec in specs:
        got = evaluate_batch(spec, xs)
        want = np.array([evaluate(spec, x) for x in xs])
        np.testing.assert_allclose(got, want, rtol=1e-12)


def test_forms_monotone():
    s = np.array([0.0, 0.5, 1.0, 3.0, 10.0, 100.0])
    for form in (Linear(), Exponential(beta=1.5), Bounded(D=2.0, gamma=0.7)):
        y = form.apply_batch(s)
        assert np.all(np.diff(y) > 0)
    s_inf = np.append(s, np.inf)
    y = Bounded(D=2.0).apply_batch(s_inf)
    assert np.all(y <= 2.0) and y[-1] == 2.0
    # strictly below D only while exp(-s/gamma) clears double resolution
    assert np.all(y[s_inf <= 30.0] < 2.0)


def test_level_set_measure():
    # fraction of uniform points strictly deeper than level m is (2/3)^m
    rng = np.random.default_rng(101)
    xs = rng.random(1_000_000)
    m = gap_order_batch(xs)
    exceed = np.where(m > 0, m, np.iinfo(np.int64).max)
    for level in range(1, 9):
        p = (2 / 3) ** level
        se = math.sqrt(p * (1 - p) / xs.size)
        got = np.mean(exceed > level)
        assert abs(got - p) <= 3 * se
    # link to the metric picture: d(x, K) is at most half the gap width
    d = distance_to_target_batch(xs, TernaryCantor())
    fin = m > 0
    assert np.all(d[fin] <= 3.0 ** -m[fin].astype(float) / 2)
    assert np.all(d[fin] > 0)


def test_ladder_schedule_inverts_realized_tau():
    reg = LadderDiscrete(delta=1 / 3)
    assert reg.decay_rate == pytest.approx(math.log(1.5))
    for n in (100, 1000, 10000):
        for m in range(1, 13):
            assert reg.threshold(n, reg.tau(n, m)) == m
    assert reg.tau(1000, 0) == 1000.0
    # nearest-integer rounding of the continuous inversion
    assert reg.threshold(1000, 1.0) == 17
    assert math.log(1000) / math.log(1.5) == pytest.approx(17.04, abs=0.01)


def test_power_law_schedule():
    reg = PowerLaw(d_M=CANTOR_CODIMENSION, A=2.5)
    h = threshold_schedule(reg, 1000, 1.0)
    assert h == pytest.approx(math.log(2500) / CANTOR_CODIMENSION)
    assert reg.tau(1000, h) == pytest.approx(1.0, rel=1e-13)


def test_double_exp_schedule():
    # singleton at 1/4: amplitude 2^(3-k-1/k), decay log2/k^2, q = 1
    reg = DoubleExp(B=2.0 ** (-5 / 4), D=math.log(2) / 16, q=1.0)
    h = reg.threshold(10**6, 1.0)
    inner = math.log(10**6 * reg.B)
    # positive level: the sign follows from tau(n, threshold(n, t)) == t
    assert h == pytest.approx(math.log(inner / reg.D))
    assert h > 0
    assert reg.tau(10**6, h) == pytest.approx(1.0, rel=1e-12)


def test_schedule_round_trip():
    rng = np.random.default_rng(19)
    for _ in range(50):
        n = int(rng.integers(10, 10**7))
        tau = float(10.0 ** rng.uniform(-2, 0.4))
        pl = PowerLaw(d_M=float(rng.uniform(0.1, 1.0)), A=float(rng.uniform(0.2, 5.0)))
        assert pl.tau(n, pl.threshold(n, tau)) == pytest.approx(tau, rel=1e-12)
        de = DoubleExp(
            B=float(rng.uniform(0.2, 2.0)),
            D=float(rng.uniform(0.01, 1.0)),
            q=float(rng.uniform(0.2, 2.0)),
        )
        if n * de.B / tau > 1.0:
            assert de.tau(n, de.threshold(n, tau)) == pytest.approx(tau, rel=1e-12)


def test_degenerate_threshold():
    reg = DoubleExp(B=1.0, D=1.0, q=1.0)
    with pytest.raises(DegenerateThresholdError, match="degenerate threshold"):
        reg.threshold(10, 10.0)
    with pytest.raises(DegenerateThresholdError):
        reg.threshold(10, 25.0)
    reg.threshold(10, 9.0)  # inner log barely positive


def test_gumbel_y_is_minus_log_tau():
    regimes = [
        LadderDiscrete(delta=1 / 3),
        PowerLaw(d_M=0.369, A=2.5),
        DoubleExp(B=0.42, D=0.043, q=1.0),
    ]
    for reg in regimes:
        levels = [1, 5, 9]
        for n in (100, 10000):
            for lv in levels:
                assert reg.gumbel_y(lv, n) == pytest.approx(
                    -math.log(reg.tau(n, lv)), rel=1e-12
                )


def test_tail_classification():
    a = math.log(1.5)
    fam, idx = tail_classification(Exponential(beta=1.5), a)
    assert fam == "frechet" and idx == pytest.approx(1.5 * a)
    fam, idx = tail_classification(Bounded(D=1.0, gamma=1.0), a)
    assert fam == "weibull" and idx == pytest.approx(a)
    assert tail_classification(Linear(), a) == ("gumbel", None)


def test_parameter_validation():
    for bad in (
        lambda: Singleton(1),
        lambda: Exponential(beta=0.0),
        lambda: Bounded(D=-1.0),
        lambda: Bounded(gamma=0.0),
        lambda: LadderDiscrete(delta=0.5),
        lambda: LadderDiscrete(delta=0.0),
        lambda: PowerLaw(d_M=-0.3, A=1.0),
        lambda: DoubleExp(B=1.0, D=0.0, q=1.0),
    ):
        with pytest.raises(ValueError):
            bad()
    with pytest.raises(ValueError):
        LadderDiscrete().threshold(100, 0.0)
