import math
import warnings

import numpy as np
import pytest

from fractalevt.cantor import lebesgue_neighborhood_exact
from fractalevt.evt import BlockMaximaConfig, block_maxima
from fractalevt.intensity import (
    HarmonicClosure,
    Linear,
    LogDistance,
    Singleton,
    TernaryCantor,
)
from fractalevt.maps import Tent
from fractalevt.minkowski import (
    Exact,
    ExactQmark,
    Lebesgue,
    MonteCarlo,
    NeighborhoodCurve,
    Qmark,
    fit_nonstandard,
    fit_standard,
    harmonic_series_asymptotic,
    harmonic_series_measure,
    neighborhood_curve,
    saddle_exponent_coefficient,
    saddle_point_constants,
)
from fractalevt.qmark import (
    LOG2,
    ball_measure_asymptotic_log2,
    interval_measure,
    interval_measure_log2,
)

DM_CANTOR = 1.0 - math.log(2.0) / math.log(3.0)


def test_exact_lebesgue_closed_form():
    eps = 3.0**-4 / 2.0
    c = neighborhood_curve(TernaryCantor(), Lebesgue(), [eps], Exact())
    assert c.mu_hat[0] == pytest.approx(2.0 * (2.0 / 3.0) ** 4 - 3.0**-4, rel=1e-14)
    assert np.all(c.stderr == 0)


def test_singleton_exact_and_ratio_band():
    c = neighborhood_curve(Singleton(4), Qmark(), [1e-3], Exact())
    assert c.mu_hat[0] == pytest.approx(
        interval_measure(0.25 - 1e-3, 0.25 + 1e-3), rel=1e-14
    )
    assert isinstance(c.source, ExactQmark)
    ref = 2.0**-1.25 * math.exp(-LOG2 / (16.0 * 1e-3))
    assert 0.8 < c.mu_hat[0] / ref < 1.25


def test_singleton_ratio_tightens():
    # the measure underflows a double below eps ~ 1e-4, so compare in log2
    devs = []
    for eps in (1e-3, 1e-4, 1e-5):
        lg = interval_measure_log2(0.25 - eps, 0.25 + eps)
        ref = ball_measure_asymptotic_log2(4, eps)
        devs.append(abs(2.0 ** (lg - ref) - 1.0))
    assert devs[1] <= devs[0] + 1e-12
    assert devs[2] <= devs[1] + 1e-12


def test_monte_carlo_matches_exact_lebesgue():
    eps = 3.0 ** -(2.1 + np.arange(0, 65, 4) / 8.0)[::-1]
    mc = neighborhood_curve(TernaryCantor(), Lebesgue(), eps, MonteCarlo(200000, 5))
    ex = neighborhood_curve(TernaryCantor(), Lebesgue(), eps, Exact())
    z = (mc.mu_hat - ex.mu_hat) / np.maximum(mc.stderr, 1e-12)
    assert np.abs(z).max() < 3.0


def test_exact_qmark_cantor_gap_sum():
    c = neighborhood_curve(TernaryCantor(), Qmark(), [3.0**-10, 0.25], Exact())
    assert c.mu_hat[0] == pytest.approx(1.777070e-2, rel=1e-5)
    # at eps = 1/4 no gap is wider than 2 eps, so the neighborhood is full
    assert c.mu_hat[1] == 1.0
    assert isinstance(c.source, ExactQmark)


def test_monte_carlo_qmark_matches_gap_sum_value():
    # reference: exact gap-sum of the question-mark measure at eps = 3^-10
    ref = 1.777070e-2
    c = neighborhood_curve(TernaryCantor(), Qmark(), [3.0**-10], MonteCarlo(200000, 5))
    se = math.sqrt(ref * (1.0 - ref) / 200000)
    assert abs(c.mu_hat[0] - ref) < 3 * se


def test_monte_carlo_worker_determinism():
    eps = np.geomspace(1e-4, 1e-1, 7)
    a = neighborhood_curve(TernaryCantor(), Qmark(), eps, MonteCarlo(30000, 9))
    b = neighborhood_curve(
        TernaryCantor(), Qmark(), eps, MonteCarlo(30000, 9), workers=3
    )
    assert np.array_equal(a.mu_hat, b.mu_hat)


def test_curve_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        neighborhood_curve(TernaryCantor(), Lebesgue(), [1e-2, 1e-3], Exact())
    with pytest.raises(ValueError, match="no exact path"):
        neighborhood_curve(Singleton(4), Lebesgue(), [1e-3], Exact())
    with pytest.raises(ValueError, match="samples"):
        MonteCarlo(999)
    with pytest.raises(AssertionError, match="non-decreasing"):
        NeighborhoodCurve(
            np.array([1e-3, 1e-2]),
            np.array([0.5, 0.4]),
            np.zeros(2),
            ExactQmark(),
            None,
            None,
        )
    with pytest.raises(AssertionError, match="0, 1"):
        NeighborhoodCurve(
            np.array([1e-3, 1e-2]),
            np.array([0.5, 1.4]),
            np.zeros(2),
            ExactQmark(),
            None,
            None,
        )


def synthetic_power_curve(a, d, lo=1e-6, hi=1e-2, n=40):
    eps = np.geomspace(lo, hi, n)
    return NeighborhoodCurve(
        eps, np.minimum(a * eps**d, 1.0), np.zeros(n), ExactQmark(), None, None
    )


def test_fit_standard_power_law_roundtrip():
    f = fit_standard(synthetic_power_curve(1.7, 0.42))
    assert f.d_M == pytest.approx(0.42, abs=1e-6)
    assert f.content == pytest.approx(1.7, rel=1e-6)
    assert f.residual_band < 1e-9


def test_fit_standard_span_guard():
    with pytest.raises(RuntimeError, match="insufficient span"):
        fit_standard(synthetic_power_curve(1.0, 0.4, lo=1e-4, hi=1e-2))


def test_fit_standard_exact_cantor():
    eps = 3.0 ** -(5.0 + np.arange(65) / 8.0)[::-1]
    c = neighborhood_curve(TernaryCantor(), Lebesgue(), eps, Exact())
    f = fit_standard(c)
    assert abs(f.d_M - DM_CANTOR) < 0.005
    assert abs(f.content - 2.5) / 2.5 < 0.05
    assert f.residual_band < 0.2


def test_fit_nonstandard_roundtrip():
    eps = np.geomspace(3e-3, 3e-1, 30)
    mu = 3.2 * np.exp(-0.7 * eps**-0.45)
    c = NeighborhoodCurve(eps, mu, np.zeros(30), ExactQmark(), None, None)
    f = fit_nonstandard(c)
    assert f.B == pytest.approx(3.2, rel=1e-6)
    assert f.D == pytest.approx(0.7, rel=1e-6)
    assert f.q == pytest.approx(0.45, rel=1e-6)


def test_fit_nonstandard_singleton():
    eps = np.geomspace(1e-5, 1e-3, 25)
    c = neighborhood_curve(Singleton(4), Qmark(), eps, Exact())
    # the smallest-eps points underflow a double and are dropped
    with pytest.warns(UserWarning, match="excluded"):
        f = fit_nonstandard(c)
    assert f.D == pytest.approx(LOG2 / 16.0, rel=5e-3)
    assert f.q == pytest.approx(1.0, rel=1e-3)
    # B absorbs the asymptotic overshoot plateau; it cannot reach the
    # closed-form prefactor 2^-1.25 from this window
    assert 0.80 * 2.0**-1.25 < f.B < 0.88 * 2.0**-1.25


def test_fit_nonstandard_errors():
    eps = np.geomspace(1e-3, 1e-1, 6)
    mu = np.array([0.0, 0.0, 0.0, 0.1, 0.2, 0.3])
    c = NeighborhoodCurve(eps, mu, np.zeros(6), ExactQmark(), None, None)
    with pytest.warns(UserWarning, match="excluded"):
        with pytest.raises(RuntimeError, match="nonlinear fit diverged"):
            fit_nonstandard(c)


def test_harmonic_exact_vs_asymptotic():
    ex = harmonic_series_measure(1e-3)
    asym = harmonic_series_asymptotic(1e-3)
    assert ex == pytest.approx(7.923832e-5, rel=1e-5)
    assert asym == pytest.approx(9.875942e-5, rel=1e-5)
    assert abs(ex - asym) / asym < 0.20
    assert 1.15 < asym / ex < 1.28


def test_harmonic_overlap_floor():
    assert harmonic_series_measure(1.0 / 12.0) >= 0.5


def test_harmonic_monotone_and_bounded():
    vals = [harmonic_series_measure(e) for e in (1e-4, 1e-3, 1e-2, 0.1)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(0 < v <= 1 for v in vals)


def test_harmonic_validation():
    with pytest.raises(ValueError, match="eps"):
        harmonic_series_measure(0.2)
    with pytest.raises(ValueError, match="eps"):
        harmonic_series_measure(0.0)
    with pytest.raises(ValueError, match="eps"):
        harmonic_series_asymptotic(-1e-3)


def test_harmonic_curve_fit():
    eps = np.geomspace(1e-5, 1e-3, 25)
    c = neighborhood_curve(HarmonicClosure(), Qmark(), eps, Exact())
    f = fit_nonstandard(c)
    assert abs(f.q - 1.0 / 3.0) / (1.0 / 3.0) < 0.10
    assert abs(f.D - 1.26) / 1.26 < 0.15


def test_saddle_point_constants():
    d_theory, b_numeric = saddle_point_constants()
    assert d_theory == pytest.approx(3.0 * LOG2 * 2.0 ** (-2.0 / 3.0), rel=1e-15)
    assert b_numeric > 0
    assert abs(1.26 - d_theory) / d_theory < 0.10
    coeffs = [saddle_exponent_coefficient(e) for e in np.geomspace(1e-6, 1e-3, 13)]
    assert (max(coeffs) - min(coeffs)) / min(coeffs) < 0.02


def test_exceedance_bridge_to_block_engine():
    # mu(N_{e^-h}(K)) equals the one-step exceedance fraction of the
    # log-distance observable under the matching invariant measure
    cfg = BlockMaximaConfig(
        Tent(0.45),
        LogDistance(TernaryCantor(), Linear()),
        (1,),
        20000,
        3,
        (1.0, 2.0, 3.0),
    )
    bm = block_maxima(cfg)
    for h in cfg.level_grid:
        exceed = np.mean(bm.base_maxima[1] > h)
        ref = lebesgue_neighborhood_exact(math.exp(-h))
        se = math.sqrt(ref * (1.0 - ref) / cfg.samples)
        assert abs(exceed - ref) <= 3 * se
