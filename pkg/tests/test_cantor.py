"""Tests for Cantor set geometry: gap order, distance, neighborhood measure."""

import math
from fractions import Fraction

import numpy as np
import pytest

from fractalevt.cantor import (
    CANTOR_CODIMENSION,
    CANTOR_DIMENSION,
    distance_to_cantor,
    gap_count,
    gap_order,
    gap_order_batch,
    lebesgue_neighborhood_exact,
    locate_gap,
    mean_log_distance_on_gap,
    prefractal_measure,
)


def _gap_list(depth):
    out = []

    def rec(a, b, d):
        third = (b - a) / 3
        out.append((a + third, b - third))
        if d > 1:
            rec(a, a + third, d - 1)
            rec(b - third, b, d - 1)

    rec(Fraction(0), Fraction(1), depth)
    return out


def test_gap_order_spot_values():
    assert gap_order(0.5) == 1
    assert gap_order(0.4) == 1
    assert gap_order(0.15) == 2
    assert gap_order(Fraction(4, 9)) == 1
    assert gap_order(Fraction(1, 2)) == 1
    # members of K, including gap endpoints and the dyadic member 1/4
    for member in (0.0, 1.0, 0.25, 0.75, Fraction(1, 3), Fraction(2, 3), Fraction(1, 9)):
        assert gap_order(member) == 0


def test_gap_order_validation():
    with pytest.raises(ValueError):
        gap_order(-0.1)
    with pytest.raises(ValueError):
        gap_order(1.5)
    with pytest.raises(ValueError):
        gap_order(float("nan"))
    with pytest.raises(TypeError):
        gap_order("0.5")


def test_locate_gap():
    g = locate_gap(0.5)
    assert (g.order, g.left, g.right) == (1, Fraction(1, 3), Fraction(2, 3))
    g = locate_gap(0.15)
    assert (g.order, g.left, g.length) == (2, Fraction(1, 9), Fraction(1, 9))
    g = locate_gap(0.8)
    assert (g.order, g.left) == (2, Fraction(7, 9))
    g = locate_gap(Fraction(7, 27) + Fraction(1, 100))
    assert g.order == 3 and g.length == Fraction(1, 27)
    with pytest.raises(ValueError):
        locate_gap(0.25)


def test_self_similarity():
    # scaling into the left third shifts every gap one level deeper
    rng = np.random.default_rng(5)
    for x in rng.random(50):
        f = Fraction(float(x))
        mo = gap_order(f)
        if mo:
            assert gap_order(f / 3) == mo + 1


def test_distance_bounded_by_half_gap():
    rng = np.random.default_rng(23)
    xs = rng.random(2000)
    d = distance_to_cantor(xs)
    m = gap_order_batch(xs)
    for i in range(len(xs)):
        if m[i]:
            assert 0 < d[i] <= 3.0 ** -m[i] / 2


def test_batch_matches_scalar():
    rng = np.random.default_rng(42)
    xs = rng.random(5000)
    mb = gap_order_batch(xs)
    for i in range(0, len(xs), 37):
        assert mb[i] == gap_order(float(xs[i]))


def test_gap_order_is_geometric():
    # P(m > j) = (2/3)^j under the uniform measure
    rng = np.random.default_rng(7)
    xs = rng.random(100000)
    mb = gap_order_batch(xs)
    for j in range(1, 9):
        ref = prefractal_measure(j)
        frac = np.mean(mb > j)
        sig = math.sqrt(ref * (1 - ref) / len(xs))
        assert abs(frac - ref) < 5 * sig


def test_distance_against_endpoint_oracle():
    # the nearest Cantor point to x is an endpoint of the gap containing x
    K = sorted(set([Fraction(0), Fraction(1)] + [e for g in _gap_list(12) for e in g]))
    K_arr = np.array([float(p) for p in K])
    rng = np.random.default_rng(3)
    xs = rng.random(800)
    d = distance_to_cantor(xs)
    brute = np.min(np.abs(xs[:, None] - K_arr[None, :]), axis=1)
    shallow = gap_order_batch(xs) <= 12
    assert np.all(np.abs(d - brute)[shallow] < 1e-14)


def test_distance_deep_gap_relative_precision():
    # 1/4 is in K; a tiny dyadic offset lands in a gap of order ~ log3(1/offset)
    x = 0.25 + 2.0**-40
    m = gap_order(x)
    assert 20 <= m <= 30
    ds = distance_to_cantor(x)
    db = distance_to_cantor(np.array([x]))[0]
    assert 0 < ds <= 2.0**-40
    assert abs(ds - db) < 1e-12 * ds


def test_distance_members_zero():
    assert distance_to_cantor(0.25) == 0.0
    assert distance_to_cantor(Fraction(1, 3)) == 0.0
    out = distance_to_cantor(np.array([0.0, 1.0, 0.25, 0.75]))
    assert out.tolist() == [0.0, 0.0, 0.0, 0.0]


def test_mean_log_distance_on_gap():
    # closed form log(l) - log 2 - 1 against Monte Carlo on the central gap
    rng = np.random.default_rng(11)
    xs = (1 + rng.random(100000)) / 3
    got = np.mean(np.log(distance_to_cantor(xs)))
    assert got == pytest.approx(mean_log_distance_on_gap(1 / 3), abs=0.02)
    assert mean_log_distance_on_gap(locate_gap(0.5)) == pytest.approx(
        math.log(1 / 3) - math.log(2) - 1
    )
    with pytest.raises(ValueError):
        mean_log_distance_on_gap(0.0)


def test_lebesgue_neighborhood_exact_values():
    # eps = 1/18: only the central gap keeps an uncovered middle of 2/9
    assert lebesgue_neighborhood_exact(1 / 18) == pytest.approx(7 / 9, abs=1e-15)
    assert lebesgue_neighborhood_exact(0.2) == 1.0
    assert lebesgue_neighborhood_exact(0.5) == 1.0
    with pytest.raises(ValueError):
        lebesgue_neighborhood_exact(0.0)


def test_lebesgue_neighborhood_monte_carlo():
    rng = np.random.default_rng(19)
    xs = rng.random(200000)
    d = distance_to_cantor(xs)
    for eps in (1e-2, 1e-3):
        ref = lebesgue_neighborhood_exact(eps)
        frac = np.mean(d <= eps)
        sig = math.sqrt(ref * (1 - ref) / len(xs))
        assert abs(frac - ref) < 5 * sig


def test_neighborhood_oscillates_about_power_law():
    ratios = np.array(
        [
            lebesgue_neighborhood_exact(10 ** (-1 - j / 10)) / (10 ** (-1 - j / 10)) ** CANTOR_CODIMENSION
            for j in range(40)
        ]
    )
    assert 1.9 < ratios.min() < ratios.max() < 2.7


def test_counts_and_measures():
    assert [gap_count(m) for m in (1, 2, 3, 4)] == [1, 2, 4, 8]
    assert prefractal_measure(0) == 1.0
    assert prefractal_measure(2) == pytest.approx(4 / 9)
    with pytest.raises(ValueError):
        gap_count(0)
    with pytest.raises(ValueError):
        prefractal_measure(-1)
    assert CANTOR_DIMENSION == pytest.approx(0.6309297535714574)
    assert CANTOR_CODIMENSION == pytest.approx(0.3690702464285426)
