from fractions import Fraction

import pytest

from riffle.errors import TooLarge
from riffle.exact import exact_shuffle_distribution, exact_tv, exact_tv_curve
from riffle.processes import ExplicitSequence, UniformCut, gsr


def test_single_cut_law_three_cards():
    dist = exact_shuffle_distribution(ExplicitSequence(((2, 1),)), 3, 1)
    third = Fraction(1, 3)
    assert dist == {
        (1, 2, 3): third,
        (1, 3, 2): third,
        (3, 1, 2): third,
    }


def test_tv_of_point_mass_and_single_cut():
    identity = {(1, 2, 3): Fraction(1)}
    assert exact_tv(identity, 3) == Fraction(5, 6)
    dist = exact_shuffle_distribution(ExplicitSequence(((2, 1),)), 3, 1)
    assert exact_tv(dist, 3) == Fraction(1, 2)


def test_gsr_five_cards_one_step():
    dist = exact_shuffle_distribution(gsr(), 5, 1)
    assert sum(dist.values()) == 1
    assert exact_tv(dist, 5) == Fraction(31, 40)


def test_zero_width_piles_do_not_change_the_law():
    wide = exact_shuffle_distribution(ExplicitSequence(((3, 0, 2),)), 5, 1)
    slim = exact_shuffle_distribution(ExplicitSequence(((3, 2),)), 5, 1)
    assert wide == slim


def test_zero_steps_is_the_identity_law():
    dist = exact_shuffle_distribution(gsr(), 4, 0)
    assert dist == {(1, 2, 3, 4): Fraction(1)}
    assert exact_tv(dist, 4) == Fraction(23, 24)


def test_float_route_agrees_with_fraction_route():
    # N = 6 runs on exact rationals; the float route is only used for
    # N in {7, 8}, so check it against rationals via a 6-card law
    # computed both ways is impossible; instead verify the 7-card law
    # is a probability vector and its TV matches a rational computation
    # for a deterministic cut where the support is small.
    dist = exact_shuffle_distribution(ExplicitSequence(((4, 3),)), 7, 1)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-15)
    assert len(dist) == 35  # C(7,3) interleavings
    # TV = 1/2 [ 35 (1/35 - 1/5040) + (5040-35)/5040 ]
    tv = Fraction(1, 2) * (
        35 * (Fraction(1, 35) - Fraction(1, 5040)) + Fraction(5005, 5040)
    )
    assert exact_tv(dist, 7) == pytest.approx(float(tv), abs=1e-12)


def test_too_large_is_refused():
    with pytest.raises(TooLarge):
        exact_shuffle_distribution(gsr(), 9, 1)
    with pytest.raises(TooLarge):
        exact_tv_curve(gsr(), 12, 3)


def test_tv_curve_is_monotone_for_gsr():
    curve = exact_tv_curve(gsr(), 5, 6)
    assert len(curve) == 7
    assert curve[0] == Fraction(119, 120)
    assert curve[1] == Fraction(31, 40)
    assert all(a >= b for a, b in zip(curve, curve[1:]))


def test_tv_curve_float_route_monotone():
    curve = exact_tv_curve(gsr(), 7, 4)
    assert all(float(a) >= float(b) - 1e-12 for a, b in zip(curve, curve[1:]))


def test_uniform_cut_curve():
    curve = exact_tv_curve(UniformCut(), 4, 5)
    assert curve[0] == Fraction(23, 24)
    assert all(a >= b for a, b in zip(curve, curve[1:]))
    assert curve[-1] < Fraction(1, 4)
