from itertools import permutations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from riffle.permstats import (
    ascent_positions,
    count_ascents,
    inverse_deck,
    longest_increasing_run,
    rising_sequences,
)


def test_rising_sequences_examples():
    assert rising_sequences((1, 4, 2, 5, 3)) == 2
    assert rising_sequences(range(1, 11)) == 1
    assert rising_sequences((5, 4, 3, 2, 1)) == 5
    assert rising_sequences((3, 1, 4, 2)) == 2
    assert rising_sequences((1,)) == 1


def test_ascent_positions_and_count():
    deck = np.array([2, 1, 3, 5, 4])
    assert list(ascent_positions(deck)) == [False, True, True, False]
    assert count_ascents(deck) == 2
    assert count_ascents(deck, positions=np.array([1, 2])) == 1
    assert count_ascents(np.arange(1, 8)) == 6
    assert count_ascents(np.arange(7, 0, -1)) == 0


def test_longest_increasing_run():
    assert longest_increasing_run((1, 2, 3, 4, 5)) == 5
    assert longest_increasing_run((5, 4, 3, 2, 1)) == 1
    assert longest_increasing_run((2, 3, 1, 4, 5, 6)) == 4
    assert longest_increasing_run((1,)) == 1


def test_inverse_deck_examples():
    assert list(inverse_deck(np.array([3, 1, 2]))) == [2, 3, 1]
    assert list(inverse_deck(np.arange(1, 6))) == list(range(1, 6))


@given(deck=st.permutations(list(range(1, 10))))
@settings(max_examples=60, deadline=None)
def test_inverse_deck_is_an_involution(deck):
    d = np.array(deck)
    assert np.array_equal(inverse_deck(inverse_deck(d)), d)
    # Defining property: card at position i has rank i in the inverse.
    inv = inverse_deck(d)
    for pos, card in enumerate(d, 1):
        assert inv[card - 1] == pos


@given(deck=st.permutations(list(range(1, 9))))
@settings(max_examples=40, deadline=None)
def test_rising_sequences_vs_inverse_descents(deck):
    # Rising sequences of a deck = descents of its inverse + 1.
    d = np.array(deck)
    inv = inverse_deck(d)
    descents = sum(int(a > b) for a, b in zip(inv, inv[1:]))
    assert rising_sequences(d) == descents + 1


def test_ascent_count_distribution_is_eulerian():
    # Over all 24 decks of 4 cards the ascent counts follow (1,11,11,1).
    hist = {}
    for p in permutations(range(1, 5)):
        a = count_ascents(np.array(p))
        hist[a] = hist.get(a, 0) + 1
    assert hist == {0: 1, 1: 11, 2: 11, 3: 1}
