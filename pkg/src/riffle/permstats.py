"""Deck statistics: rising sequences, ascents, increasing runs."""

from __future__ import annotations

import numpy as np

__all__ = [
    "rising_sequences",
    "ascent_positions",
    "count_ascents",
    "longest_increasing_run",
    "inverse_deck",
]


def inverse_deck(deck) -> np.ndarray:
    """Inverse permutation: entry v-1 holds the 1-based position of card v.
    For a shuffled deck this is the listing of positions in card order,
    i.e. the sorted-by-trajectory word the shuffle engine sorts into."""
    deck = np.asarray(deck, dtype=np.int64)
    inv = np.empty(deck.size, dtype=np.int64)
    inv[deck - 1] = np.arange(1, deck.size + 1, dtype=np.int64)
    return inv


def rising_sequences(deck) -> int:
    """Number of rising sequences: maximal chains of consecutive card
    values appearing left to right.  The identity has 1; a deck produced
    by a single k-pile riffle has at most k."""
    deck = np.asarray(deck, dtype=np.int64)
    N = deck.size
    if N == 0:
        return 0
    pos = np.empty(N + 1, dtype=np.int64)
    pos[deck] = np.arange(N)
    return 1 + int(np.sum(pos[2:] < pos[1:-1]))


def ascent_positions(deck) -> np.ndarray:
    """Boolean mask over positions 1..N-1 (0-based index i) marking
    deck[i] < deck[i+1]."""
    deck = np.asarray(deck)
    return deck[:-1] < deck[1:]


def count_ascents(deck, positions=None) -> int:
    """Number of ascents, optionally restricted to a subset of 1-based
    positions i (counting the pair (i, i+1))."""
    mask = ascent_positions(deck)
    if positions is None:
        return int(mask.sum())
    idx = np.asarray(positions, dtype=np.int64) - 1
    return int(mask[idx].sum())


def longest_increasing_run(deck) -> int:
    """Length of the longest contiguous strictly increasing stretch."""
    deck = np.asarray(deck)
    if deck.size == 0:
        return 0
    asc = ascent_positions(deck)
    if not asc.any():
        return 1
    padded = np.concatenate(([0], asc.astype(np.int8), [0]))
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return int((ends - starts).max()) + 1
