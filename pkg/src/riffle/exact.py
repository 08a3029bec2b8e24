"""Exact post-shuffle deck distributions for small decks.

The law is built forward: start from the identity deck with probability
one and convolve K times with the one-step riffle kernel (cut into piles,
interleave uniformly).  Deck sizes up to 6 use exact rationals; 7 and 8
switch to extended-precision floats over the full permutation array;
anything larger is refused.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import TooLarge
from .processes import enumerate_step_laws
from .shuffling import _arrangements

__all__ = [
    "exact_shuffle_distribution",
    "exact_tv",
    "exact_tv_curve",
]

_FRACTION_MAX_N = 6
_FLOAT_MAX_N = 8


def _word_perm(word, piles) -> tuple:
    """Position map of one interleaving: entry pos is the old-deck index
    whose card lands at pos when word[pos] names the source pile."""
    starts = np.concatenate(([0], np.cumsum(piles[:-1])))
    taken = [0] * len(piles)
    out = []
    for l in word:
        out.append(int(starts[l]) + taken[l])
        taken[l] += 1
    return tuple(out)


def _step_kernel(law, N: int) -> list:
    """(probability, position map) pairs for one step's cut law."""
    fact_N = math.factorial(N)
    kernel = []
    for q_piles, piles in law:
        if q_piles == 0:
            continue
        denom = Fraction(
            fact_N, int(np.prod([math.factorial(n) for n in piles], dtype=object))
        )
        q_word = q_piles / denom
        for word in _arrangements(piles):
            kernel.append((q_word, _word_perm(word, piles)))
    return kernel


def _exact_fraction(process, N: int, K: int, snapshots: bool):
    laws = enumerate_step_laws(process, N, K) if K else []
    dist = {tuple(range(1, N + 1)): Fraction(1)}
    curve = [dist.copy()]
    for t in range(K):
        kernel = _step_kernel(laws[t], N)
        new: dict = {}
        for deck, w in dist.items():
            for q, pm in kernel:
                nd = tuple(deck[i] for i in pm)
                new[nd] = new.get(nd, Fraction(0)) + w * q
        dist = new
        if snapshots:
            curve.append(dist.copy())
    return (dist, curve) if snapshots else (dist, None)


def _lehmer_rank(rows: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each permutation row of 0..N-1."""
    n = rows.shape[1]
    fact = np.array([math.factorial(n - 1 - j) for j in range(n)], dtype=np.int64)
    rank = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(n):
        smaller = (rows[:, j + 1 :] < rows[:, j : j + 1]).sum(axis=1)
        rank += smaller * fact[j]
    return rank


def _exact_float(process, N: int, K: int, snapshots: bool):
    laws = enumerate_step_laws(process, N, K) if K else []
    perms = np.array(list(permutations(range(N))), dtype=np.int8)
    n_perm = perms.shape[0]
    dist = np.zeros(n_perm, dtype=np.longdouble)
    dist[0] = 1.0  # identity is the lexicographically first permutation
    curve = [dist.copy()]
    gather_cache: dict = {}
    for t in range(K):
        kernel = _step_kernel(laws[t], N)
        new = np.zeros_like(dist)
        for q, pm in kernel:
            idx = gather_cache.get(pm)
            if idx is None:
                idx = _lehmer_rank(perms[:, list(pm)])
                gather_cache[pm] = idx
            # row r of the new law collects mass from the deck that maps
            # to it; scatter from each old deck to its image instead
            qf = np.longdouble(q.numerator) / np.longdouble(q.denominator)
            np.add.at(new, idx, qf * dist)
        dist = new
        if snapshots:
            curve.append(dist.copy())
    return (dist, perms), (curve if snapshots else None)


def _float_dist_to_dict(dist: np.ndarray, perms: np.ndarray) -> dict:
    out = {}
    for row, p in zip(perms, dist):
        if p > 0:
            out[tuple(int(x) + 1 for x in row)] = float(p)
    return out


def exact_shuffle_distribution(process, N: int, K: int) -> dict:
    """Exact deck law after K steps as {deck tuple (cards 1..N): prob}.

    Probabilities are Fractions for N <= 6 and floats for N in {7, 8};
    raises TooLarge beyond that.
    """
    if N > _FLOAT_MAX_N:
        raise TooLarge(f"exact distribution supports N <= {_FLOAT_MAX_N}, got {N}")
    if N <= _FRACTION_MAX_N:
        dist, _ = _exact_fraction(process, N, K, snapshots=False)
        return dist
    (dist, perms), _ = _exact_float(process, N, K, snapshots=False)
    return _float_dist_to_dict(dist, perms)


def exact_tv(dist: dict, N: int):
    """Total variation distance between a deck law and the uniform law.

    Exact (Fraction) when the law's probabilities are Fractions.
    """
    fact_N = math.factorial(N)
    exact = all(isinstance(v, Fraction) for v in dist.values())
    if exact:
        u = Fraction(1, fact_N)
        acc = sum(abs(p - u) for p in dist.values())
        acc += (fact_N - len(dist)) * u
        return acc / 2
    u = 1.0 / fact_N
    acc = math.fsum(abs(float(p) - u) for p in dist.values())
    acc += (fact_N - len(dist)) * u
    return acc / 2.0


def exact_tv_curve(process, N: int, K_max: int) -> list:
    """Total variation to uniform after 0..K_max steps, computed exactly."""
    if N > _FLOAT_MAX_N:
        raise TooLarge(f"exact distribution supports N <= {_FLOAT_MAX_N}, got {N}")
    if N <= _FRACTION_MAX_N:
        _, curve = _exact_fraction(process, N, K_max, snapshots=True)
        return [exact_tv(d, N) for d in curve]
    (_, perms), curve = _exact_float(process, N, K_max, snapshots=True)
    return [exact_tv(_float_dist_to_dict(d, perms), N) for d in curve]
