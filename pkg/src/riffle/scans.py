"""Monte Carlo scans: total-variation lower bounds, shared-edge first
moments, cutoff profiles, sparsity frequencies, and cold-spot test rates.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import spearmanr

from .coldspot import ColdSpotSet, TestReport, cold_spot_test
from .errors import InvalidParams
from .measures import sample_point
from .permstats import inverse_deck, longest_increasing_run, rising_sequences
from .processes import (
    IIDFromMeasure,
    IIDMultinomial,
    UniformCut,
    cut_sizes,
    pile_sequence,
)
from .shuffling import (
    ShuffleGraph,
    deck_from_blocks,
    is_L_sparse,
    sample_inverse_shuffled_perm,
    shared_edges,
)

__all__ = [
    "wilson_interval",
    "sample_shuffle_blocks",
    "sample_shuffled_deck",
    "tv_lower_bound_mc",
    "first_moment_scan",
    "sparsity_scan",
    "cold_spot_calibration",
    "cold_spot_power",
    "cutoff_scan",
]

_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


def wilson_interval(hits: int, n: int, z: float = _Z99):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _split_probs(process, rng):
    """Per-step digit distribution for exchangeable-column processes."""
    if isinstance(process, IIDMultinomial):
        return np.asarray(process.p, dtype=float)
    if isinstance(process, UniformCut):
        q = rng.random()
        return np.array([q, 1.0 - q])
    if isinstance(process, IIDFromMeasure) and process.rounding == "multinomial":
        return sample_point(process.mu, rng)
    return None


def sample_shuffle_blocks(process, N: int, K: int, rng: np.random.Generator):
    """Equal-row graph of a K-step trajectory, sampled without building
    the N x K label matrix.

    Works for processes whose columns are exchangeable with conditional-
    IID digits.  Card groups sharing a label prefix are split level by
    level with vectorized binomials (a multinomial as a binomial chain);
    groups reduced to one card can never merge again and are retired.
    Returns the ShuffleGraph.
    """
    k = int(process.k)
    starts = np.array([0], dtype=np.int64)
    sizes = np.array([N], dtype=np.int64)
    mask = np.zeros(max(N - 1, 0), dtype=bool)
    for _ in range(K):
        if sizes.size == 0:
            break
        p = _split_probs(process, rng)
        if p is None:
            raise InvalidParams(
                f"{type(process).__name__} has no exchangeable-column form"
            )
        new_starts = []
        new_sizes = []
        remaining = sizes.copy()
        offset = starts.copy()
        tail_mass = 1.0
        for l in range(k - 1):
            frac = 0.0 if tail_mass <= 0 else min(1.0, p[l] / tail_mass)
            b = rng.binomial(remaining, frac)
            new_starts.append(offset.copy())
            new_sizes.append(b)
            offset = offset + b
            remaining = remaining - b
            tail_mass -= p[l]
        new_starts.append(offset)
        new_sizes.append(remaining)
        starts = np.concatenate(new_starts)
        sizes = np.concatenate(new_sizes)
        keep = sizes >= 2
        starts, sizes = starts[keep], sizes[keep]
    for s, z in zip(starts, sizes):
        mask[s : s + z - 1] = True
    return ShuffleGraph(N, mask)


def _exchangeable_columns(process) -> bool:
    return isinstance(process, (IIDMultinomial, UniformCut)) or (
        isinstance(process, IIDFromMeasure) and process.rounding == "multinomial"
    )


def sample_shuffled_deck(process, N: int, K: int, rng: np.random.Generator):
    """Deck after K shuffles; takes the block sampler when the process
    admits it, else the full trajectory sort."""
    if _exchangeable_columns(process):
        G = sample_shuffle_blocks(process, N, K, rng)
        return deck_from_blocks(G.component_sizes(), rng)
    return sample_inverse_shuffled_perm(process, N, K, rng)


def _longest_run_of_listing(deck):
    """Longest increasing contiguous run of the inverse permutation.

    Cards that shared every pile are consecutive in the sorted listing and
    ascend there, so an under-shuffled deck leaves a long run in its
    inverse; equivalently, a long chain of consecutive card values appears
    left to right in the deck itself.  Uniform decks have uniform inverses,
    so the null calibration is unchanged.
    """
    return longest_increasing_run(inverse_deck(deck))


_STATISTICS = {
    "rising_sequences": rising_sequences,
    "longest_run": _longest_run_of_listing,
}


def _stat_values(name, process, N, K, samples, rng, uniform=False):
    fn = _STATISTICS[name]
    out = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        deck = (
            rng.permutation(N) + 1
            if uniform
            else sample_shuffled_deck(process, N, K, rng)
        )
        out[i] = fn(deck)
    return out


def _best_event(sh, un, thresholds):
    """Pick (threshold, direction) maximizing the one-sided gap
    P_shuffle(event) - P_uniform(event)."""
    best = (0.0, None, None)
    for c in thresholds:
        for direction in (">=", "<="):
            if direction == ">=":
                gap = np.mean(sh >= c) - np.mean(un >= c)
            else:
                gap = np.mean(sh <= c) - np.mean(un <= c)
            if best[1] is None or gap > best[0]:
                best = (float(gap), int(c), direction)
    return best[1], best[2]


def tv_lower_bound_mc(
    process,
    N: int,
    K: int,
    statistic: str,
    rng: np.random.Generator,
    threshold=None,
    direction: str | None = None,
    samples: int = 10_000,
    pilot: int = 1_000,
    cold_spots: ColdSpotSet | None = None,
) -> TestReport:
    """TV lower bound P_shuffle(A) - P_uniform(A) for a one-sided event A
    on a deck statistic, with a two-sided 99% Wilson interval.

    statistic is "rising_sequences" (on the deck as dealt), "longest_run"
    (on the inverse permutation, where under-shuffling leaves a long
    ascending stretch), or "coldspot_ascents" (ascents of the inverse
    permutation at the positions of cold_spots, with that test's own
    threshold rule).  When threshold or direction is missing, a pilot run
    of `pilot` samples per side picks the gap-maximizing event; the final
    estimate then uses fresh samples.
    """
    if statistic == "coldspot_ascents":
        if cold_spots is None:
            raise InvalidParams("coldspot_ascents needs a built ColdSpotSet")
        hits_sh = sum(
            cold_spot_test(
                inverse_deck(sample_shuffled_deck(process, N, K, rng)), cold_spots
            ).reject
            for _ in range(samples)
        )
        hits_un = sum(
            cold_spot_test(rng.permutation(N) + 1, cold_spots).reject
            for _ in range(samples)
        )
    else:
        if statistic not in _STATISTICS:
            raise InvalidParams(f"unknown statistic: {statistic!r}")
        if threshold is None or direction is None:
            sh = _stat_values(statistic, process, N, K, pilot, rng)
            un = _stat_values(statistic, process, N, K, pilot, rng, uniform=True)
            cands = np.unique(np.concatenate([sh, un]))
            if threshold is not None:
                cands = np.array([threshold])
            threshold, direction = _best_event(sh, un, cands)
        sh = _stat_values(statistic, process, N, K, samples, rng)
        un = _stat_values(statistic, process, N, K, samples, rng, uniform=True)
        if direction == ">=":
            hits_sh, hits_un = int((sh >= threshold).sum()), int((un >= threshold).sum())
        else:
            hits_sh, hits_un = int((sh <= threshold).sum()), int((un <= threshold).sum())
    p_sh, p_un = hits_sh / samples, hits_un / samples
    lo_sh, hi_sh = wilson_interval(hits_sh, samples)
    lo_un, hi_un = wilson_interval(hits_un, samples)
    bound = min(max(p_sh - p_un, 0.0), 1.0)
    ci = (min(max(lo_sh - hi_un, 0.0), 1.0), min(max(hi_sh - lo_un, 0.0), 1.0))
    decision = "reject-uniformity" if ci[0] > 0 else "accept"
    return TestReport(
        statistic=bound,
        threshold=0.0 if threshold is None else float(threshold),
        decision=decision,
        replicates=(hits_sh, hits_un, samples),
        ci=ci,
    )


def _graph_pair_from_piles(piles_list, rng):
    """Two independent trajectory graphs conditioned on one pile-size
    sequence, via packed per-column uniform arrangements."""
    N = int(piles_list[0].sum())
    k = max(len(p) for p in piles_list)
    per = max(1, int(63 // math.log2(max(k, 2))))
    graphs = []
    for _ in range(2):
        chunks = []
        key = np.zeros(N, dtype=np.uint64)
        filled = 0
        for piles in piles_list:
            col = rng.permuted(np.repeat(np.arange(len(piles)), piles))
            key = key * np.uint64(k) + col.astype(np.uint64)
            filled += 1
            if filled == per:
                chunks.append(key)
                key = np.zeros(N, dtype=np.uint64)
                filled = 0
        if filled:
            chunks.append(key)
        order = np.lexsort(tuple(reversed(chunks)))
        eq = np.ones(N - 1, dtype=bool)
        for c in chunks:
            sc = c[order]
            eq &= sc[1:] == sc[:-1]
        graphs.append(ShuffleGraph(N, eq))
    return graphs


def first_moment_scan(process, N_list, K_rule, trials: int, rng) -> list:
    """Empirical E|E(G, G')| for independent trajectory-graph pairs that
    share each trial's pile-size sequence.

    K_rule maps N to the step count.  Returns one row per N with the mean
    shared-edge count and its standard error.
    """
    rows = []
    for N in N_list:
        K = int(K_rule(N))
        counts = np.empty(trials, dtype=np.int64)
        for i in range(trials):
            piles = pile_sequence(process, N, K, rng)
            G1, G2 = _graph_pair_from_piles(piles, rng)
            counts[i] = shared_edges(G1, G2)
        rows.append(
            {
                "N": int(N),
                "K": K,
                "trials": trials,
                "mean": float(counts.mean()),
                "stderr": float(counts.std(ddof=1) / math.sqrt(trials))
                if trials > 1
                else 0.0,
            }
        )
    return rows


def first_moment_trend(rows) -> float:
    """Spearman rank correlation of mean shared edges against N."""
    r, _ = spearmanr([row["N"] for row in rows], [row["mean"] for row in rows])
    return float(r)


def sparsity_scan(process, N: int, K: int, L: int, trials: int, rng) -> int:
    """Number of sampled trajectory graphs that are L-sparse."""
    hits = 0
    for _ in range(trials):
        if _exchangeable_columns(process):
            G = sample_shuffle_blocks(process, N, K, rng)
        else:
            _, G = sample_inverse_shuffled_perm(process, N, K, rng, return_graph=True)
        hits += is_L_sparse(G, L)
    return hits


def cold_spot_calibration(H: ColdSpotSet, trials: int, rng) -> int:
    """Number of uniform decks the cold-spot test rejects."""
    return sum(
        cold_spot_test(rng.permutation(H.N) + 1, H).reject for _ in range(trials)
    )


def cold_spot_power(process, K: int, H: ColdSpotSet, trials: int, rng) -> int:
    """Number of K-step shuffled decks the cold-spot test rejects.

    The test reads ascents of the inverse permutation: cards that shared
    every pile keep their relative order, so the sorted listing over-ascends
    at the predicted positions.
    """
    return sum(
        cold_spot_test(
            inverse_deck(sample_shuffled_deck(process, H.N, K, rng)), H
        ).reject
        for _ in range(trials)
    )


def cutoff_scan(
    mu,
    N_list,
    coefficients,
    statistic: str,
    samples: int,
    rng,
    cbar: float | None = None,
    exact_max_N: int = 7,
) -> list:
    """TV-lower-bound profile on a (N, K/log N) grid for IID cuts from mu.

    coefficients are multiples of log N; each row carries the bound with
    its interval and, for N <= exact_max_N with enumerable cuts, the exact
    TV as cross-validation.  cbar, when given, is echoed into every row as
    the reference cutoff location.
    """
    from .exact import exact_shuffle_distribution, exact_tv
    from .errors import TooLarge
    from .measures import Beta, PointMass

    if isinstance(mu, PointMass):
        process = IIDMultinomial(mu.point)
    elif isinstance(mu, Beta) and mu.a == 1.0 and mu.b == 1.0:
        # law-identical to IID draws from Beta(1,1) but with enumerable
        # cut distribution, so small-N rows get the exact column
        process = UniformCut()
    else:
        process = IIDFromMeasure(mu)
    rows = []
    for N in N_list:
        log_N = math.log(N)
        for c in coefficients:
            K = max(int(math.floor(c * log_N + 1e-9)), 0)
            rep = tv_lower_bound_mc(process, N, K, statistic, rng, samples=samples)
            row = {
                "N": int(N),
                "K": K,
                "coefficient": float(c),
                "statistic": statistic,
                "estimate": rep.statistic,
                "ci_lo": rep.ci[0],
                "ci_hi": rep.ci[1],
                "cbar": cbar,
                "exact_tv": None,
            }
            if N <= exact_max_N:
                try:
                    row["exact_tv"] = float(
                        exact_tv(exact_shuffle_distribution(process, N, K), N)
                    )
                except TooLarge:
                    pass
            rows.append(row)
    return rows
