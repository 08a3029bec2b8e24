import math

import numpy as np
import pytest

from riffle.coldspot import build_cold_spots, idealized_pile_sequence
from riffle.constants import constants_bundle
from riffle.errors import InvalidParams
from riffle.exact import exact_tv_curve
from riffle.measures import PointMass, discretize_measure
from riffle.processes import ExplicitSequence, gsr
from riffle.rng import stream
from riffle.scans import (
    cold_spot_calibration,
    cold_spot_power,
    cutoff_scan,
    first_moment_scan,
    first_moment_trend,
    sample_shuffle_blocks,
    sample_shuffled_deck,
    sparsity_scan,
    tv_lower_bound_mc,
    wilson_interval,
)
from riffle.shuffling import is_L_sparse, sample_inverse_shuffled_perm


def test_wilson_interval_values():
    lo, hi = wilson_interval(50, 100)
    assert (lo, hi) == pytest.approx((0.3752796250, 0.6247203750), abs=1e-9)
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi == pytest.approx(0.0622206877, abs=1e-9)
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0 and lo == pytest.approx(0.9377793123, abs=1e-9)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    # Narrower z narrows the interval.
    lo95, hi95 = wilson_interval(50, 100, z=1.96)
    assert lo95 > 0.3752796250 and hi95 < 0.6247203750


def test_sample_shuffled_deck_identity_and_reproducibility():
    deck = sample_shuffled_deck(gsr(), 10, 0, stream(1, 2))
    assert list(deck) == list(range(1, 11))
    a = sample_shuffled_deck(gsr(), 100, 5, stream(9, 9))
    b = sample_shuffled_deck(gsr(), 100, 5, stream(9, 9))
    assert np.array_equal(a, b)


def test_block_sampler_extremes(rng):
    # No shuffling: every card shares the empty trajectory, one component.
    G0 = sample_shuffle_blocks(gsr(), 50, 0, rng)
    assert G0.n_edges == 49
    # Deep shuffling: label strings collide with vanishing probability.
    G = sample_shuffle_blocks(gsr(), 50, 40, rng)
    assert G.n_edges == 0


def test_block_sampler_agrees_with_matrix_route():
    # Mean edge count of the sparse block route vs the explicit matrix
    # route, same process and depth.
    N, K, trials = 64, 3, 400
    rng1, rng2 = stream(3, 1), stream(3, 2)
    e1 = np.array(
        [sample_shuffle_blocks(gsr(), N, K, rng1).n_edges for _ in range(trials)]
    )
    e2 = np.array(
        [
            sample_inverse_shuffled_perm(gsr(), N, K, rng2, return_graph=True)[
                1
            ].n_edges
            for _ in range(trials)
        ]
    )
    se = math.sqrt(e1.var() / trials + e2.var() / trials)
    assert abs(e1.mean() - e2.mean()) < 5 * se + 1e-9


def test_tv_lower_bound_is_consistent_with_exact_tv():
    # At N = 5, K = 1 the true TV to uniform is 31/40; the one-sided
    # statistic bound must stay below it (up to Monte-Carlo noise).
    rng = stream(21, 0)
    rep = tv_lower_bound_mc(gsr(), 5, 1, "rising_sequences", rng, samples=4000)
    exact = float(exact_tv_curve(gsr(), 5, 1)[1])
    assert 0.0 <= rep.statistic <= exact + 0.05
    assert rep.statistic > 0.3  # the event detects this barely-mixed law
    assert rep.ci[0] <= rep.statistic <= rep.ci[1]


def test_tv_lower_bound_vanishes_when_mixed():
    rng = stream(21, 1)
    rep = tv_lower_bound_mc(gsr(), 30, 40, "longest_run", rng, samples=800)
    assert rep.statistic < 0.05


def test_tv_lower_bound_validations(rng):
    with pytest.raises(InvalidParams):
        tv_lower_bound_mc(gsr(), 10, 1, "no_such_statistic", rng, samples=10)
    with pytest.raises(InvalidParams):
        tv_lower_bound_mc(gsr(), 10, 1, "coldspot_ascents", rng, samples=10)


def test_first_moment_exact_cases(rng):
    # A single trivial cut glues every pair: N - 1 shared edges, always.
    rows = first_moment_scan(
        ExplicitSequence(((12, 0),)), [12], lambda N: 1, 20, rng
    )
    assert rows[0]["mean"] == 11.0 and rows[0]["stderr"] == 0.0
    # Deep shuffles share nothing.
    rows = first_moment_scan(gsr(), [64], lambda N: 40, 20, rng)
    assert rows[0]["mean"] == 0.0


def test_first_moment_trend_sign(rng):
    # Below the collision threshold shared edges grow with N; the scan
    # and the rank statistic must both see it.
    rows = first_moment_scan(
        gsr(), [2**6, 2**7, 2**8], lambda N: int(1.2 * math.log(N)), 40, rng
    )
    assert all(r["mean"] > 0 for r in rows)
    assert first_moment_trend(rows) > 0
    decaying = [
        {"N": 10, "mean": 3.0},
        {"N": 20, "mean": 2.0},
        {"N": 40, "mean": 1.0},
    ]
    assert first_moment_trend(decaying) == pytest.approx(-1.0)


def test_sparsity_scan_extremes(rng):
    # Unshuffled decks give the full path: never sparse.
    assert sparsity_scan(gsr(), 300, 0, 40, 5, rng) == 0
    # Well past the cutoff the graph is almost surely edgeless.
    assert sparsity_scan(gsr(), 300, 60, 40, 20, rng) == 20


def test_cold_spot_calibration_and_power_smoke():
    mu = PointMass((0.5, 0.5))
    mix = discretize_measure(mu, 0.05)
    theta = constants_bundle(mu).theta
    N, K = 2**14, 11
    H = build_cold_spots(idealized_pile_sequence(mix, N, K), mix, theta)
    assert cold_spot_calibration(H, 60, stream(61, 0)) <= 3
    assert cold_spot_power(gsr(), K, H, 10, stream(61, 1)) >= 9


def test_cutoff_scan_rows():
    rng = stream(44, 0)
    rows = cutoff_scan(
        PointMass((0.5, 0.5)),
        [6, 32],
        [0.5, 4.0],
        "rising_sequences",
        samples=600,
        rng=rng,
        cbar=2.164,
    )
    assert len(rows) == 4
    by_key = {(r["N"], r["coefficient"]): r for r in rows}
    # Exact TV cross-check fills in only for the small deck.
    assert by_key[(6, 0.5)]["exact_tv"] is not None
    assert by_key[(32, 0.5)]["exact_tv"] is None
    k_small = by_key[(6, 0.5)]["K"]
    want = float(exact_tv_curve(gsr(), 6, k_small)[k_small])
    assert by_key[(6, 0.5)]["exact_tv"] == pytest.approx(want, abs=1e-12)
    for r in rows:
        assert r["cbar"] == 2.164
        assert 0.0 <= r["ci_lo"] <= r["ci_hi"] <= 1.0
    # Under-shuffled large deck: strong bound; over-shuffled: tiny.
    assert by_key[(32, 0.5)]["estimate"] > 0.5
    assert by_key[(32, 4.0)]["estimate"] < 0.1
