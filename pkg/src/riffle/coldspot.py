"""Cold spots: deterministic deck regions where an under-shuffled deck is
forced to ascend more often than a uniform one.

The construction follows the trajectory picture.  Cards sorted by their
label strings cluster by prefix; a prefix whose digit counts sit at the
theta-tilted quotas is "collision-likely" (many cards share it), and the
expected deck interval of each such prefix is a cold spot.  The test then
counts ascents inside the union H of those intervals: uniform decks give
about |H|/2, under-shuffled decks systematically more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .constants import info_I
from .errors import (
    DegenerateMixture,
    InvalidChi,
    QuotaInfeasible,
    RiffleError,
    TooFewSteps,
    VertexPoint,
)
from .measures import FiniteMixture
from .permstats import count_ascents
from .processes import round_largest_remainder
from .rng import stream

__all__ = [
    "TestReport",
    "CellQuota",
    "ColdSpotSet",
    "floor_with_tolerance",
    "idealized_pile_sequence",
    "build_cold_spots",
    "ascent_statistic",
    "cold_spot_test",
    "is_collision_likely",
]

_FLOOR_EPS = 1e-9


def floor_with_tolerance(x: float, eps: float = _FLOOR_EPS) -> int:
    """floor(x) robust to values sitting a hair below an exact integer."""
    return int(math.floor(x + eps))


@dataclass(frozen=True)
class TestReport:
    """Outcome of a hypothesis test or bound estimate."""

    statistic: float
    threshold: float
    decision: str  # "reject-uniformity" or "accept"
    replicates: tuple | None = None
    ci: tuple | None = None

    @property
    def reject(self) -> bool:
        return self.decision == "reject-uniformity"


@dataclass(frozen=True)
class CellQuota:
    """Digit bookkeeping for one mixture cell.

    digits lists the labels l with p_l > chi; alpha/beta are the integer
    digit counts required on the cell's prefix/suffix positions.
    """

    label: tuple
    digits: tuple
    alpha: tuple
    beta: tuple | None
    frak_p: tuple
    frak_q: tuple
    prefix_positions: tuple
    suffix_positions: tuple


@dataclass(frozen=True)
class ColdSpotSet:
    N: int
    intervals: tuple  # (lo, hi) 1-based inclusive, sorted, disjoint
    delta: float
    chi: float
    rho: float
    theta: float
    alpha_tot: int
    beta_tot: int
    prefix_count: int
    enumerated_count: int
    subsampled: bool
    cells: tuple = field(repr=False)  # CellQuota records
    padding: tuple = field(repr=False)  # (step, pinned digit) pairs

    @property
    def size(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    @property
    def boundary_size(self) -> int:
        return sum(1 if lo == hi else 2 for lo, hi in self.intervals)

    def positions(self) -> np.ndarray:
        """All member positions, 1-based, ascending."""
        if not self.intervals:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(
            [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in self.intervals]
        )

    def pair_positions(self) -> np.ndarray:
        """Members i with i <= N-1, the positions where an ascent pair
        (i, i+1) exists."""
        pos = self.positions()
        return pos[pos <= self.N - 1]

    def geometry_ok(self) -> bool:
        return self.size >= math.sqrt(self.N) and self.boundary_size <= 2 * math.sqrt(
            self.size
        )


def _largest_remainder_with_floor(targets, total: int) -> list:
    """Integer counts >= 1 summing to total, each within 1 of its target;
    raises QuotaInfeasible when no such rounding exists."""
    targets = np.asarray(targets, dtype=float)
    if total < targets.size:
        raise QuotaInfeasible(
            f"cannot place {targets.size} positive digit counts into {total} slots"
        )
    base = np.floor(targets).astype(np.int64)
    rem = targets - base
    short = int(total - base.sum())
    if short < 0 or short > targets.size:
        raise QuotaInfeasible("rounding targets are inconsistent with the slot count")
    order = np.lexsort((np.arange(targets.size), -rem))
    base[order[:short]] += 1
    # positivity: move units into empty digits from the largest surplus
    while (base == 0).any():
        need = int(np.argmin(base))
        donors = np.where(base >= 2)[0]
        if donors.size == 0:
            raise QuotaInfeasible("no donor digit available for positivity")
        donor = donors[np.argmax(base[donors] - targets[donors])]
        base[donor] -= 1
        base[need] += 1
    if np.any(np.abs(base - targets) > 1 + _FLOOR_EPS):
        raise QuotaInfeasible(
            f"quotas {base.tolist()} stray more than 1 from targets {targets.tolist()}"
        )
    return base.tolist()


def _multiset_words(digits, counts):
    """All distinct words using counts[j] copies of digits[j]."""
    total = sum(counts)
    counts = list(counts)

    def rec(remaining):
        if remaining == 0:
            yield ()
            return
        for j, d in enumerate(digits):
            if counts[j]:
                counts[j] -= 1
                for rest in rec(remaining - 1):
                    yield (d,) + rest
                counts[j] += 1

    yield from rec(total)


def _random_word(digits, counts, rng) -> tuple:
    return tuple(rng.permuted(np.repeat(np.asarray(digits), counts)).tolist())


def _multinomial(total: int, counts) -> int:
    out = math.factorial(total)
    for c in counts:
        out //= math.factorial(c)
    return out


def idealized_pile_sequence(mixture: FiniteMixture, N: int, K: int) -> list:
    """Deterministic pile sizes tracking the mixture's typical behavior.

    Step t uses the atom whose running quota (weight times t) is most
    under-served so far, ties to the lowest index; its proportions scale
    to N by largest-remainder rounding.  A single-atom mixture repeats the
    same pile sizes every step.  Useful as the reference trajectory when
    building a testing region ahead of seeing actual cut sizes.
    """
    weights = np.asarray(mixture.weights, dtype=float)
    placed = np.zeros(len(weights))
    rows = []
    for t in range(1, K + 1):
        j = int(np.argmax(weights * t - placed))
        placed[j] += 1
        rows.append(round_largest_remainder(mixture.atoms[j], N))
    return rows


def build_cold_spots(
    pile_seq,
    mixture: FiniteMixture,
    theta: float,
    delta: float = 0.1,
    chi: float = 0.05,
    rho: float = 0.0,
    prefix_cap: int = 1_000_000,
) -> ColdSpotSet:
    """Construct the cold-spot set H for a concrete pile-size sequence.

    The prefix length A is floor((1-delta) log N / (2 sum_i h_i I_i)) with
    I_i the tilted information of cell i's representative; digit quotas on
    each cell's prefix positions are the largest-remainder rounding of the
    theta-tilted frequencies.  H is the union over quota-exact prefixes x
    of the integer positions in N*J_x, where J_x is the expected deck
    interval of strings with prefix x under the actual pile proportions.

    Beyond prefix_cap prefixes, a seeded uniform subsample is enumerated
    instead and the set is flagged as subsampled.
    """
    if mixture.cells is None:
        raise ValueError("mixture must carry its cell decomposition")
    if abs(mixture.cells.chi - chi) > 1e-12:
        raise InvalidChi(
            f"chi = {chi} does not match the mixture's decomposition "
            f"(chi = {mixture.cells.chi})"
        )
    if mixture.degenerate:
        raise DegenerateMixture("mixture mass sits on vertex cells")
    rows = [np.asarray(r, dtype=np.int64) for r in pile_seq]
    K = len(rows)
    if K == 0:
        raise TooFewSteps("empty pile sequence")
    N = int(rows[0].sum())
    for t, r in enumerate(rows, 1):
        if int(r.sum()) != N:
            raise ValueError(f"step {t} piles sum to {int(r.sum())}, expected {N}")
    log_N = math.log(N)

    weights = np.asarray(mixture.weights, dtype=float)
    atoms = [np.asarray(a, dtype=float) for a in mixture.atoms]
    try:
        infos = [info_I(a, theta) for a in atoms]
    except VertexPoint as exc:
        raise DegenerateMixture(str(exc)) from exc
    denom = 2.0 * float(np.dot(weights, infos))
    if denom <= 0:
        raise DegenerateMixture("tilted information vanished")
    A = floor_with_tolerance((1.0 - delta) * log_N / denom)
    if A < 1:
        raise TooFewSteps(f"prefix length came out as {A}")
    pad_len = floor_with_tolerance(2.0 * rho * log_N) if rho > 0 else 0
    if not K > A + 2.0 * rho * log_N:
        raise TooFewSteps(
            f"need more than {A + 2.0 * rho * log_N:.2f} steps, got {K}"
        )

    label_of_step = [mixture.cells.cell_of(r / N) for r in rows]
    atom_of_label = {lab: j for j, lab in enumerate(mixture.cell_labels)}
    pins = tuple(
        (t, int(np.argmax(rows[t - 1]))) for t in range(A + 1, A + pad_len + 1)
    )
    suffix_start = A + pad_len + 1

    prefix_pos: dict = {j: [] for j in range(len(atoms))}
    for t in range(1, A + 1):
        lab = label_of_step[t - 1]
        if lab not in atom_of_label:
            raise QuotaInfeasible(
                f"step {t} lands in cell {lab} outside the mixture support"
            )
        prefix_pos[atom_of_label[lab]].append(t)
    suffix_pos: dict = {j: [] for j in range(len(atoms))}
    for t in range(suffix_start, K + 1):
        lab = label_of_step[t - 1]
        if lab in atom_of_label:
            suffix_pos[atom_of_label[lab]].append(t)

    cells = []
    for j, (lab, p) in enumerate(zip(mixture.cell_labels, atoms)):
        digits = tuple(int(l) for l in np.where(p > chi)[0])
        if not digits:
            raise DegenerateMixture(f"cell {lab} has no digit above chi = {chi}")
        tilt = p[list(digits)] ** theta
        frak_p = tuple(tilt / tilt.sum())
        sq = p[list(digits)] ** 2
        frak_q = tuple(sq / sq.sum())
        n_pref = len(prefix_pos[j])
        alpha = (
            tuple(_largest_remainder_with_floor(np.array(frak_p) * n_pref, n_pref))
            if n_pref
            else tuple(0 for _ in digits)
        )
        n_suf = len(suffix_pos[j])
        try:
            beta = (
                tuple(_largest_remainder_with_floor(np.array(frak_q) * n_suf, n_suf))
                if n_suf
                else None
            )
        except QuotaInfeasible:
            beta = None
        cells.append(
            CellQuota(
                label=lab,
                digits=digits,
                alpha=alpha,
                beta=beta,
                frak_p=frak_p,
                frak_q=frak_q,
                prefix_positions=tuple(prefix_pos[j]),
                suffix_positions=tuple(suffix_pos[j]),
            )
        )

    prefix_count = 1
    for c in cells:
        if c.prefix_positions:
            prefix_count *= _multinomial(len(c.prefix_positions), c.alpha)

    active = [c for c in cells if c.prefix_positions]
    subsampled = prefix_count > prefix_cap
    if subsampled:
        rng = stream(20260214, 0xC5, N % (2**31), A)
        draws = (
            tuple(_random_word(c.digits, c.alpha, rng) for c in active)
            for _ in range(prefix_cap)
        )
        combos = iter(set(draws))
    else:
        combos = product(*[list(_multiset_words(c.digits, c.alpha)) for c in active])

    props = [r / N for r in rows[:A]]
    cum = [np.concatenate(([0.0], np.cumsum(q))) for q in props]
    blocks = []
    n_enumerated = 0
    for combo in combos:
        n_enumerated += 1
        word = np.empty(A, dtype=np.int64)
        for c, w in zip(active, combo):
            for t, d in zip(c.prefix_positions, w):
                word[t - 1] = d
        t_acc = 0.0
        scale = 1.0
        for t in range(A):
            d = int(word[t])
            t_acc += scale * cum[t][d]
            scale *= props[t][d]
        start_real = N * t_acc + 1.0
        lo = math.ceil(start_real - _FLOOR_EPS)
        hi = math.ceil(start_real + N * scale - _FLOOR_EPS) - 1
        lo, hi = max(lo, 1), min(hi, N)
        if lo <= hi:
            blocks.append((lo, hi))

    blocks.sort()
    merged = []
    for lo, hi in blocks:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))

    out = ColdSpotSet(
        N=N,
        intervals=tuple(merged),
        delta=delta,
        chi=chi,
        rho=rho,
        theta=theta,
        alpha_tot=A,
        beta_tot=max(K - pad_len - A, 0),
        prefix_count=prefix_count,
        enumerated_count=n_enumerated,
        subsampled=subsampled,
        cells=tuple(cells),
        padding=pins,
    )
    if not out.geometry_ok():
        raise RiffleError(
            f"cold-spot geometry violated: |H| = {out.size}, "
            f"|boundary| = {out.boundary_size}, N = {N}"
        )
    return out


def ascent_statistic(sigma, H: ColdSpotSet) -> int:
    """#{i in H: sigma(i) < sigma(i+1)}, skipping i = N."""
    sigma = np.asarray(sigma)
    if sigma.size != H.N:
        raise ValueError(f"deck size {sigma.size} differs from H's N = {H.N}")
    return count_ascents(sigma, H.pair_positions())


def cold_spot_test(sigma, H: ColdSpotSet, delta: float | None = None) -> TestReport:
    """Reject uniformity iff the ascent count exceeds
    |H|/2 + |H|^(1/2 + delta/2).

    sigma is the permutation whose ascents are counted.  To test a shuffled
    deck, pass its inverse (see permstats.inverse_deck): cards that shared
    every pile keep their relative order, so the surplus ascents appear in
    the sorted listing, not in the deck as dealt.  A uniform deck can be
    passed either way.
    """
    if delta is None:
        delta = H.delta
    m = H.size
    stat = ascent_statistic(sigma, H)
    threshold = m / 2.0 + m ** (0.5 + delta / 2.0)
    decision = "reject-uniformity" if stat > threshold else "accept"
    return TestReport(statistic=float(stat), threshold=threshold, decision=decision)


def is_collision_likely(string, H: ColdSpotSet) -> bool:
    """Diagnostic predicate: does a full label string meet the cold-spot
    quotas?  Requires quota-exact digit counts on each cell's prefix
    positions, pinned padding digits, and quota-exact suffix counts (beta
    quotas, where they exist)."""
    s = np.asarray(string, dtype=np.int64)
    for t, d in H.padding:
        if s[t - 1] != d:
            return False
    for c in H.cells:
        for positions, quota in (
            (c.prefix_positions, c.alpha),
            (c.suffix_positions, c.beta),
        ):
            if not positions or quota is None:
                continue
            vals = s[np.asarray(positions) - 1]
            for d, q in zip(c.digits, quota):
                if int((vals == d).sum()) != q:
                    return False
            if not np.isin(vals, c.digits).all():
                return False
    return True
