"""The shuffle engine: forward riffles, shuffle matrices, and the
equal-row graph that controls how much of the deck a K-step shuffle has
actually randomized.

Two equivalent samplers of the post-shuffle deck are provided.  The
forward route cuts and interleaves K times (`shuffle_K`).  The trajectory
route assigns each card its pile label per step, stable-sorts the cards by
that label string (first step most significant), and inverts the sorted
listing, since a card's rank in string order is its final position
(`sample_inverse_shuffled_perm`).  Both produce the same law; the second
exposes the equal-row graph, whose components are exactly the stretches of
the sorted listing forced to ascend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import InvalidChi, SizeMismatch, TooFewSteps, TooLarge
from .measures import FiniteMixture
from .processes import (
    ExplicitSequence,
    IIDFromMeasure,
    IIDMultinomial,
    UniformCut,
    cut_sizes,
    enumerate_step_laws,
)

__all__ = [
    "riffle_once",
    "shuffle_K",
    "sample_shuffle_matrix",
    "sort_lex",
    "ShuffleGraph",
    "shuffle_graph",
    "graph_sort",
    "deck_from_blocks",
    "sample_inverse_shuffled_perm",
    "enumerate_inverse_law",
    "shared_edges",
    "is_L_sparse",
    "lambda_of_prefix",
    "prefix_interval",
    "is_chi_good",
    "is_almost_mu_like",
]


def riffle_once(deck: np.ndarray, piles, rng: np.random.Generator) -> np.ndarray:
    """Cut the deck into consecutive piles of the given sizes (top first)
    and interleave them uniformly, preserving order within each pile."""
    deck = np.asarray(deck)
    piles = np.asarray(piles, dtype=np.int64)
    if piles.sum() != deck.size:
        raise SizeMismatch(f"piles {piles.tolist()} do not sum to deck size {deck.size}")
    word = rng.permuted(np.repeat(np.arange(piles.size), piles))
    out = np.empty_like(deck)
    start = 0
    for l, n in enumerate(piles):
        out[word == l] = deck[start : start + n]
        start += n
    return out


def shuffle_K(process, N: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """Deck after K forward riffles from the identity; entries are cards
    1..N, index is position."""
    deck = np.arange(1, N + 1, dtype=np.int64)
    for t in range(1, K + 1):
        deck = riffle_once(deck, cut_sizes(process, N, t, rng), rng)
    return deck


def sample_shuffle_matrix(process, N: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """N x K matrix of pile labels: row i is the label string of card i+1,
    column t the uniformly arranged labels of step t+1."""
    M = np.empty((N, K), dtype=np.int64)
    for t in range(1, K + 1):
        piles = cut_sizes(process, N, t, rng)
        M[:, t - 1] = rng.permuted(np.repeat(np.arange(piles.size), piles))
    return M


def sort_lex(M: np.ndarray):
    """Sort rows lexicographically, first column most significant.

    Returns (order, sorted_rows) with sorted_rows = M[order]; the sort is
    stable, so tied rows keep their original relative order.
    """
    M = np.atleast_2d(np.asarray(M))
    order = np.lexsort(tuple(M[:, j] for j in range(M.shape[1] - 1, -1, -1)))
    return order, M[order]


@dataclass(frozen=True)
class ShuffleGraph:
    """Graph on positions 1..N whose only possible edges join consecutive
    positions; edge_mask[i] says whether positions i+1 and i+2 are joined."""

    N: int
    edge_mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.edge_mask, dtype=bool)
        if mask.shape != (max(self.N - 1, 0),):
            raise SizeMismatch(f"edge mask must have length N-1 = {self.N - 1}")
        mask.setflags(write=False)
        object.__setattr__(self, "edge_mask", mask)

    @property
    def n_edges(self) -> int:
        return int(self.edge_mask.sum())

    @property
    def edges(self) -> tuple:
        return tuple((int(i) + 1, int(i) + 2) for i in np.flatnonzero(self.edge_mask))

    def component_ids(self) -> np.ndarray:
        """Component index of each position, nondecreasing left to right."""
        if self.N == 0:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(([0], np.cumsum(~self.edge_mask))).astype(np.int64)

    def component_sizes(self) -> np.ndarray:
        ids = self.component_ids()
        return np.bincount(ids, minlength=ids[-1] + 1 if self.N else 0)

    def intersect(self, other: "ShuffleGraph") -> "ShuffleGraph":
        if self.N != other.N:
            raise SizeMismatch("graphs on different position sets")
        return ShuffleGraph(self.N, self.edge_mask & other.edge_mask)


def shuffle_graph(sorted_rows: np.ndarray) -> ShuffleGraph:
    """Equal-row graph of a lexicographically sorted label matrix: edge
    between consecutive positions iff their rows coincide."""
    R = np.atleast_2d(np.asarray(sorted_rows))
    mask = np.all(R[1:] == R[:-1], axis=1) if R.shape[0] > 1 else np.empty(0, bool)
    return ShuffleGraph(R.shape[0], mask)


def graph_sort(sigma: np.ndarray, G: ShuffleGraph) -> np.ndarray:
    """Rearrange the values of sigma in increasing order within each
    component of G, leaving the component blocks in place."""
    sigma = np.asarray(sigma)
    if sigma.size != G.N:
        raise SizeMismatch("word length differs from graph size")
    comp = G.component_ids()
    return sigma[np.lexsort((sigma, comp))]


def deck_from_blocks(block_sizes, rng: np.random.Generator) -> np.ndarray:
    """Uniform deck among those whose inverse ascends within each block of
    consecutive card labels.  The blocks are meant to be the equal-row graph
    components: the sorted-by-trajectory listing is uniform among words
    ascending within components, and the deck is its inverse; cards are 1..N.
    """
    sizes = np.asarray(block_sizes, dtype=np.int64)
    N = int(sizes.sum())
    comp = np.repeat(np.arange(sizes.size), sizes)
    pi = rng.permutation(N)
    word = pi[np.lexsort((pi, comp))]
    deck = np.empty(N, dtype=np.int64)
    deck[word] = np.arange(1, N + 1, dtype=np.int64)
    return deck


_IID_KINDS = (IIDMultinomial, IIDFromMeasure, UniformCut)


def _iid_digit_matrix(process, N: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """Label matrix for processes whose columns are exchangeable with a
    conditional-IID representation: the cut-then-arrange law of a column
    equals drawing a simplex point and assigning labels independently.

    For IIDMultinomial the point is the fixed p.  For a uniform cut the
    point is q ~ Beta(1,1): integrating q^a (1-q)^(N-a) gives
    1/((N+1) binom(N,a)), the uniform-cut arrangement law.  For
    IIDFromMeasure (multinomial rounding) it is a fresh draw of mu.
    """
    from .measures import sample_point

    M = np.empty((N, K), dtype=np.int64)
    for t in range(K):
        if isinstance(process, IIDMultinomial):
            p = np.asarray(process.p)
        elif isinstance(process, UniformCut):
            p = None  # handled below with a single uniform threshold
        else:
            p = sample_point(process.mu, rng)
        if isinstance(process, UniformCut):
            q = rng.random()
            M[:, t] = (rng.random(N) >= q).astype(np.int64)
        else:
            M[:, t] = rng.choice(p.size, size=N, p=p)
    return M


def _pack_rows(M: np.ndarray, k: int) -> list:
    """Pack label rows into uint64 chunk columns preserving lexicographic
    order (first label most significant within a chunk)."""
    per = max(1, int(63 // math.log2(max(k, 2))))
    chunks = []
    for start in range(0, M.shape[1], per):
        block = M[:, start : start + per]
        key = np.zeros(M.shape[0], dtype=np.uint64)
        for j in range(block.shape[1]):
            key = key * np.uint64(k) + block[:, j].astype(np.uint64)
        chunks.append(key)
    return chunks


def sample_inverse_shuffled_perm(
    process,
    N: int,
    K: int,
    rng: np.random.Generator,
    method: str = "auto",
    return_graph: bool = False,
):
    """Deck after K shuffles, sampled through the trajectory description:
    assign every card its pile label for each step, stable-sort cards by
    label string (step 1 most significant), and invert that listing.  A
    card's rank in string order is its final position, so the sorted listing
    is the inverse of the deck; inverting it recovers the deck the forward
    cut-and-interleave walk deals.

    method "matrix" forces the literal cut-then-arrange matrix; "auto"
    uses the exchangeable per-card form when the process admits one.  With
    return_graph=True also returns the equal-row ShuffleGraph, whose
    components are the deck stretches forced to ascend.
    """
    if method not in ("auto", "matrix"):
        raise ValueError(f"unknown method: {method}")
    if method == "auto" and isinstance(process, _IID_KINDS) and not (
        isinstance(process, IIDFromMeasure) and process.rounding != "multinomial"
    ):
        M = _iid_digit_matrix(process, N, K, rng)
    else:
        M = sample_shuffle_matrix(process, N, K, rng)
    k = int(process.k)
    if K == 0:
        deck = np.arange(1, N + 1, dtype=np.int64)
        G = ShuffleGraph(N, np.ones(max(N - 1, 0), bool))
        return (deck, G) if return_graph else deck
    chunks = _pack_rows(M, k)
    order = np.lexsort(tuple(reversed(chunks)))
    # order lists card labels sorted by trajectory string; that listing is
    # the inverse of the post-shuffle deck, so invert it to get positions.
    deck = np.empty(N, dtype=np.int64)
    deck[order] = np.arange(1, N + 1, dtype=np.int64)
    if not return_graph:
        return deck
    S = np.column_stack([c[order] for c in chunks])
    return deck, shuffle_graph(S)


# ---------------------------------------------------------------------------
# Exact law of the trajectory sampler for small decks
# ---------------------------------------------------------------------------


def _arrangements(piles):
    """Distinct label words with the given pile counts."""
    base = tuple(np.repeat(np.arange(len(piles)), piles).tolist())
    return sorted(set(permutations(base)))


def enumerate_inverse_law(process, N: int, K: int) -> dict:
    """Exact deck distribution of the trajectory sampler as a dict mapping
    deck tuples (cards 1..N) to Fraction probabilities.

    Sums over pile sequences (exact step laws) and label matrices; the
    matrices are deduplicated by their sorted row multiset, since the deck
    law given a matrix is uniform over decks whose inverse ascends within
    the equal-row components.
    """
    if N > 6 or K > 3:
        raise TooLarge("exact enumeration is limited to N <= 6, K <= 3")
    laws = enumerate_step_laws(process, N, K)
    fact = [math.factorial(i) for i in range(N + 1)]

    def matrices(step: int, prob: Fraction, cols: list):
        if step == K:
            yield prob, cols
            return
        for w, piles in laws[step]:
            if w == 0:
                continue
            arr = _arrangements(piles)
            p_col = w / Fraction(len(arr))
            for col in arr:
                yield from matrices(step + 1, prob * p_col, cols + [col])

    by_multiset: dict = {}
    for prob, cols in matrices(0, Fraction(1), []):
        M = np.array(cols, dtype=np.int64).T if K else np.zeros((N, 0), np.int64)
        _, S = sort_lex(M)
        key = S.tobytes()
        if key in by_multiset:
            by_multiset[key] = (by_multiset[key][0] + prob, by_multiset[key][1])
        else:
            by_multiset[key] = (prob, shuffle_graph(S).component_ids())

    all_perms = np.array(list(permutations(range(1, N + 1))), dtype=np.int64)
    out: dict = {}
    for prob, comp in by_multiset.values():
        # sort the card values of every uniform word within each component
        # block at once; each ascending deck then arises prod(v_i!) times,
        # making it uniform over the fixed points of the block sort
        bounds = np.flatnonzero(np.diff(comp)) + 1
        pieces = np.split(all_perms, bounds, axis=1)
        words = np.concatenate([np.sort(p, axis=1) for p in pieces], axis=1)
        # each sorted word is the listing of cards by trajectory string;
        # the deck it produces is the inverse permutation
        decks = np.empty_like(words)
        decks[np.arange(words.shape[0])[:, None], words - 1] = np.arange(
            1, N + 1, dtype=np.int64
        )[None, :]
        w = prob / Fraction(fact[N])
        for row in map(tuple, decks.tolist()):
            out[row] = out.get(row, Fraction(0)) + w
    total = sum(out.values())
    if total != 1:
        raise AssertionError(f"law does not sum to 1: {total}")
    return out


def shared_edges(G1: ShuffleGraph, G2: ShuffleGraph) -> int:
    """Number of edges the two graphs have in common (same position pair)."""
    return G1.intersect(G2).n_edges


def is_L_sparse(G: ShuffleGraph, L: int) -> bool:
    """True when every window of L consecutive positions contains at most
    L/3 edges of G."""
    if L < 2:
        raise ValueError("need L >= 2")
    mask = G.edge_mask.astype(np.int64)
    W = L - 1  # adjacent pairs inside a window of L positions
    if mask.size <= W:
        return int(mask.sum()) <= L / 3
    c = np.concatenate(([0], np.cumsum(mask)))
    window_counts = c[W:] - c[:-W]
    return int(window_counts.max()) <= L / 3


# ---------------------------------------------------------------------------
# Prefix geometry and trajectory diagnostics
# ---------------------------------------------------------------------------


def lambda_of_prefix(pile_seq, prefix) -> float:
    """Expected fraction of cards whose label string starts with the
    prefix: the product over steps of the named pile's share of the cut."""
    if len(prefix) > len(pile_seq):
        raise TooFewSteps(
            f"prefix of length {len(prefix)} needs that many steps, "
            f"got {len(pile_seq)}"
        )
    out = 1.0
    for j, d in enumerate(prefix):
        row = np.asarray(pile_seq[j], dtype=float)
        out *= row[int(d)] / row.sum()
    return out


def prefix_interval(pile_seq, prefix):
    """[t, t + lam): the subinterval of [0,1) owned by the prefix when
    label strings are laid out lexicographically with widths from
    lambda_of_prefix."""
    if len(prefix) > len(pile_seq):
        raise TooFewSteps(
            f"prefix of length {len(prefix)} needs that many steps, "
            f"got {len(pile_seq)}"
        )
    t = 0.0
    scale = 1.0
    for j, d in enumerate(prefix):
        row = np.asarray(pile_seq[j], dtype=float)
        q = row / row.sum()
        t += scale * float(np.sum(q[: int(d)]))
        scale *= q[int(d)]
    return t, t + scale


def is_chi_good(piles, chi: float) -> bool:
    """A cut is chi-good when no pile takes more than (1 - chi) of the
    deck, i.e. the cut point stays chi away from every vertex in sup norm."""
    if not 0.0 < chi < 1.0:
        raise InvalidChi(f"chi must lie in (0, 1), got {chi}")
    piles = np.asarray(piles, dtype=float)
    N = piles.sum()
    if N <= 0:
        raise SizeMismatch("empty cut")
    return bool(piles.max() / N <= 1.0 - chi)


def is_almost_mu_like(pile_seq, mixture: FiniteMixture, N: int, rho: float, varphi: float):
    """Windowed frequency test of a pile-size sequence against a
    discretized measure.

    Scans integer offsets t_* in [0, rho log N); for each offset, splits
    the steps into consecutive windows of length rho log N and checks that
    within every full window the fraction of steps landing in each cell
    stays within varphi of the cell's weight.  Returns (True, t_star) for
    the first offset whose windows all pass, else (False, None).
    """
    if mixture.cells is None:
        raise ValueError("mixture must carry its cell decomposition")
    L = rho * math.log(N)
    K = len(pile_seq)
    if L <= 0 or K < L:
        raise TooFewSteps(f"window length {L:.3g} does not fit in {K} steps")
    cells = mixture.cells
    labels = [
        cells.cell_of(np.asarray(piles, dtype=float) / N) for piles in pile_seq
    ]
    weight = {}
    for w, lab in zip(mixture.weights, mixture.cell_labels):
        weight[lab] = weight.get(lab, 0.0) + w
    all_labels = set(weight) | set(labels)
    for t_star in range(math.ceil(L)):
        n_windows = int((K - t_star) // L)
        if n_windows < 1:
            continue
        ok = True
        for i in range(1, n_windows + 1):
            lo, hi = t_star + (i - 1) * L, t_star + i * L
            in_window = [lab for t, lab in enumerate(labels, 1) if lo < t <= hi]
            counts = {}
            for lab in in_window:
                counts[lab] = counts.get(lab, 0) + 1
            if any(
                abs(counts.get(lab, 0) / L - weight.get(lab, 0.0)) >= varphi
                for lab in all_labels
            ):
                ok = False
                break
        if ok:
            return True, t_star
    return False, None
