"""Cut-size processes: rules emitting pile sizes for each shuffle step.

A process is one of: an explicit sequence of pile sizes, IID multinomial
cuts with fixed probabilities, IID cuts drawn from a simplex measure, the
uniform cut n ~ Unif{0..N} (k = 2), the exact bisection n = floor(N/2), or a
periodic cycle of proportional rules.  The classical GSR shuffle is
IID multinomial with p = (1/2, 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SizeMismatch, TooLarge
from .measures import FiniteMixture, PointMass, measure_from_json, sample_point

__all__ = [
    "ExplicitSequence",
    "IIDMultinomial",
    "IIDFromMeasure",
    "UniformCut",
    "ExactBisection",
    "Periodic",
    "gsr",
    "round_largest_remainder",
    "cut_sizes",
    "pile_sequence",
    "process_k",
    "enumerate_step_laws",
    "column_measure",
    "process_from_json",
]


def round_largest_remainder(fracs, N: int) -> np.ndarray:
    """Integer counts summing to N with |count_i - N f_i| < 1.

    Floors each target and hands the leftover units to the largest
    fractional parts, ties to the lowest index.
    """
    f = np.asarray(fracs, dtype=float)
    target = N * f
    base = np.floor(target).astype(np.int64)
    short = int(N - base.sum())
    if short:
        rem = target - base
        order = np.lexsort((np.arange(len(f)), -rem))
        base[order[:short]] += 1
    return base


@dataclass(frozen=True)
class ExplicitSequence:
    piles: tuple  # tuple of pile-size tuples, one per step

    def __post_init__(self):
        ps = tuple(tuple(int(n) for n in row) for row in self.piles)
        if not ps:
            raise ValueError("need at least one step")
        if any(n < 0 for row in ps for n in row):
            raise ValueError("pile sizes must be nonnegative")
        object.__setattr__(self, "piles", ps)

    @property
    def k(self) -> int:
        return len(self.piles[0])


@dataclass(frozen=True)
class IIDMultinomial:
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))

    @property
    def k(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class IIDFromMeasure:
    mu: object
    rounding: str = "multinomial"  # or "largest_remainder"

    def __post_init__(self):
        if self.rounding not in ("multinomial", "largest_remainder"):
            raise ValueError(f"unknown rounding rule: {self.rounding}")

    @property
    def k(self) -> int:
        return self.mu.k


@dataclass(frozen=True)
class UniformCut:
    k = 2


@dataclass(frozen=True)
class ExactBisection:
    k = 2


@dataclass(frozen=True)
class Periodic:
    cycle: tuple  # tuple of proportion tuples; scaled to N by largest remainder

    def __post_init__(self):
        cyc = tuple(tuple(Fraction(x) for x in row) for row in self.cycle)
        if not cyc:
            raise ValueError("cycle must be nonempty")
        for row in cyc:
            if sum(row) != 1:
                raise ValueError(f"cycle proportions must sum to 1, got {row}")
        object.__setattr__(self, "cycle", cyc)

    @property
    def k(self) -> int:
        return len(self.cycle[0])


def gsr() -> IIDMultinomial:
    """The Gilbert-Shannon-Reeds shuffle: binomial(N, 1/2) cuts."""
    return IIDMultinomial((0.5, 0.5))


def process_k(process) -> int:
    return process.k


def cut_sizes(process, N: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """Pile sizes for step t (1-based).  Stochastic processes consume rng."""
    if N < 1:
        raise ValueError("N >= 1 required")
    if isinstance(process, ExplicitSequence):
        row = process.piles[t - 1]
        if sum(row) != N:
            raise SizeMismatch(f"step {t} piles {row} do not sum to N = {N}")
        return np.array(row, dtype=np.int64)
    if isinstance(process, IIDMultinomial):
        return rng.multinomial(N, process.p)
    if isinstance(process, IIDFromMeasure):
        p = sample_point(process.mu, rng)
        if process.rounding == "multinomial":
            return rng.multinomial(N, p)
        return round_largest_remainder(p, N)
    if isinstance(process, UniformCut):
        n = int(rng.integers(0, N + 1))
        return np.array([n, N - n], dtype=np.int64)
    if isinstance(process, ExactBisection):
        return np.array([N // 2, N - N // 2], dtype=np.int64)
    if isinstance(process, Periodic):
        row = process.cycle[(t - 1) % len(process.cycle)]
        return round_largest_remainder([float(x) for x in row], N)
    raise TypeError(f"not a cut process: {process!r}")


def pile_sequence(process, N: int, K: int, rng: np.random.Generator) -> list:
    """Draw the pile sizes for steps 1..K."""
    return [cut_sizes(process, N, t, rng) for t in range(1, K + 1)]


def column_measure(process):
    """The de Finetti mixing measure of a single column's digits, when the
    column law is exchangeable with IID structure: each step draws
    p ~ measure and then IID digits from p.

    Returns a simplex measure, or None when no such representation exists
    (explicit, periodic and bisection processes have hard count
    constraints).  UniformCut is exactly Beta(1, 1): integrating
    q^a (1-q)^b dq over [0,1] gives 1/((N+1) binom(N, a)), the law of a
    uniform cut followed by a uniform arrangement.
    """
    from .measures import Beta  # local import to keep module load light

    if isinstance(process, IIDMultinomial):
        return PointMass(process.p)
    if isinstance(process, IIDFromMeasure) and process.rounding == "multinomial":
        return process.mu
    if isinstance(process, UniformCut):
        return Beta(1.0, 1.0)
    return None


# ---------------------------------------------------------------------------
# Exact step laws for the small-deck enumeration
# ---------------------------------------------------------------------------


def _compositions(N: int, k: int):
    if k == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in _compositions(N - first, k - 1):
            yield (first,) + rest


def _multinomial_coeff(N: int, parts) -> int:
    out = 1
    rest = N
    for n in parts:
        out *= math.comb(rest, n)
        rest -= n
    return out


def enumerate_step_laws(process, N: int, K: int) -> list:
    """For each step t = 1..K, the exact law of the pile sizes as a list of
    (Fraction probability, pile tuple) pairs.

    Probabilities are exact rationals (floats in the process parameters are
    taken at their exact binary values).  Only processes with enumerable
    step laws are supported; IIDFromMeasure needs an atomic measure.
    """
    laws = []
    for t in range(1, K + 1):
        if isinstance(process, ExplicitSequence):
            row = process.piles[t - 1]
            if sum(row) != N:
                raise SizeMismatch(f"step {t} piles {row} do not sum to N = {N}")
            laws.append([(Fraction(1), tuple(row))])
        elif isinstance(process, ExactBisection):
            laws.append([(Fraction(1), (N // 2, N - N // 2))])
        elif isinstance(process, Periodic):
            row = process.cycle[(t - 1) % len(process.cycle)]
            piles = tuple(int(n) for n in round_largest_remainder([float(x) for x in row], N))
            laws.append([(Fraction(1), piles)])
        elif isinstance(process, UniformCut):
            w = Fraction(1, N + 1)
            laws.append([(w, (n, N - n)) for n in range(N + 1)])
        elif isinstance(process, (IIDMultinomial, IIDFromMeasure)):
            if isinstance(process, IIDMultinomial):
                atoms = [(Fraction(1), process.p)]
            else:
                mu = process.mu
                if isinstance(mu, PointMass):
                    atoms = [(Fraction(1), mu.point)]
                elif isinstance(mu, FiniteMixture):
                    atoms = [
                        (Fraction(w), a) for w, a in zip(mu.weights, mu.atoms) if w > 0
                    ]
                else:
                    raise TooLarge(
                        "exact enumeration needs an atomic measure, got "
                        f"{type(mu).__name__}"
                    )
                if process.rounding != "multinomial":
                    laws.append(
                        [
                            (w, tuple(int(n) for n in round_largest_remainder(p, N)))
                            for w, p in atoms
                        ]
                    )
                    continue
            law: dict = {}
            for w_atom, p in atoms:
                pf = [Fraction(x) for x in p]
                for parts in _compositions(N, len(pf)):
                    prob = Fraction(_multinomial_coeff(N, parts))
                    for n_l, p_l in zip(parts, pf):
                        if n_l and p_l == 0:
                            prob = Fraction(0)
                            break
                        prob *= p_l**n_l
                    if prob:
                        law[parts] = law.get(parts, Fraction(0)) + w_atom * prob
            laws.append(sorted((p, c) for c, p in law.items()))
        else:
            raise TypeError(f"not a cut process: {process!r}")
    return laws


def process_from_json(obj: dict):
    """Build a process from JSON.

    Kinds: explicit {piles}; multinomial {p}; measure {measure, rounding?};
    uniform_cut; bisection; periodic {cycle}.
    """
    kind = obj.get("kind")
    if kind == "explicit":
        return ExplicitSequence(tuple(map(tuple, obj["piles"])))
    if kind == "multinomial":
        return IIDMultinomial(tuple(obj["p"]))
    if kind == "measure":
        mu = measure_from_json(obj["measure"])
        return IIDFromMeasure(mu, obj.get("rounding", "multinomial"))
    if kind == "uniform_cut":
        return UniformCut()
    if kind == "bisection":
        return ExactBisection()
    if kind == "periodic":
        return Periodic(tuple(map(tuple, obj["cycle"])))
    raise ValueError(f"unknown process kind: {kind!r}")
