"""Piecewise-affine concave functions standing in for rescaled psi curves.

The class consists of functions f : [1,4] -> R+ with f(1) = 0, f(2) > 0,
f(x)/x nondecreasing, represented as a minimum of affine pieces
f(x) = min_j (a_j x - b_j) with a_j, b_j >= 0.  All arithmetic is exact over
Fractions, which is what lets the non-convexity counterexample assert
Cbar = 1/4 with zero tolerance.

The analogue of the measure constants: theta_f solves f(theta) = 2 f(2),
C_f = (3 + theta_f) / (4 f(2)), C~_f = 1 / f'(4) (left derivative), and
Cbar_f = max of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .errors import CounterexampleFailed, NotInPsiClass, ScaleTooSmall

__all__ = [
    "PiecewiseAffine",
    "make_piecewise_f",
    "theta_and_cbar_of_f",
    "average_f",
    "appendix_f",
    "appendix_f_breve",
    "appendix_f_hat",
    "verify_nonconvexity",
    "NonConvexityReport",
    "discretize_f_to_simplex",
    "SimplexHandle",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    raise TypeError(f"cannot convert {x!r} to Fraction")


@dataclass(frozen=True)
class PiecewiseAffine:
    """f(x) = min_j (a_j x - b_j) on [1, 4], coefficients exact Fractions."""

    pieces: tuple

    def __call__(self, x):
        x = _frac(x)
        return min(a * x - b for a, b in self.pieces)

    def value_float(self, x: float) -> float:
        return min(float(a) * x - float(b) for a, b in self.pieces)

    def active_piece(self, x):
        """The (a, b) achieving the min at x; ties pick the steepest slope,
        which is the piece active immediately to the left of x."""
        x = _frac(x)
        fx = self(x)
        tied = [(a, b) for a, b in self.pieces if a * x - b == fx]
        return max(tied, key=lambda ab: ab[0])

    def breakpoints(self):
        """Envelope switch locations inside (1, 4), sorted ascending."""
        one, four = Fraction(1), Fraction(4)
        pts = set()
        for i, (a1, b1) in enumerate(self.pieces):
            for a2, b2 in self.pieces[i + 1 :]:
                if a1 == a2:
                    continue
                x = (b1 - b2) / (a1 - a2)
                if one < x < four and self(x) == a1 * x - b1:
                    pts.add(x)
        return sorted(pts)


def make_piecewise_f(pieces) -> PiecewiseAffine:
    """Validate pieces [(a_j, b_j)] and wrap them as a class member.

    Raises NotInPsiClass naming the violated invariant.  Duplicate slopes
    are merged to the lower line (larger b), since only that one can ever
    achieve the minimum.
    """
    if not pieces:
        raise NotInPsiClass("need at least one piece")
    raw = [(_frac(a), _frac(b)) for a, b in pieces]
    by_slope: dict = {}
    for a, b in raw:
        if a in by_slope:
            by_slope[a] = max(by_slope[a], b)
        else:
            by_slope[a] = b
    ps = tuple(sorted(by_slope.items()))
    f = PiecewiseAffine(ps)
    for a, b in ps:
        if a < 0:
            raise NotInPsiClass(f"negative slope a = {a}")
        if b < 0:
            raise NotInPsiClass(f"negative intercept b = {b}")
    if f(1) != 0:
        raise NotInPsiClass(f"f(1) = {float(f(1)):g}, must be 0")
    if f(2) <= 0:
        raise NotInPsiClass(f"f(2) = {float(f(2)):g}, must be positive")
    # f(x)/x nondecreasing, checked on the standard millistep grid.  (It is
    # automatic for b_j >= 0, so this is a belt-and-braces validation.)
    xs = np.arange(1000, 4001) / 1000.0
    vals = np.min(
        [float(a) * xs - float(b) for a, b in ps], axis=0
    ) / xs
    if np.any(np.diff(vals) < -1e-12):
        raise NotInPsiClass("f(x)/x decreases somewhere on [1, 4]")
    return f


def theta_and_cbar_of_f(f: PiecewiseAffine, tol: float = 0.0):
    """(theta_f, C_f, C~_f, Cbar_f), all exact Fractions.

    theta_f solves f(theta) = 2 f(2).  On a min of increasing affine pieces
    every piece j gives a_j theta - b_j >= f(theta), so the root is
    theta = max_j (2 f(2) + b_j) / a_j, attained by the active piece; this
    replaces bisection and is exact.  The left derivative at 4 is the slope
    of the piece active on (4 - eps, 4): among pieces tied at x = 4 that is
    the steepest one.
    """
    target = 2 * f(2)
    theta = max((target + b) / a for a, b in f.pieces if a > 0)
    if f(theta) != target:
        raise NotInPsiClass(f"no piece attains f(theta) = {target} at theta = {theta}")
    if not (3 <= theta <= 4):
        raise NotInPsiClass(f"theta = {float(theta):g} escapes [3, 4]")
    C = (3 + theta) / (4 * f(2))
    slope_at_4 = f.active_piece(4)[0]
    C_tilde = Fraction(1) / slope_at_4
    return theta, C, C_tilde, max(C, C_tilde)


def average_f(f: PiecewiseAffine, g: PiecewiseAffine) -> PiecewiseAffine:
    """Pointwise average (f + g) / 2, exact.

    Both inputs are affine between consecutive merged breakpoints, so the
    average on each segment is the affine average of the two active pieces.
    The result is validated like any other class member.
    """
    cuts = sorted(set([Fraction(1)] + f.breakpoints() + g.breakpoints() + [Fraction(4)]))
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        af, bf = f.active_piece(mid)
        ag, bg = g.active_piece(mid)
        pieces.append(((af + ag) / 2, (bf + bg) / 2))
    return make_piecewise_f(pieces)


# ---------------------------------------------------------------------------
# The non-convexity counterexample family
# ---------------------------------------------------------------------------


def appendix_f(eta) -> PiecewiseAffine:
    """The lower member of the counterexample pair.

    Breakpoint form: f(1) = 0, f(2) = 13/2 - eta, f(7/2 - eta) = 13 - 2 eta,
    slope 4 afterwards.  Constructed so that theta_f = 7/2 - eta and
    C_f = C~_f = 1/4 exactly.
    """
    e = _frac(eta)
    a1 = Fraction(13, 2) - e
    a2 = a1 / (Fraction(3, 2) - e)
    b2 = a1 * (Fraction(1, 2) + e) / (Fraction(3, 2) - e)
    return make_piecewise_f([(a1, a1), (a2, b2), (Fraction(4), 1 - 2 * e)])


def appendix_f_breve(eta) -> PiecewiseAffine:
    """The upper member: f(1) = 0, f(2) = 13/2 + eta, then one segment of
    slope (13/2 + eta)/(3/2 + eta) out to x = 4.  Here theta = 7/2 + eta,
    C = 1/4 exactly, and the slope at 4 exceeds 4, so C~ < 1/4."""
    e = _frac(eta)
    a1 = Fraction(13, 2) + e
    a2 = a1 / (Fraction(3, 2) + e)
    b2 = a1 * (Fraction(1, 2) - e) / (Fraction(3, 2) + e)
    return make_piecewise_f([(a1, a1), (a2, b2)])


def appendix_f_hat(eta) -> PiecewiseAffine:
    """The midpoint (f + f-breve)/2 witnessing non-convexity of Cbar."""
    return average_f(appendix_f(eta), appendix_f_breve(eta))


@dataclass(frozen=True)
class NonConvexityReport:
    eta: float
    cbar_f: Fraction
    cbar_breve: Fraction
    cbar_hat: Fraction
    theta_hat: Fraction
    f_hat_35: Fraction
    strict_gap: bool

    @property
    def gap(self) -> Fraction:
        return self.cbar_hat - Fraction(1, 4)


def verify_nonconvexity(eta, tol: float = 0.0) -> NonConvexityReport:
    """Check Cbar_f = Cbar_fbreve = 1/4 exactly while Cbar of the average
    exceeds 1/4 (equivalently theta of the average exceeds 7/2).

    eta = 0 degenerates: the two functions merge and the report carries
    strict_gap = False without raising.  For 0 < eta <= 0.05 any failed
    assertion raises CounterexampleFailed.
    """
    e = _frac(eta)
    if not (0 <= e <= Fraction(1, 20)):
        raise ValueError("eta must lie in [0, 0.05]")
    f = appendix_f(e)
    fb = appendix_f_breve(e)
    fh = average_f(f, fb)
    _, _, _, cbar_f = theta_and_cbar_of_f(f)
    _, _, _, cbar_b = theta_and_cbar_of_f(fb)
    th_h, c_h, ct_h, cbar_h = theta_and_cbar_of_f(fh)
    quarter = Fraction(1, 4)
    report = NonConvexityReport(
        eta=float(e),
        cbar_f=cbar_f,
        cbar_breve=cbar_b,
        cbar_hat=cbar_h,
        theta_hat=th_h,
        f_hat_35=fh(Fraction(7, 2)),
        strict_gap=cbar_h > quarter,
    )
    if e == 0:
        return report
    if cbar_f != quarter:
        raise CounterexampleFailed(f"Cbar_f = {cbar_f}, expected 1/4")
    if cbar_b != quarter:
        raise CounterexampleFailed(f"Cbar_fbreve = {cbar_b}, expected 1/4")
    if not (th_h > Fraction(7, 2)):
        raise CounterexampleFailed(f"theta of the average = {th_h}, expected > 7/2")
    if not report.strict_gap:
        raise CounterexampleFailed(f"Cbar of the average = {cbar_h}, expected > 1/4")
    return report


# ---------------------------------------------------------------------------
# Discretization: realizing f as psi of an explicit simplex point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexHandle:
    """A simplex point too large to materialize, held as grouped coordinates.

    groups: tuple of (log_value, log_multiplicity) pairs, one per piece,
    plus one filler group of equal tiny coordinates absorbing the leftover
    mass.  phi(x) = sum over groups of exp(log_mult + x log_value) is
    evaluated by logsumexp, so coordinate counts like K^10 max(|a|+|b|)
    never overflow.
    """

    log_K: float
    groups: tuple  # (log_value, log_multiplicity)
    filler_log_count: float
    filler_log_value: float

    def log_phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        terms = [lm + x * lv for lv, lm in self.groups]
        terms.append(self.filler_log_count + x * self.filler_log_value)
        return logsumexp(np.stack(terms, axis=0), axis=0)

    def psi(self, x) -> np.ndarray:
        return -self.log_phi(x)

    def psi_over_log_K(self, x) -> np.ndarray:
        return self.psi(x) / self.log_K


def discretize_f_to_simplex(f: PiecewiseAffine, K: float, delta: float = 0.01) -> SimplexHandle:
    """Build a virtual simplex point p with psi_p(x)/log K close to f on [2,4].

    Piece (a_j, b_j) contributes ceil(K^{b_j}) coordinates of value K^{-a_j}.
    Tangent pieces through (1, 0) have a_j = b_j and would claim unit mass,
    so they get the strict-concavity nudge b_j -> b_j - delta (raising that
    line by delta, which only matters where it is active).  The leftover
    mass is spread over K^{10 max_j(|a_j| + |b_j|)} equal filler coordinates.

    Raises ScaleTooSmall when the piece masses reach 1 and leave no filler
    room.
    """
    if K <= 1:
        raise ScaleTooSmall("need K > 1")
    log_K = math.log(K)
    groups = []
    masses = []
    max_ab = 0.0
    for a, b in f.pieces:
        af, bf = float(a), float(b)
        max_ab = max(max_ab, abs(af) + abs(bf))
        if a == b:
            bf -= delta
        log_count = bf * log_K
        if log_count < 40:  # exact ceil while the count is representable
            count = math.ceil(math.exp(log_count))
            log_count = math.log(count)
        log_value = -af * log_K
        groups.append((log_value, log_count))
        masses.append(log_count + log_value)
    piece_mass = float(np.exp(logsumexp(masses)))
    if piece_mass >= 1.0:
        raise ScaleTooSmall(
            f"piece coordinates already carry mass {piece_mass:.3f} at K = e^{log_K:g}"
        )
    filler_log_count = 10.0 * max_ab * log_K
    filler_mass = 1.0 - piece_mass
    filler_log_value = math.log(filler_mass) - filler_log_count
    return SimplexHandle(
        log_K=log_K,
        groups=tuple(groups),
        filler_log_count=filler_log_count,
        filler_log_value=filler_log_value,
    )
