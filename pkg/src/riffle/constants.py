"""Mixing-time constants for cut-size measures.

For a measure mu on the simplex, define

    phi_p(x)  = sum_i p_i^x
    psi_p(x)  = -log phi_p(x)
    psi_mu(x) = E_mu[psi_p(x)]

theta_mu is the unique root of psi_mu(theta) = 2 psi_mu(2) in [3, 4), and the
cutoff constants are

    C_mu     = (3 + theta_mu) / (4 psi_mu(2))
    C~_mu    = 1 / E_mu[log(1 / p_max)]
    Cbar_mu  = max(C_mu, C~_mu),

with cutoff at Cbar_mu log N shuffles.  Measures supported entirely on the
vertex set make every constant infinite; those raise DegenerateMeasure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllZero, DegenerateMeasure, NoBracket, VertexPoint
from .measures import (
    Beta,
    Dirichlet,
    PointMass,
    PrecisionConfig,
    UniformInterval,
    evaluation_rule,
)

__all__ = [
    "phi",
    "psi",
    "psi_mu",
    "solve_theta",
    "entropy_H",
    "info_I",
    "ConstantsBundle",
    "constants_bundle",
    "uniform_point_constants",
    "TABLE1_MEASURES",
    "table1_bundles",
]


def phi(p, x: float) -> float:
    """phi_p(x) = sum_i p_i^x, with 0^x := 0 for x > 0."""
    p = np.asarray(p, dtype=float)
    return float(np.sum(np.where(p > 0, p, 1.0) ** x * (p > 0)))


def psi(p, x: float) -> float:
    """psi_p(x) = -log phi_p(x); zero at x = 1 and at vertices."""
    return -math.log(phi(p, x))


def _psi_rows(points: np.ndarray, x: float) -> np.ndarray:
    # Vectorized psi_p(x) over an (n, k) array of simplex points.
    with np.errstate(divide="ignore"):
        powed = np.where(points > 0, points, 1.0) ** x * (points > 0)
    return -np.log(powed.sum(axis=1))


def psi_mu(mu, x: float, cfg: PrecisionConfig | None = None) -> float:
    """psi_mu(x) = E_mu[psi_p(x)], the expectation of the log (not the log of
    the expectation)."""
    cfg = cfg or PrecisionConfig()
    if getattr(mu, "degenerate", False):
        raise DegenerateMeasure("psi_mu vanishes identically on vertex measures")
    points, weights, _ = evaluation_rule(mu, cfg)
    return float(np.dot(weights, _psi_rows(points, x)))


def solve_theta(mu, cfg: PrecisionConfig | None = None, tol: float = 1e-9) -> float:
    """Root of psi_mu(theta) = 2 psi_mu(2) in [3, 4], by bisection.

    psi_p is strictly increasing in x for non-vertex p, so psi_mu is too, and
    the evaluation rule is fixed once per call: even the Monte-Carlo paths
    give a deterministic, monotone objective.  The root is guaranteed to lie
    in [3, 4); NoBracket means the computed psi values are inconsistent.
    """
    cfg = cfg or PrecisionConfig()
    if getattr(mu, "degenerate", False):
        raise DegenerateMeasure("theta undefined for vertex measures")
    points, weights, _ = evaluation_rule(mu, cfg)

    def f(x: float) -> float:
        return float(np.dot(weights, _psi_rows(points, x)))

    target = 2.0 * f(2.0)
    lo, hi = 3.0, 4.0
    flo, fhi = f(lo) - target, f(hi) - target
    if flo > tol:
        raise NoBracket(f"psi_mu(3) - 2 psi_mu(2) = {flo} > 0")
    if fhi < -tol:
        raise NoBracket(f"psi_mu(4) - 2 psi_mu(2) = {fhi} < 0")
    if flo >= 0:
        return 3.0  # root clamped at the left endpoint
    if fhi <= 0:
        return 4.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(mid) - target <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def entropy_H(a) -> float:
    """H(a) = sum_i a_i log(a_i / a_tot) / a_tot, the sign convention with
    H <= 0.  Zero entries contribute zero.  Use -entropy_H for the usual
    nonnegative entropy."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("entropy needs nonnegative weights")
    tot = a.sum()
    if tot <= 0:
        raise AllZero("all weights are zero")
    q = a[a > 0] / tot
    return float(np.sum(q * np.log(q)))


def info_I(p, t: float) -> float:
    """I(p, p^t) = sum_i p_i^t log(1/p_i) / phi_p(t) > 0.

    Equals D_KL(p^t || p) plus the entropy of p^t (nonnegative convention);
    it collapses to log k for the uniform point and is undefined at vertices.
    """
    p = np.asarray(p, dtype=float)
    if np.max(p) >= 1.0:
        raise VertexPoint("information functional undefined at a vertex")
    mask = p > 0
    num = float(np.sum(p[mask] ** t * np.log(1.0 / p[mask])))
    return num / phi(p, t)


@dataclass(frozen=True)
class ConstantsBundle:
    theta: float
    psi2: float
    C: float
    C_tilde: float
    C_bar: float
    method_note: str = ""

    def __post_init__(self):
        if not (3.0 - 1e-9 <= self.theta <= 4.0):
            raise ValueError(f"theta = {self.theta} outside [3, 4]")
        if abs(self.C - (3.0 + self.theta) / (4.0 * self.psi2)) > 1e-9 * max(1.0, self.C):
            raise ValueError("C inconsistent with (3 + theta) / (4 psi2)")
        if self.C_bar != max(self.C, self.C_tilde):
            raise ValueError("C_bar must be max(C, C_tilde)")

    def as_row(self) -> dict:
        return {
            "theta": self.theta,
            "psi2": self.psi2,
            "C": self.C,
            "C_tilde": self.C_tilde,
            "C_bar": self.C_bar,
        }


def _log_inv_pmax_rows(points: np.ndarray) -> np.ndarray:
    return -np.log(points.max(axis=1))


def constants_bundle(mu, cfg: PrecisionConfig | None = None, tol: float = 1e-9) -> ConstantsBundle:
    """Assemble (theta, psi_mu(2), C, C~, Cbar) for a measure.

    Also self-checks that the two closed forms of C agree:
    (3 + theta)/(4 psi_mu(2)) = (3 + theta)/(2 psi_mu(theta)) at the solved
    root.  Raises DegenerateMeasure for vertex-supported measures, where the
    convention is Cbar = infinity (no finite number of shuffles mixes).
    """
    cfg = cfg or PrecisionConfig()
    if getattr(mu, "degenerate", False):
        raise DegenerateMeasure(
            "measure lives on the vertex set: E log(1/p_max) = 0, Cbar = inf"
        )
    points, weights, mc = evaluation_rule(mu, cfg)
    psi2 = float(np.dot(weights, _psi_rows(points, 2.0)))
    theta = solve_theta(mu, cfg, tol=tol)
    psi_theta = float(np.dot(weights, _psi_rows(points, theta)))
    C = (3.0 + theta) / (4.0 * psi2)
    C_alt = (3.0 + theta) / (2.0 * psi_theta)
    if abs(C - C_alt) > 1e-6 * max(abs(C), 1.0):
        raise NoBracket(f"C self-check failed: {C} vs {C_alt}")
    inv = float(np.dot(weights, _log_inv_pmax_rows(points)))
    if inv <= 0:
        raise DegenerateMeasure("E log(1/p_max) = 0, Cbar = inf")
    C_tilde = 1.0 / inv
    if mc:
        note = f"MC {len(points)} samples, seed {cfg.seed}"
    else:
        note = f"quadrature {cfg.quadrature_nodes} nodes"
    return ConstantsBundle(theta, psi2, C, C_tilde, max(C, C_tilde), note)


def uniform_point_constants(k: int) -> ConstantsBundle:
    """Closed form for the point mass at the uniform cut (1/k, ..., 1/k):
    theta = 3, psi2 = log k, C = 3/(2 log k), C~ = 1/log k."""
    lk = math.log(k)
    return ConstantsBundle(3.0, lk, 1.5 / lk, 1.0 / lk, 1.5 / lk, "closed form")


# The ten built-in rows of the constants table, in presentation order.
TABLE1_MEASURES: tuple = (
    ("Beta(1,1)", Beta(1.0, 1.0)),
    ("Beta(1/2,1/2)", Beta(0.5, 0.5)),
    ("Beta(2,2)", Beta(2.0, 2.0)),
    ("Beta(2,16)", Beta(2.0, 16.0)),
    ("Unif[1/4,3/4]", UniformInterval(0.25, 0.75)),
    ("Dirichlet(1,1,1)", Dirichlet((1.0, 1.0, 1.0))),
    ("Dirichlet(1/2,1/2,1/2)", Dirichlet((0.5, 0.5, 0.5))),
    ("Dirichlet(2,2,2)", Dirichlet((2.0, 2.0, 2.0))),
    ("Dirichlet(1,1,1,1)", Dirichlet((1.0, 1.0, 1.0, 1.0))),
    ("Point(1/2,1/2)", PointMass((0.5, 0.5))),
)


def table1_bundles(cfg: PrecisionConfig | None = None):
    """Compute the full built-in table; returns list of (name, k, bundle)."""
    cfg = cfg or PrecisionConfig()
    return [(name, mu.k, constants_bundle(mu, cfg)) for name, mu in TABLE1_MEASURES]
