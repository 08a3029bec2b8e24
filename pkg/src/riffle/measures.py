"""Probability measures on the simplex D_k and expectations against them.

A measure is one of six variants: a point mass, a finite mixture of points,
Beta(a, b) on the 2-simplex (p = (q, 1-q) with q ~ Beta), Dirichlet on the
k-simplex, the uniform distribution on a sub-interval of the 2-simplex, or an
empirical sample.  Expectations use deterministic quadrature for the 1-D
families and seeded Monte Carlo for Dirichlet/empirical, so every result is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, roots_jacobi, roots_legendre

from .errors import DegenerateMeasure, InvalidChi
from .rng import stream

__all__ = [
    "PointMass",
    "FiniteMixture",
    "Beta",
    "Dirichlet",
    "UniformInterval",
    "Empirical",
    "PrecisionConfig",
    "as_simplex_point",
    "p_max",
    "sample_point",
    "evaluation_rule",
    "expect_functional",
    "CellDecomposition",
    "discretize_measure",
    "is_point_degenerate",
    "measure_from_json",
]

_SUM_TOL = 1e-12


def as_simplex_point(coords) -> np.ndarray:
    """Validate and return a simplex point as a float array."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("simplex point must be a 1-D sequence of length >= 2")
    if np.any(p < -_SUM_TOL) or np.any(p > 1 + _SUM_TOL):
        raise ValueError(f"coordinates outside [0,1]: {p}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"coordinates sum to {p.sum()}, not 1")
    return np.clip(p, 0.0, 1.0)


def p_max(point) -> tuple[float, int]:
    """Largest coordinate of a simplex point and its index.

    Ties break to the lowest index (argmax's convention), matching the
    deterministic tie rule used everywhere in this package.
    """
    p = np.asarray(point, dtype=float)
    idx = int(np.argmax(p))
    return float(p[idx]), idx


def is_point_degenerate(point, tol: float = _SUM_TOL) -> bool:
    """True when the point is a simplex vertex (some coordinate is 1)."""
    return bool(np.max(point) >= 1.0 - tol)


@dataclass(frozen=True)
class PointMass:
    point: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(as_simplex_point(self.point)))

    @property
    def k(self) -> int:
        return len(self.point)

    @property
    def degenerate(self) -> bool:
        return is_point_degenerate(self.point)


@dataclass(frozen=True)
class FiniteMixture:
    weights: tuple
    atoms: tuple
    cells: "CellDecomposition | None" = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        atoms = tuple(tuple(as_simplex_point(a)) for a in self.atoms)
        if len(atoms) != len(w):
            raise ValueError("weights and atoms differ in length")
        ks = {len(a) for a in atoms}
        if len(ks) != 1:
            raise ValueError("mixture atoms must share a common dimension")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "atoms", atoms)

    @property
    def k(self) -> int:
        return len(self.atoms[0])

    @property
    def degenerate(self) -> bool:
        labels = getattr(self, "cell_labels", None)
        if labels is not None:
            # Discretized mixture: cap representatives sit strictly inside
            # the simplex, so judge by the cell labels instead of the atoms.
            return all(
                lab[0] == "cap" for lab, w in zip(labels, self.weights) if w > 0
            )
        return all(
            is_point_degenerate(a) for a, w in zip(self.atoms, self.weights) if w > 0
        )


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Beta parameters must be positive")

    k = 2
    degenerate = False


@dataclass(frozen=True)
class Dirichlet:
    alphas: tuple

    def __post_init__(self):
        al = tuple(float(a) for a in self.alphas)
        if len(al) < 2 or any(a <= 0 for a in al):
            raise ValueError("Dirichlet needs >= 2 positive parameters")
        object.__setattr__(self, "alphas", al)

    @property
    def k(self) -> int:
        return len(self.alphas)

    degenerate = False


@dataclass(frozen=True)
class UniformInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError("need 0 <= lo < hi <= 1")

    k = 2
    degenerate = False


@dataclass(frozen=True)
class Empirical:
    samples: tuple

    def __post_init__(self):
        pts = tuple(tuple(as_simplex_point(s)) for s in self.samples)
        if not pts:
            raise ValueError("empirical measure needs at least one sample")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("samples must share a common dimension")
        object.__setattr__(self, "samples", pts)

    @property
    def k(self) -> int:
        return len(self.samples[0])

    @property
    def degenerate(self) -> bool:
        return all(is_point_degenerate(s) for s in self.samples)


SimplexMeasure = (PointMass, FiniteMixture, Beta, Dirichlet, UniformInterval, Empirical)


@dataclass(frozen=True)
class PrecisionConfig:
    quadrature_nodes: int = 256
    mc_samples: int = 1_000_000
    seed: int = 20260214

    def __post_init__(self):
        if self.quadrature_nodes < 2:
            raise ValueError("quadrature_nodes >= 2 required")
        if self.mc_samples < 1:
            raise ValueError("mc_samples >= 1 required")


def sample_point(mu, rng: np.random.Generator) -> np.ndarray:
    """Draw one point p ~ mu."""
    if isinstance(mu, PointMass):
        return np.array(mu.point)
    if isinstance(mu, FiniteMixture):
        i = rng.choice(len(mu.weights), p=np.asarray(mu.weights))
        return np.array(mu.atoms[i])
    if isinstance(mu, Beta):
        q = rng.beta(mu.a, mu.b)
        return np.array([q, 1.0 - q])
    if isinstance(mu, Dirichlet):
        return rng.dirichlet(mu.alphas)
    if isinstance(mu, UniformInterval):
        q = rng.uniform(mu.lo, mu.hi)
        return np.array([q, 1.0 - q])
    if isinstance(mu, Empirical):
        i = rng.integers(len(mu.samples))
        return np.array(mu.samples[i])
    raise TypeError(f"not a simplex measure: {mu!r}")


def _beta_rule(a: float, b: float, n: int):
    # Gauss-Jacobi absorbs the q^(a-1) (1-q)^(b-1) density into the rule's
    # weight function, so endpoint singularities (a or b < 1) cost nothing.
    # roots_jacobi works on [-1, 1] with weight (1-x)^alpha (1+x)^beta;
    # mapping q = (1+x)/2 sends beta -> a-1 and alpha -> b-1.
    x, w = roots_jacobi(n, b - 1.0, a - 1.0)
    q = 0.5 * (1.0 + x)
    w = w * 0.5 ** (a + b - 1.0) / np.exp(betaln(a, b))
    return q, w / w.sum()


def evaluation_rule(mu, cfg: PrecisionConfig):
    """Points and weights such that E_mu[g] ~= sum w_i g(points_i).

    The rule is a pure function of (mu, cfg).  The constants solver calls it
    once and reuses the same points across every evaluation, which keeps
    Monte-Carlo noise common across bisection steps (the empirical psi stays
    monotone in x, so bisection converges).

    Returns (points, weights, mc) where points is (n, k), weights sums to 1,
    and mc flags the Monte-Carlo paths.
    """
    if isinstance(mu, PointMass):
        return np.array([mu.point]), np.array([1.0]), False
    if isinstance(mu, FiniteMixture):
        return np.array(mu.atoms), np.asarray(mu.weights, dtype=float), False
    if isinstance(mu, Empirical):
        pts = np.array(mu.samples)
        return pts, np.full(len(pts), 1.0 / len(pts)), False
    if isinstance(mu, Beta):
        q, w = _beta_rule(mu.a, mu.b, cfg.quadrature_nodes)
        return np.column_stack([q, 1.0 - q]), w, False
    if isinstance(mu, UniformInterval):
        x, w = roots_legendre(cfg.quadrature_nodes)
        q = mu.lo + (mu.hi - mu.lo) * 0.5 * (1.0 + x)
        return np.column_stack([q, 1.0 - q]), w / w.sum(), False
    if isinstance(mu, Dirichlet):
        rng = stream(cfg.seed, 0xD1)
        pts = rng.dirichlet(mu.alphas, size=cfg.mc_samples)
        # A draw that lands exactly on a vertex (possible in floating point
        # for small alphas) is redrawn; the event has probability zero.
        for _ in range(100):
            bad = pts.max(axis=1) >= 1.0
            if not bad.any():
                break
            pts[bad] = rng.dirichlet(mu.alphas, size=int(bad.sum()))
        n = len(pts)
        return pts, np.full(n, 1.0 / n), True
    raise TypeError(f"not a simplex measure: {mu!r}")


def _apply(g, points: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(g(points), dtype=float)
        if vals.shape == (len(points),):
            return vals
    except Exception:
        pass
    return np.array([float(g(p)) for p in points])


def expect_functional(mu, g, cfg: PrecisionConfig | None = None, with_error: bool = False):
    """E_mu[g(p)] by quadrature (Beta / UniformInterval / atoms) or seeded MC.

    ``g`` is called on a single point; passing an (n, k) array and returning
    n values also works and is much faster for the MC paths.  With
    ``with_error=True`` the return value is (estimate, standard_error); the
    deterministic paths report 0.0 error.
    """
    cfg = cfg or PrecisionConfig()
    if getattr(mu, "degenerate", False):
        raise DegenerateMeasure("measure is supported on the vertex set")
    points, weights, mc = evaluation_rule(mu, cfg)
    vals = _apply(g, points)
    est = float(np.dot(weights, vals))
    if not with_error:
        return est
    if mc:
        n = len(vals)
        se = float(vals.std(ddof=1) / np.sqrt(n)) if n > 1 else float("inf")
    else:
        se = 0.0
    return est, se


# ---------------------------------------------------------------------------
# Cell decomposition of the simplex (vertex caps + small interior cells)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellDecomposition:
    """Partition of D_k into k vertex caps plus interior cells of diameter
    at most chi^2.

    Vertex caps are L-infinity balls {p : p_i > 1 - chi}; because
    d(p, v_i) = 1 - p_i on the simplex they are disjoint as soon as
    chi <= 1/2.  The interior remainder is cut by a regular grid of mesh
    chi^2 on the first k-1 coordinates; for k >= 3 each grid box is further
    split into (k-1)! Kuhn simplices by the ordering of coordinate
    fractional parts, which keeps every cell convex.
    """

    k: int
    chi: float

    def __post_init__(self):
        if not (0 < self.chi < 0.5):
            raise InvalidChi(f"vertex caps of radius {self.chi} overlap")

    @property
    def mesh(self) -> float:
        return self.chi * self.chi

    def cell_of(self, point) -> tuple:
        """Label of the cell containing the point.

        Labels are ('cap', i) for vertex caps and
        ('box', floor indices, fractional ranking) for interior cells.
        """
        p = np.asarray(point, dtype=float)
        m, i = p.max(), int(np.argmax(p))
        if m > 1.0 - self.chi:
            return ("cap", i)
        y = p[:-1] / self.mesh
        base = np.floor(y).astype(int)
        frac = y - base
        order = tuple(int(j) for j in np.argsort(-frac, kind="stable"))
        return ("box", tuple(int(b) for b in base), order)

    def representative(self, label, points=None) -> np.ndarray:
        """A point interior to the labeled cell.

        For vertex caps the representative sits halfway into the cap along
        the segment toward the barycenter; for boxes it is the mean of the
        member points when given, else the box center projected to the cell.
        """
        k = self.k
        if label[0] == "cap":
            i = label[1]
            v = np.zeros(k)
            v[i] = 1.0
            bary = np.full(k, 1.0 / k)
            t = 0.5 * self.chi / (1.0 - 1.0 / k)
            return (1 - t) * v + t * bary
        if points is not None and len(points):
            return np.mean(points, axis=0)
        base = np.asarray(label[1], dtype=float)
        head = (base + 0.5) * self.mesh
        return np.append(head, 1.0 - head.sum())


def discretize_measure(mu, chi: float, cfg: PrecisionConfig | None = None) -> FiniteMixture:
    """Finite-mixture approximation of mu over the chi-cell decomposition.

    Atom i is a representative point of cell D_i and its weight is mu(D_i)
    (exact for atomic measures, Monte-Carlo counting otherwise).  The
    returned mixture carries the decomposition in its ``cells`` field.
    """
    cfg = cfg or PrecisionConfig()
    k = mu.k
    cells = CellDecomposition(k, chi)
    if isinstance(mu, PointMass):
        pts, w = np.array([mu.point]), np.array([1.0])
    elif isinstance(mu, FiniteMixture):
        pts, w = np.array(mu.atoms), np.asarray(mu.weights, dtype=float)
    elif isinstance(mu, Empirical):
        pts = np.array(mu.samples)
        w = np.full(len(pts), 1.0 / len(pts))
    else:
        rng = stream(cfg.seed, 0xCE)
        n = cfg.mc_samples
        if isinstance(mu, Beta):
            q = rng.beta(mu.a, mu.b, size=n)
            pts = np.column_stack([q, 1.0 - q])
        elif isinstance(mu, UniformInterval):
            q = rng.uniform(mu.lo, mu.hi, size=n)
            pts = np.column_stack([q, 1.0 - q])
        elif isinstance(mu, Dirichlet):
            pts = rng.dirichlet(mu.alphas, size=n)
        else:
            raise TypeError(f"not a simplex measure: {mu!r}")
        w = np.full(n, 1.0 / n)

    groups: dict = {}
    for p, wi in zip(pts, w):
        if wi == 0:
            continue
        lab = cells.cell_of(p)
        acc = groups.setdefault(lab, [0.0, []])
        acc[0] += wi
        acc[1].append(p)
    labels = sorted(groups)
    weights = np.array([groups[lab][0] for lab in labels])
    atoms = [cells.representative(lab, groups[lab][1]) for lab in labels]
    mix = FiniteMixture(tuple(weights / weights.sum()), tuple(map(tuple, atoms)), cells=cells)
    object.__setattr__(mix, "cell_labels", tuple(labels))
    return mix


# ---------------------------------------------------------------------------
# JSON parsing
# ---------------------------------------------------------------------------


def measure_from_json(obj: dict):
    """Build a measure from its JSON description.

    Kinds: beta {a, b}; dirichlet {alphas}; point {coords};
    mixture {weights, atoms}; uniform_interval {lo, hi}; empirical {samples}.
    """
    kind = obj.get("kind")
    if kind == "beta":
        return Beta(float(obj["a"]), float(obj["b"]))
    if kind == "dirichlet":
        return Dirichlet(tuple(obj["alphas"]))
    if kind == "point":
        return PointMass(tuple(obj["coords"]))
    if kind == "mixture":
        return FiniteMixture(tuple(obj["weights"]), tuple(map(tuple, obj["atoms"])))
    if kind == "uniform_interval":
        return UniformInterval(float(obj["lo"]), float(obj["hi"]))
    if kind == "empirical":
        return Empirical(tuple(map(tuple, obj["samples"])))
    raise ValueError(f"unknown measure kind: {kind!r}")
