import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riffle.constants import (
    TABLE1_MEASURES,
    ConstantsBundle,
    constants_bundle,
    entropy_H,
    info_I,
    phi,
    psi,
    psi_mu,
    solve_theta,
    table1_bundles,
    uniform_point_constants,
)
from riffle.errors import AllZero, DegenerateMeasure, VertexPoint
from riffle.measures import Beta, Dirichlet, PointMass, PrecisionConfig, UniformInterval


def test_phi_and_psi_basics():
    p = (0.2, 0.3, 0.5)
    assert phi(p, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert psi(p, 1.0) == pytest.approx(0.0, abs=1e-15)
    # Zero coordinates contribute nothing, matching the 0^x := 0 convention.
    assert phi((0.5, 0.5, 0.0), 2.0) == pytest.approx(0.5)
    # Uniform point: phi = k^(1-x), so psi = (x-1) log k.
    k = 4
    u = (1.0 / k,) * k
    for x in (1.5, 2.0, 3.0, 3.7):
        assert psi(u, x) == pytest.approx((x - 1) * math.log(k), rel=1e-12)


def test_entropy_and_information():
    assert entropy_H((1.0, 1.0)) == pytest.approx(-math.log(2))
    assert entropy_H((2.0, 0.0, 0.0)) == pytest.approx(0.0)
    with pytest.raises(AllZero):
        entropy_H((0.0, 0.0))
    # At the uniform point the information functional is log k for every t.
    for t in (1.0, 2.0, 3.5):
        assert info_I((0.25,) * 4, t) == pytest.approx(math.log(4), rel=1e-12)
    with pytest.raises(VertexPoint):
        info_I((1.0, 0.0), 2.0)


def test_uniform_point_closed_form():
    for k in range(2, 11):
        b = uniform_point_constants(k)
        assert abs(b.theta - 3.0) < 1e-8
        assert b.psi2 == pytest.approx(math.log(k), rel=1e-12)
        assert b.C == pytest.approx(3.0 / (2.0 * math.log(k)), rel=1e-12)
        assert b.C_tilde == pytest.approx(1.0 / math.log(k), rel=1e-12)
        assert b.C_bar == pytest.approx(b.C, rel=1e-12)


def test_uniform_point_matches_generic_solver():
    for k in (2, 3, 5):
        closed = uniform_point_constants(k)
        solved = constants_bundle(PointMass((1.0 / k,) * k))
        assert solved.theta == pytest.approx(closed.theta, abs=1e-8)
        assert solved.C == pytest.approx(closed.C, rel=1e-9)
        assert solved.C_tilde == pytest.approx(closed.C_tilde, rel=1e-9)


def test_skewed_point_mass_root():
    # Independent root for psi_p(theta) = 2 psi_p(2) at p = (0.9, 0.1),
    # frozen from a scipy.optimize.brentq run at 1e-12 tolerance.
    b = constants_bundle(PointMass((0.9, 0.1)))
    assert b.theta == pytest.approx(3.7694839639, abs=1e-7)
    assert b.psi2 == pytest.approx(-math.log(0.81 + 0.01), rel=1e-12)
    assert b.C == pytest.approx((3.0 + b.theta) / (4.0 * b.psi2), rel=1e-9)
    assert b.C_tilde == pytest.approx(1.0 / math.log(1.0 / 0.9), rel=1e-9)
    assert b.C_bar == max(b.C, b.C_tilde)


# Reference values computed independently with adaptive quadrature
# (scipy.integrate.quad at 1e-13 relative tolerance) for the continuous
# measures, and with a 10^7-sample Monte Carlo run for the Dirichlet rows.
QUADRATURE_ROWS = {
    "Beta(1,1)": (3.19660, 0.42924, 3.60944, 3.25889),
    "Beta(1/2,1/2)": (3.23684, 0.31665, 4.92337, 4.54444),
    "Beta(2,2)": (3.14880, 0.52511, 2.92762, 2.56286),
    "Beta(2,16)": (3.59298, 0.21564, 7.64487, 8.24363),
    "Unif[1/4,3/4]": (3.09646, 0.61536, 2.47662, 2.09749),
}
MC_ROWS = {
    "Dirichlet(1,1,1)": (3.1892, 0.7230, 2.1400, 1.9267),
    "Dirichlet(1/2,1/2,1/2)": (3.2313, 0.5518, 2.8232, 2.6012),
    "Dirichlet(2,2,2)": (3.1404, 0.8637, 1.7774, 1.5497),
    "Dirichlet(1,1,1,1)": (3.1834, 0.9474, 1.6317, 1.4655),
}


def test_catalog_has_ten_measures():
    assert len(TABLE1_MEASURES) == 10
    names = [name for name, _ in TABLE1_MEASURES]
    assert names[-1] == "Point(1/2,1/2)"
    assert set(QUADRATURE_ROWS) | set(MC_ROWS) == set(names[:-1])


@pytest.mark.parametrize("name,expected", sorted(QUADRATURE_ROWS.items()))
def test_quadrature_measures_match_reference(name, expected):
    mu = dict(TABLE1_MEASURES)[name]
    b = constants_bundle(mu)
    theta, psi2, C, C_tilde = expected
    assert b.theta == pytest.approx(theta, abs=2e-3)
    assert b.psi2 == pytest.approx(psi2, abs=2e-3)
    assert b.C == pytest.approx(C, abs=2e-3)
    assert b.C_tilde == pytest.approx(C_tilde, abs=2e-3)
    assert b.C_bar == max(b.C, b.C_tilde)


@pytest.mark.parametrize("name,expected", sorted(MC_ROWS.items()))
def test_monte_carlo_measures_match_reference(name, expected):
    mu = dict(TABLE1_MEASURES)[name]
    b = constants_bundle(mu)
    theta, psi2, C, C_tilde = expected
    assert b.theta == pytest.approx(theta, abs=6e-3)
    assert b.psi2 == pytest.approx(psi2, abs=6e-3)
    assert b.C == pytest.approx(C, abs=6e-3)
    assert b.C_tilde == pytest.approx(C_tilde, abs=6e-3)


def test_table1_bundles_agree_with_direct_calls():
    rows = table1_bundles()
    assert len(rows) == 10
    by_name = {name: (k, b) for name, k, b in rows}
    assert by_name["Dirichlet(1,1,1,1)"][0] == 4
    direct = constants_bundle(dict(TABLE1_MEASURES)["Beta(2,2)"])
    assert by_name["Beta(2,2)"][1].theta == pytest.approx(direct.theta, abs=1e-12)
    assert isinstance(by_name["Point(1/2,1/2)"][1], ConstantsBundle)


def test_coordinate_permutation_invariance():
    a = constants_bundle(PointMass((0.2, 0.3, 0.5)))
    b = constants_bundle(PointMass((0.5, 0.2, 0.3)))
    assert a.theta == pytest.approx(b.theta, abs=1e-12)
    assert a.C == pytest.approx(b.C, rel=1e-12)
    assert a.C_tilde == pytest.approx(b.C_tilde, rel=1e-12)


def test_node_doubling_is_stable():
    coarse = constants_bundle(Beta(1.0, 1.0), PrecisionConfig(quadrature_nodes=256))
    fine = constants_bundle(Beta(1.0, 1.0), PrecisionConfig(quadrature_nodes=512))
    assert fine.theta == pytest.approx(coarse.theta, abs=1e-6)
    assert fine.C == pytest.approx(coarse.C, abs=1e-6)
    assert fine.C_tilde == pytest.approx(coarse.C_tilde, abs=1e-4)


def test_vertex_measures_are_rejected():
    with pytest.raises(DegenerateMeasure):
        solve_theta(PointMass((1.0, 0.0)))
    with pytest.raises(DegenerateMeasure):
        constants_bundle(PointMass((0.0, 0.0, 1.0)))


def test_psi_mu_on_interval_measure():
    # Unif[1/4,3/4] at x = 2: E[-log(q^2 + (1-q)^2)] has value 0.61536
    # (adaptive quadrature, also the psi2 entry of its reference row).
    val = psi_mu(UniformInterval(0.25, 0.75), 2.0)
    assert val == pytest.approx(0.61536, abs=2e-3)


@st.composite
def interior_points(draw, k_max=4):
    k = draw(st.integers(min_value=2, max_value=k_max))
    raw = draw(
        st.lists(
            st.floats(min_value=0.05, max_value=1.0),
            min_size=k,
            max_size=k,
        )
    )
    arr = np.asarray(raw)
    return tuple(arr / arr.sum())


@given(p=interior_points())
@settings(max_examples=40, deadline=None)
def test_theta_lies_in_bracket_and_psi_is_monotone(p):
    mu = PointMass(p)
    theta = solve_theta(mu)
    assert 3.0 <= theta <= 4.0
    xs = np.linspace(1.0, 4.0, 7)
    vals = [psi_mu(mu, float(x)) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@given(p=interior_points(k_max=3))
@settings(max_examples=25, deadline=None)
def test_bundle_internal_identities(p):
    b = constants_bundle(PointMass(p))
    assert b.C == pytest.approx((3.0 + b.theta) / (4.0 * b.psi2), rel=1e-9)
    assert b.C_bar == max(b.C, b.C_tilde)
    assert b.psi2 > 0
