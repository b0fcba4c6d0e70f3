import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx.geometry import (ArcSums, UnsupportedDimension, arc_halfwidth, ball_measure, circle_ball_measure, inner,
                          koranyi, make_ball_quadrature, make_graded_circle_quadrature, make_sphere_quadrature,
                          ni_distance, random_ball, random_sphere, region_contains, sphere_moment, tent,
                          tent_aperture_for, unitary_to)

# frozen: k! (n-1)! / (n+k-1)!
MOMENTS = {(1, 3): 1.0, (2, 1): 0.5, (2, 3): 0.25, (2, 6): 1 / 7}


@pytest.mark.parametrize("n,k", sorted(MOMENTS))
def test_sphere_moment_closed_form(n, k):
    assert sphere_moment(n, k) == pytest.approx(MOMENTS[(n, k)], rel=1e-15)


@pytest.mark.parametrize("n,res", [(1, 64), (2, 32)])
def test_rules_integrate_moments(n, res):
    q = make_sphere_quadrature(n, res)
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-14)
    a = np.abs(q.nodes[:, 0]) ** 2
    for k in range(7):
        assert float(q.integrate(a ** k)) == pytest.approx(sphere_moment(n, k), abs=1e-12)


def test_nodes_on_sphere():
    q = make_sphere_quadrature(2, 16)
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0)


def test_unsupported_dimension():
    with pytest.raises(UnsupportedDimension):
        make_sphere_quadrature(3, 8)
    with pytest.raises(ValueError):
        make_sphere_quadrature(1, 0)


def test_circle_ball_measure_oracle():
    # (2/pi) asin(r^2/2), precomputed
    assert circle_ball_measure(1.0) == pytest.approx(1 / 3, rel=1e-14)
    assert circle_ball_measure(0.5) == pytest.approx(0.0797861753495, rel=1e-11)
    assert circle_ball_measure(2.0) == 1.0


@given(st.floats(0.05, 1.4))
def test_quadrature_ball_measure_converges(r):
    q = make_sphere_quadrature(1, 8192)
    assert ball_measure(np.array([1.0 + 0j]), r, q) == pytest.approx(circle_ball_measure(r), abs=2 / 8192)


def test_graded_rule_integrates_singular_power():
    g = make_graded_circle_quadrature(256, 1e-96)
    th = g.angles
    # int |2 sin(t/2)|^(-1/2) dt/2pi = Gamma(1/2)/Gamma(3/4)^2
    exact = math.gamma(0.5) / math.gamma(0.75) ** 2
    assert float(g.integrate(np.abs(2 * np.sin(th / 2)) ** -0.5)) == pytest.approx(exact, rel=1e-7)


@given(st.integers(0, 10_000), st.floats(1e-6, 3.3), st.floats(-7, 7))
def test_arc_sums_match_brute_force(seed, half, theta):
    q = make_graded_circle_quadrature(32, 1e-12)
    v = np.random.default_rng(seed).random(q.size)
    arcs = ArcSums(q)
    got = float(arcs.sums(v, np.array(theta), np.array(half)))
    d = np.angle(np.exp(1j * (q.angles - theta)))
    want = v[np.abs(d) < half].sum() if half < np.pi else v.sum()
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_arc_halfwidth_is_ball():
    rho = np.array([0.3, 1.0, 1.5])
    h = arc_halfwidth(rho)
    assert np.allclose(np.sqrt(2 * np.sin(h[:2] / 2) * 2 * np.sin(h[:2] / 2) / 2 * 2) ** 1, np.sqrt(2 * (1 - np.cos(h[:2]))))
    assert h[2] == np.pi
    # a point at angle just inside the half-width is within distance rho
    assert ni_distance(np.array([np.exp(1j * 0.999 * h[0])]), np.array([1.0 + 0j])) < rho[0]


@given(st.integers(0, 10_000))
def test_ni_distance_quasi_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_sphere(2, 3, rng)
    assert ni_distance(a, c) <= ni_distance(a, b) + ni_distance(b, c) + 1e-12


@given(st.integers(0, 10_000), st.sampled_from([0.75, 1.0, 4.0]))
def test_koranyi_inside_tent(seed, alpha):
    rng = np.random.default_rng(seed)
    zeta = random_sphere(2, 1, rng)[0]
    z = random_ball(2, 2000, rng)
    inK = region_contains(koranyi(alpha, zeta), z)
    inT = region_contains(tent(tent_aperture_for(alpha), zeta), z)
    assert np.all(inT[inK])


def test_koranyi_aperture_validation():
    with pytest.raises(ValueError):
        koranyi(0.5, np.array([1.0 + 0j]))


@given(st.integers(0, 10_000))
def test_unitary_to(seed):
    zeta = random_sphere(2, 1, np.random.default_rng(seed))[0]
    U = unitary_to(zeta)
    assert np.allclose(U @ np.array([1, 0]), zeta)
    assert np.allclose(U.conj().T @ U, np.eye(2))
    assert abs(inner(U @ np.array([0.3, 0.4j]), zeta) - 0.3) < 1e-12


def test_ball_quadrature_volume():
    bq = make_ball_quadrature(make_sphere_quadrature(2, 16), 24, outer=0.5)
    assert float(bq.integrate(np.ones(bq.size))) == pytest.approx(0.5 ** 4, rel=1e-12)
    with pytest.raises(ValueError):
        make_ball_quadrature(make_sphere_quadrature(1, 16), 0)
