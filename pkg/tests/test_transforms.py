import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx.funcrep import PolyFunc
from bhx.geometry import make_ball_quadrature, make_sphere_quadrature, random_ball, random_sphere, tent_aperture_for
from bhx.transforms import (GridFunc, SquareFunctionSpec, area_sums, carleson_from_bmoa, density, export_csv,
                            g_function, poisson_integral, poisson_integral_many, square_function, tent_functional,
                            volterra)

z = PolyFunc.coordinate(1, 0)

# k / sqrt((2k+1)(2k+2)), frozen
G_MONOMIAL = {1: 0.288675134595, 2: 0.365148371670, 3: 0.400891862869, 4: 0.421637021356, 5: 0.435194139889}


@pytest.mark.parametrize("k", sorted(G_MONOMIAL))
def test_g_function_monomials(k):
    zeta = random_sphere(1, 3, np.random.default_rng(k))
    g = g_function(PolyFunc.monomial(1, (k,)), zeta)
    assert np.allclose(g, G_MONOMIAL[k], atol=1e-6)


def test_poisson_reproduces_holomorphic(rng):
    q = make_sphere_quadrature(2, 128)
    f = PolyFunc.random_holomorphic(2, 5, rng)
    pts = random_ball(2, 10, rng, rmax=0.8)
    got = poisson_integral(GridFunc.from_function(q, f), pts)
    assert np.allclose(got, f(pts), atol=1e-8)
    many = poisson_integral_many(q, np.stack([f(q.nodes), 2 * f(q.nodes)]), pts)
    assert np.allclose(many[:, 1], 2 * got)


def test_poisson_of_constant_is_constant():
    q = make_sphere_quadrature(1, 256)
    assert np.allclose(poisson_integral(GridFunc(q, np.full(q.size, 3.0)), np.array([[0.5j], [-0.2]])), 3.0)


@given(st.integers(0, 10_000), st.sampled_from([0.75, 1.0, 4.0]), st.sampled_from(["R", "Rbar"]))
def test_area_integral_dominated_by_gstar_and_tent(seed, alpha, X):
    rng = np.random.default_rng(seed)
    bq = make_ball_quadrature(make_sphere_quadrature(1, 64), 16)
    u = PolyFunc.random_holomorphic(1, 3, rng) + PolyFunc.random_holomorphic(1, 3, rng).conj()
    zetas = random_sphere(1, 16, rng)
    gs = SquareFunctionSpec("gstar_X", X=X, lam=4)
    d = density(gs, u, bq)
    S = np.sqrt(area_sums(SquareFunctionSpec("S_X", alpha=alpha, X=X), d, zetas))
    G = np.sqrt(area_sums(gs, d, zetas))
    T = tent_functional(tent_aperture_for(alpha), u, zetas, bq, X=X)
    assert np.all(S <= alpha ** 2 * G + 1e-10)
    assert np.all(S <= T + 1e-10)


def test_area_integral_monotone_in_aperture(rng):
    bq = make_ball_quadrature(make_sphere_quadrature(1, 64), 16)
    u = PolyFunc.random_holomorphic(1, 4, rng)
    zetas = random_sphere(1, 8, rng)
    a = square_function(SquareFunctionSpec("S_X", alpha=1.0), u, zetas, bq)
    b = square_function(SquareFunctionSpec("S_X", alpha=2.0), u, zetas, bq)
    assert np.all(a <= b + 1e-14)


def test_spec_validation():
    with pytest.raises(ValueError):
        SquareFunctionSpec("S_X", alpha=0.5)
    with pytest.raises(ValueError):
        SquareFunctionSpec("gstar_X", lam=3)
    with pytest.raises(ValueError):
        SquareFunctionSpec("S_mu")
    with pytest.raises(ValueError):
        SquareFunctionSpec("nope")


def test_carleson_constant_finite():
    bq = make_ball_quadrature(make_sphere_quadrature(1, 64), 16)
    mu = carleson_from_bmoa(z, bq, centers=random_sphere(1, 8, np.random.default_rng(0)))
    assert np.isfinite(mu.constant) and mu.constant > 0


def test_volterra_formula():
    J = volterra(z, z * z)
    # z * 2 z^2 integrated: 2/3 z^3
    assert complex(J.coeffs[((3,), (0,))]) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        volterra(z.conj(), z)


def test_export_csv_schema(tmp_path):
    p = tmp_path / "s.csv"
    export_csv(p, [1.0, 2.5], SquareFunctionSpec("S_X"))
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# kind=S_X")
    assert list(csv.reader(lines[1:]))[0] == ["zeta_index", "value"]
