import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx.funcrep import PolyFunc
from bhx.geometry import make_graded_circle_quadrature, make_sphere_quadrature
from bhx.holomorphic import bmoa_seminorm, boundary_restrict, green_formula_check, hardy_norm, hardy_profile
from bhx.weights import Weight

z = PolyFunc.coordinate(1, 0)


def test_green_zzbar():
    c = green_formula_check(z * z.conj(), 0.9, make_sphere_quadrature(1, 1024))
    assert c.rhs == pytest.approx(0.81, abs=1e-12)
    assert c.residual <= 1e-3


@given(st.integers(0, 10_000), st.integers(1, 2), st.floats(0.2, 0.95))
def test_green_mean_value_holomorphic(seed, n, r):
    u = PolyFunc.random_holomorphic(n, 6, np.random.default_rng(seed))
    q = make_sphere_quadrature(n, 64 if n == 1 else 32)
    assert green_formula_check(u, r, q).residual <= 1e-8


def test_green_n2_nonholomorphic():
    w = PolyFunc.coordinate(2, 0)
    c = green_formula_check(w * w.conj(), 0.8, make_sphere_quadrature(2, 24))
    assert c.residual < 1e-8


def test_hardy_profile_monotone():
    q = make_sphere_quadrature(1, 256)
    prof = hardy_profile(1.0 + z, Weight.unit(), 2, q)
    assert np.all(np.diff(prof) >= -1e-14)
    assert prof[-1] == pytest.approx(np.sqrt(2), abs=1e-3)


def test_weighted_hardy_norm_positive():
    g = make_graded_circle_quadrature(64, 1e-30)
    assert hardy_norm(z, Weight.power(0.5), 2, g) > 0


def test_bmoa_seminorm_of_coordinate():
    assert bmoa_seminorm(z, make_sphere_quadrature(1, 1024)) == pytest.approx(1.0, abs=1e-9)
    assert bmoa_seminorm(PolyFunc.constant(1, 2.0), make_sphere_quadrature(1, 64)) == pytest.approx(2.0)


def test_holomorphic_required():
    with pytest.raises(ValueError):
        hardy_norm(z.conj(), Weight.unit(), 2, make_sphere_quadrature(1, 16))


def test_boundary_restrict():
    q = make_sphere_quadrature(1, 8)
    assert np.allclose(boundary_restrict(z, q).values, q.nodes[:, 0])
