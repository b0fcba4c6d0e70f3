import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx import funcrep
from bhx.funcrep import DegreeError, GaussRational, PolyFunc, apply_deriv, invariant_laplacian
from bhx.transforms import volterra

z = PolyFunc.coordinate(1, 0)


def test_evaluate_monomials():
    p = z * z * 3.0 + z.conj()
    pts = np.array([[0.5 + 0.2j]])
    assert funcrep.evaluate(p, pts)[0] == pytest.approx(3 * (0.5 + 0.2j) ** 2 + (0.5 - 0.2j))


def test_radial_derivative_scales_by_degree():
    p = PolyFunc.monomial(2, (2, 1))
    assert apply_deriv(funcrep.R, p) == p * 3
    assert apply_deriv(funcrep.RBAR, p).is_zero()


def test_degree_cap():
    with pytest.raises(DegreeError):
        PolyFunc.monomial(1, (40,))


def test_invariant_laplacian_of_holomorphic_is_zero(rng):
    assert invariant_laplacian(PolyFunc.random_holomorphic(2, 5, rng)).is_m_harmonic


def test_laplacian_of_zzbar():
    # Lap~ |z|^2 on the disc = 4(1-|z|^2)^2 / 2 * 1 * ... polynomial part 1 - |z|^2
    lap = invariant_laplacian(z * z.conj())
    assert lap.poly == 1.0 - z * z.conj()


@given(st.integers(0, 10_000), st.integers(1, 2))
def test_json_roundtrip(seed, n):
    p = PolyFunc.random_holomorphic(n, 4, np.random.default_rng(seed))
    q = PolyFunc.from_json(p.to_json())
    assert set(q.coeffs) == set(p.coeffs)
    assert all(abs(complex(q.coeffs[k]) - complex(p.coeffs[k])) == 0 for k in p.coeffs)


@given(st.integers(0, 10_000), st.integers(1, 2))
def test_volterra_identity_exact(seed, n):
    rng = np.random.default_rng(seed)
    f = PolyFunc.random_holomorphic(n, 6, rng, exact=True)
    g = PolyFunc.random_holomorphic(n, 6, rng, exact=True)
    assert apply_deriv(funcrep.R, volterra(f, g)) == f * apply_deriv(funcrep.R, g)


@given(st.integers(0, 10_000))
def test_product_rule_for_radial_derivative(seed):
    rng = np.random.default_rng(seed)
    f = PolyFunc.random_holomorphic(2, 3, rng, exact=True)
    g = PolyFunc.random_holomorphic(2, 3, rng, exact=True).conj()
    R = funcrep.R
    assert apply_deriv(R, f * g) == apply_deriv(R, f) * g + f * apply_deriv(R, g)


def test_gauss_rational_arithmetic():
    a = GaussRational.of(1 + 2j)
    assert complex(a * a.conjugate()) == 5


@given(st.integers(0, 10_000))
def test_bergman_gradient_forms_agree(seed):
    rng = np.random.default_rng(seed)
    f = PolyFunc.random_holomorphic(2, 3, rng) + PolyFunc.random_holomorphic(2, 2, rng).conj()
    pts = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    pts *= 0.8 / np.linalg.norm(pts, axis=1, keepdims=True)
    a = funcrep.bergman_gradient_normsq(f, pts, "partials")
    b = funcrep.bergman_gradient_normsq(f, pts, "radial")
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)
