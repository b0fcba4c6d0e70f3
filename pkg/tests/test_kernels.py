import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx.geometry import make_sphere_quadrature, random_ball, random_sphere
from bhx.kernels import (SingularKernel, green_invariant, green_radial_antiderivative_check, holomorphic_radial_fd,
                         kpow, pairing_difference_holds, poisson_szego, telescoping_holds, xpoisson)

# G(1/2) for n = 2: (1/4)(-1/2 + 2 + ln 1/2), frozen
G_HALF_N2 = 0.20171320486


def test_green_oracles():
    assert float(green_invariant(0.5, n=2)) == pytest.approx(G_HALF_N2, rel=1e-10)
    assert float(green_invariant(0.5, n=1)) == pytest.approx(0.5 * np.log(2), rel=1e-14)
    assert float(green_invariant(1.0, n=2)) == 0.0
    with pytest.raises(SingularKernel):
        green_invariant(0.0, n=1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_green_matches_quadrature(n):
    assert green_radial_antiderivative_check(n, 0.3) < 1e-10


@pytest.mark.parametrize("n,res", [(1, 512), (2, 48)])
def test_poisson_kernel_has_unit_mass(n, res):
    q = make_sphere_quadrature(n, res)
    z = random_ball(n, 5, np.random.default_rng(0), rmax=0.7)
    mass = poisson_szego(z[:, None, :], q.nodes[None, :, :]) @ q.weights
    assert np.allclose(mass, 1.0, atol=1e-10)


@given(st.integers(0, 10_000), st.integers(1, 2))
def test_pairing_difference(seed, n):
    rng = np.random.default_rng(seed)
    assert np.all(pairing_difference_holds(random_ball(n, 50, rng), random_sphere(n, 50, rng),
                                           random_sphere(n, 50, rng)))


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_telescoping(seed, ell):
    rng = np.random.default_rng(seed)
    assert np.all(telescoping_holds(ell, random_ball(2, 50, rng, 0.95), random_sphere(2, 50, rng),
                                    random_sphere(2, 50, rng)))


def test_xpoisson_matches_finite_difference():
    rng = np.random.default_rng(3)
    z = random_ball(2, 4, rng, rmax=0.6)
    xi = random_sphere(2, 1, rng)[0]
    for X, conj in (("R", False), ("Rbar", True)):
        fd = holomorphic_radial_fd(lambda w: poisson_szego(w, xi), z, conj=conj)
        assert np.allclose(xpoisson(X, z, xi), fd, atol=1e-6)


def test_kpow_definition():
    z = np.array([0.3 + 0.1j, 0.2j])
    w = np.array([0.6, 0.8 + 0j])
    assert kpow(3, z, w) == pytest.approx((1 - np.vdot(w, z)) ** -3)
