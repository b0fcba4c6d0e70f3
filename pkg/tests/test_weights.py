import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from bhx.disc import power_coefficients, spike_coefficients
from bhx.geometry import make_graded_circle_quadrature, make_sphere_quadrature
from bhx.transforms import GridFunc
from bhx.weights import (BallFamily, NonPositiveWeight, ResolutionError, Weight, ap_constant, ball_averages,
                         default_radii, dual_weight, optimality_weight, spike, spike_cell_averages, weighted_lp_norm)

# a_0 of |1 - xi|^(-1/2): Gamma(1/2) / Gamma(3/4)^2, frozen
SPIKE_A0_HALF = 1.1803405990161


def test_spike_mean_oracle():
    assert spike_coefficients(0.5, 0)[0] == pytest.approx(SPIKE_A0_HALF, rel=1e-12)


@pytest.mark.parametrize("a", [-0.5, 0.25, 1.5])
def test_power_coefficients_against_quadrature(a):
    c = power_coefficients(a, 3)
    for k in range(4):
        ref = integrate.quad(lambda t: abs(2 * np.sin(t / 2)) ** a * np.cos(k * t), 0, 2 * np.pi,
                             points=[np.pi], limit=200)[0] / (2 * np.pi)
        assert c[k] == pytest.approx(ref, abs=1e-9)


def test_constant_weight_is_a1():
    q = make_sphere_quadrature(1, 256)
    for p in (1.5, 2, 3):
        assert ap_constant(Weight.unit(), p, q).value == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 10_000), st.sampled_from([1.5, 2.0, 3.0]))
def test_ap_at_least_one_and_duality(seed, p):
    q = make_sphere_quadrature(1, 128)
    v = np.exp(np.random.default_rng(seed).standard_normal(q.size))
    w = Weight.from_grid(GridFunc(q, v))
    fam = BallFamily.default(q, count=8, stride=4)
    A = ap_constant(w, p, q, fam).value
    assert A >= 1 - 1e-12
    # [w']_{A_p'} = [w]_{A_p}^(1/(p-1))
    pp = p / (p - 1)
    Ad = ap_constant(dual_weight(w, p), pp, q, fam).value
    assert Ad == pytest.approx(A ** (1 / (p - 1)), rel=1e-9)


def test_ap_cached():
    q = make_sphere_quadrature(1, 128)
    w = Weight.power(0.5)
    with pytest.raises(NonPositiveWeight):
        ap_constant(w, 2, q)  # node at the singular point
    g = make_graded_circle_quadrature(64, 1e-30)
    assert ap_constant(w, 2, g) is ap_constant(w, 2, g)


def test_nonpositive_grid_weight():
    q = make_sphere_quadrature(1, 16)
    with pytest.raises(NonPositiveWeight):
        Weight.from_grid(GridFunc(q, np.zeros(q.size)))


def test_weighted_norm_of_spike_is_its_mean():
    g = make_graded_circle_quadrature(256)
    for d in (0.5, 0.25):
        f = spike(g, d)
        assert weighted_lp_norm(f, optimality_weight(2, d), 2) ** 2 == pytest.approx(spike_coefficients(d, 0)[0],
                                                                                       rel=1e-6)


def test_resolution_guards():
    with pytest.raises(ResolutionError):
        spike(make_sphere_quadrature(1, 64), 0.25)
    with pytest.raises(ResolutionError):
        spike(make_graded_circle_quadrature(64), 1 / 32)
    with pytest.raises(ResolutionError):
        spike(make_graded_circle_quadrature(64, depth=1e-6), 1 / 8)


def test_cell_averages_integrate_to_mean():
    q = make_sphere_quadrature(1, 4096)
    f = spike_cell_averages(q, 0.5)
    assert np.all(np.isfinite(f.values))
    assert float(f.integral().real) == pytest.approx(SPIKE_A0_HALF, rel=1e-12)


def test_ball_averages_whole_sphere():
    q = make_sphere_quadrature(2, 12)
    v = np.random.default_rng(0).random(q.size)
    fam = BallFamily(np.array([0, 5]), np.array([2.0]))
    (avg,), meas = ball_averages(q, [v], fam)
    assert np.allclose(avg, q.integrate(v)) and np.allclose(meas, 1.0)


def test_default_radii_range():
    r = default_radii(make_sphere_quadrature(1, 1024))
    assert r[-1] == pytest.approx(np.sqrt(2)) and r.size >= 24
