"""Poisson-Szego reproduction, the g-function and the invariant Green formula on small examples."""
import numpy as np

from bhx.funcrep import PolyFunc
from bhx.geometry import make_sphere_quadrature, random_ball
from bhx.holomorphic import green_formula_check
from bhx.transforms import GridFunc, g_function, poisson_integral

rng = np.random.default_rng(0)

# boundary values of a holomorphic polynomial extend back to the polynomial
q = make_sphere_quadrature(2, 96)
f = PolyFunc.random_holomorphic(2, 4, rng)
z = random_ball(2, 5, rng, rmax=0.9)
err = np.abs(poisson_integral(GridFunc.from_function(q, f), z) - f(z)).max()
print(f"n=2, {q.size} nodes: max |P[f] - f| = {err:.2e}")

# g(z^k) is constant on the circle
for k in range(1, 6):
    g = g_function(PolyFunc.monomial(1, (k,)), np.array([[1.0 + 0j]]))[0]
    print(f"g(z^{k}) = {g:.10f}   closed form {k / np.sqrt((2 * k + 1) * (2 * k + 2)):.10f}")

# Green's formula: the Laplacian of |z|^2 against the Green function recovers the mean value
w = PolyFunc.coordinate(1, 0)
c = green_formula_check(w * w.conj(), 0.9, make_sphere_quadrature(1, 1024))
print(f"Green, u = |z|^2, r = 0.9: lhs {c.lhs:.9f} rhs {c.rhs:.9f}")
