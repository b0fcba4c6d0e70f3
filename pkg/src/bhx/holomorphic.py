"""Weighted Hardy norms, boundary restrictions, the BMOA seminorm and Green's formula."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import funcrep
from .funcrep import PolyFunc
from .geometry import SphereQuadrature, make_ball_quadrature
from .kernels import green_invariant
from .transforms import GridFunc
from .weights import BallFamily, Weight, ball_averages


def _require_holomorphic(f: PolyFunc):
    if not f.is_holomorphic:
        raise ValueError("expected a holomorphic polynomial")


def default_r_grid(eps_cut: float = 1e-4, count: int = 32) -> np.ndarray:
    """Chebyshev points on [0.5, 1 - eps_cut], increasing, clustered at both ends."""
    lo, hi = 0.5, 1 - eps_cut
    x = np.cos(np.pi * (np.arange(count) + 0.5) / count)[::-1]
    return lo + (hi - lo) * (x + 1) / 2


def hardy_profile(f: PolyFunc, w: Weight, p: float, quad: SphereQuadrature, r_grid=None) -> np.ndarray:
    """(int |f(r zeta)|^p omega dsigma)^(1/p) for each r in the grid."""
    _require_holomorphic(f)
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, float)
    om = w.values(quad)
    out = np.empty(r_grid.size)
    for i, r in enumerate(r_grid):
        vals = np.abs(funcrep.evaluate(f, r * quad.nodes)) ** p
        out[i] = quad.integrate(vals * om) ** (1 / p)
    return out


def hardy_norm(f: PolyFunc, w: Weight, p: float, quad: SphereQuadrature, r_grid=None) -> float:
    return float(hardy_profile(f, w, p, quad, r_grid).max())


def boundary_restrict(f: PolyFunc, quad: SphereQuadrature) -> GridFunc:
    vals = funcrep.evaluate(f, quad.nodes)
    if all(np.imag(complex(c)) == 0 for c in f.coeffs.values()) and f.degree == 0:
        vals = np.real(vals)
    return GridFunc(quad, vals)


def bmoa_seminorm(g: PolyFunc, quad: SphereQuadrature, family: BallFamily | None = None) -> float:
    """(|g(0)|^2 + sup over balls of the mean-square oscillation of the boundary trace)^(1/2)."""
    _require_holomorphic(g)
    family = BallFamily.default(quad) if family is None else family
    return float(np.sqrt(abs(g0(g)) ** 2 + bmoa_oscillation(g, quad, family)))


def g0(g: PolyFunc) -> complex:
    return complex(g.coeffs.get(((0,) * g.n, (0,) * g.n), 0))


def bmoa_oscillation(g: PolyFunc, quad: SphereQuadrature, family: BallFamily) -> float:
    v = funcrep.evaluate(g, quad.nodes)
    (re, im, sq), _ = ball_averages(quad, [v.real, v.imag, np.abs(v) ** 2], family)
    osc = sq - (re ** 2 + im ** 2)
    return float(max(np.nanmax(osc), 0.0))


@dataclass(frozen=True)
class GreenCheck:
    lhs: float
    rhs: float
    residual: float


def green_formula_check(u: PolyFunc, r: float, quad: SphereQuadrature, radial_nodes: int = 64) -> GreenCheck:
    """Both sides of int_{rB} Lap~u (G - G(r)) dlambda = int u(r zeta) dsigma - u(0).

    dlambda = (n+1) dv / (1-|z|^2)^(n+1); the Laplacian's prefactor cancels
    part of that density, which keeps the integrand smooth.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if 1 - r < 1e-3:
        warnings.warn("r is close to 1; the radial rule may not resolve the integrand", stacklevel=2)
    n = quad.n
    lap = funcrep.invariant_laplacian(u)
    if lap.is_m_harmonic:
        lhs = 0.0
    else:
        bq = make_ball_quadrature(quad, radial_nodes, outer=r)
        z = bq.nodes
        s = np.sum(np.abs(z) ** 2, axis=1)
        rad = np.sqrt(s)
        G = green_invariant(np.maximum(rad, 1e-300), n=n) - float(green_invariant(r, n=n))
        dens = np.real(lap(z)) * G * (n + 1) / (1 - s) ** (n + 1)
        lhs = float(bq.integrate(dens))
    mean = quad.integrate(funcrep.evaluate(u, r * quad.nodes))
    rhs = complex(mean - funcrep.evaluate(u, np.zeros(n)))
    rhs = rhs.real if abs(rhs.imag) < 1e-14 else rhs
    return GreenCheck(lhs, float(np.real(rhs)), float(abs(lhs - rhs)))
