"""Hardy-Littlewood and nontangential maximal functions, and a weak (1,1) functional."""
from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from . import funcrep
from .funcrep import PolyFunc
from .geometry import SQRT2, SphereQuadrature, as_points, inner, unitary_to
from .transforms import GridFunc, poisson_integral
from .weights import ball_averages_at, default_radii


def hl_maximal(f: GridFunc, zetas=None, radii=None) -> np.ndarray:
    """max over the radius grid of ball averages of |f| centred at each zeta.

    ``zetas`` defaults to every node; ``radii`` to the weights module's grid,
    always including sqrt 2 (the whole sphere).
    """
    quad = f.quad
    centers = quad.nodes if zetas is None else as_points(zetas).reshape(-1, quad.n)
    radii = default_radii(quad) if radii is None else np.asarray(radii, float)
    if radii.size == 0:
        raise ValueError("empty radius grid")
    radii = np.union1d(radii, [SQRT2])
    out = np.empty(centers.shape[0])
    step = max(1, 2_000_000 // (radii.size * max(1, quad.size if quad.n > 1 else 64)))
    absf = np.abs(f.values)
    for s in range(0, centers.shape[0], step):
        (avg,), _ = ball_averages_at(quad, [absf], centers[s:s + step], radii)
        out[s:s + step] = np.nanmax(avg, axis=1)
    return out


# ---------------------------------------------------------------- nontangential


def _shell_edges(eps_cut: float, shells: int) -> np.ndarray:
    # shells in t = 1 - |z|, geometric from 1 down to eps_cut
    return np.geomspace(1.0, eps_cut, shells + 1)


def koranyi_samples(n: int, zeta, alpha: float, budget: int = 4096, eps_cut: float = 1e-4,
                    shells: int = 16, seed: int = 0):
    """Deterministic low-discrepancy points of D_alpha(zeta) with |z| <= 1 - eps_cut.

    Returns (points (m, n), apertures (m,)) where aperture = |1 - <z,zeta>| / (1 - |z|^2);
    a point lies in D_beta(zeta) iff its aperture is < beta, so one sample set
    serves every smaller aperture.
    """
    zeta = as_points(zeta).reshape(n)
    # the n = 2 lens pokes outside the unit disc; oversample to keep about ``budget`` points
    quota = max(1, (budget if n == 1 else 6 * budget) // shells)
    edges = _shell_edges(eps_cut, shells)
    sampler = qmc.Halton(d=4, scramble=True, seed=seed)
    pts = []
    for i in range(shells):
        u = sampler.random(quota)
        t = edges[i] * (edges[i + 1] / edges[i]) ** u[:, 0]
        rho = 1 - t
        # lens {x : |1 - rho x| < alpha (1 - rho^2)} for the first coordinate of eta
        c = 1 / rho
        R = alpha * (1 - rho * rho) / rho
        if n == 1:
            # points on the circle |x| = 1 within the lens: angle half-width
            one_minus_c = (alpha ** 2 * (1 - rho * rho) ** 2 - (1 - rho) ** 2) / (2 * rho)
            half = 2 * np.arcsin(np.sqrt(np.clip(one_minus_c / 2, 0, 1)))
            half = np.where(one_minus_c >= 2, np.pi, half)
            phi = (2 * u[:, 1] - 1) * half
            z = (rho * np.exp(1j * phi))[:, None]
        else:
            rad = R * np.sqrt(u[:, 1])
            x = c + rad * np.exp(2j * np.pi * u[:, 2])
            keep = np.abs(x) < 1
            x = np.where(keep, x, x / np.maximum(np.abs(x), 1e-300) * (1 - 1e-15))
            y = np.sqrt(np.maximum(1 - np.abs(x) ** 2, 0)) * np.exp(2j * np.pi * u[:, 3])
            z = rho[:, None] * np.stack([x, y], axis=1)
            z = z[keep]
        pts.append(z)
    z = np.concatenate(pts)
    if n > 1:
        z = z @ unitary_to(zeta).T
    else:
        z = z * zeta[0]
    s = np.sum(np.abs(z) ** 2, axis=1)
    ap = np.abs(1 - inner(z, zeta)) / (1 - s)
    keep = ap < alpha
    return z[keep], ap[keep]


def _evaluate(u, z):
    if isinstance(u, PolyFunc):
        return funcrep.evaluate(u, z)
    if isinstance(u, GridFunc):
        return poisson_integral(u, z)
    return u(z)


def nontangential_max(u, alpha, zeta, budget: int = 4096, eps_cut: float = 1e-4, seed: int = 0):
    """sup of |u| over a sampled D_alpha(zeta); ``alpha`` may be a list (shared samples).

    ``u`` is a PolyFunc, a GridFunc (through its Poisson integral) or a callable.
    """
    if not np.all(np.asarray(alpha) > 0.5):
        raise ValueError("aperture must exceed 1/2")
    alphas = np.atleast_1d(np.asarray(alpha, float))
    zeta = as_points(zeta)
    n = zeta.shape[-1]
    z, ap = koranyi_samples(n, zeta, float(alphas.max()), budget, eps_cut, seed=seed)
    vals = np.abs(_evaluate(u, z))
    out = np.array([vals[ap < a].max() if np.any(ap < a) else 0.0 for a in alphas])
    return float(out[0]) if np.ndim(alpha) == 0 else out


# ---------------------------------------------------------------- weak type


def default_t_grid(l1: float, count: int = 40) -> np.ndarray:
    return l1 * np.geomspace(0.05, 1e3, count)


def weak11_functional(values, quad: SphereQuadrature, l1: float, t_grid=None):
    """sup over the t-grid of t sigma{F > t} / ||f||_1, with the maximizing t.

    ``values`` are node values of the operator output F.
    """
    t_grid = default_t_grid(l1) if t_grid is None else np.asarray(t_grid, float)
    order = np.argsort(values)
    v = np.asarray(values)[order]
    tail = np.concatenate([np.cumsum(quad.weights[order][::-1])[::-1], [0.0]])
    above = tail[np.searchsorted(v, t_grid, side="right")]
    ratios = t_grid * above / l1
    i = int(np.argmax(ratios))
    return float(ratios[i]), float(t_grid[i])
