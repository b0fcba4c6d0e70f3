"""Poisson integrals, area integrals, g-functions, tent functionals and the Volterra operator.

Every ball integral is a masked or weighted sum over the nodes of a
:class:`~bhx.geometry.BallQuadrature`.  Inputs are either exact polynomials
(derivatives taken on coefficients) or boundary data on a sphere grid, in
which case derivatives are taken under the Poisson integral with the closed
form kernels.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import funcrep
from .funcrep import PolyFunc
from .geometry import (
    BallQuadrature,
    SphereQuadrature,
    as_points,
    coords_of,
    inner,
    ni_distance,
)
from .kernels import poisson_szego, xpoisson

CHUNK = 2_000_000


class ResolutionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridFunc:
    quad: SphereQuadrature
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.quad.size,):
            raise ValueError("one value per quadrature node expected")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, quad: SphereQuadrature, fn) -> "GridFunc":
        return cls(quad, np.asarray(fn(quad.nodes)))

    def integral(self):
        return self.quad.integrate(self.values)

    def l1(self) -> float:
        return float(self.quad.integrate(np.abs(self.values)))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or bool(np.all(self.values.imag == 0))

    def real(self) -> "GridFunc":
        return GridFunc(self.quad, np.real(self.values))

    def __add__(self, o):
        return GridFunc(self.quad, self.values + (o.values if isinstance(o, GridFunc) else o))

    def __mul__(self, c):
        return GridFunc(self.quad, self.values * c)

    __rmul__ = __mul__


def _chunks(total_pairs_per_row: int, rows: int):
    step = max(1, CHUNK // max(1, total_pairs_per_row))
    for s in range(0, rows, step):
        yield slice(s, min(rows, s + step))


def _check_resolution(f: GridFunc, z):
    s = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
    gap = f.quad.spacing ** 2
    if np.any(1 - s < 2 * gap):
        warnings.warn(
            f"evaluation point within {float((1 - s).min()):.2e} of the sphere; "
            f"grid gap {gap:.2e} does not resolve the kernel peak",
            ResolutionWarning,
            stacklevel=3,
        )


def _kernel_sum(kernel, f: GridFunc, z) -> np.ndarray:
    z = as_points(z)
    single = z.ndim == 1
    zz = z.reshape(-1, z.shape[-1])
    _check_resolution(f, zz)
    nodes, wf = f.quad.nodes, f.quad.weights * f.values
    out = np.empty(zz.shape[0], dtype=complex)
    for sl in _chunks(nodes.shape[0], zz.shape[0]):
        K = kernel(zz[sl, None, :], nodes[None, :, :])
        out[sl] = K @ wf
    return out[0] if single else out


def poisson_integral(f: GridFunc, z) -> np.ndarray:
    return _kernel_sum(poisson_szego, f, z)


def poisson_integral_many(quad: SphereQuadrature, values, z) -> np.ndarray:
    """P[f_j](z_i) for several boundary data at once; ``values`` is (m, N), result (len(z), m)."""
    z = as_points(z).reshape(-1, quad.n)
    values = np.atleast_2d(values)
    _check_resolution(GridFunc(quad, values[0]), z)
    wf = (values * quad.weights[None, :]).T
    out = np.empty((z.shape[0], values.shape[0]), dtype=complex)
    for sl in _chunks(quad.size, z.shape[0]):
        out[sl] = poisson_szego(z[sl, None, :], quad.nodes[None, :, :]) @ wf
    return out


def poisson_radial(X: str, f: GridFunc, z) -> np.ndarray:
    """X P[f] at z, differentiating under the integral sign."""
    return _kernel_sum(lambda a, b: xpoisson(X, a, b), f, z)


def _poisson_dz(z, xi, i):
    n = z.shape[-1]
    s = np.sum(np.abs(z) ** 2, axis=-1)
    q = 1 - inner(z, xi)
    aq = np.abs(q) ** (2 * n)
    return -n * (1 - s) ** (n - 1) * np.conj(z[..., i]) / aq + n * (1 - s) ** n * np.conj(xi[..., i]) / (q * aq)


def poisson_partials(f: GridFunc, z):
    """Arrays (du/dz_i, du/dzbar_i) of u = P[f], each of shape (m, n)."""
    z = as_points(z).reshape(-1, f.quad.n)
    n = f.quad.n
    dz = np.stack([_kernel_sum(lambda a, b, i=i: _poisson_dz(a, b, i), f, z) for i in range(n)], axis=-1)
    g = GridFunc(f.quad, np.conj(f.values))
    dzb = np.stack([np.conj(_kernel_sum(lambda a, b, i=i: _poisson_dz(a, b, i), g, z)) for i in range(n)], axis=-1)
    return dz, dzb


# ---------------------------------------------------------------- Carleson measures


@dataclass(frozen=True)
class CarlesonMeasure:
    atoms: np.ndarray  # (m, n) interior points
    masses: np.ndarray  # (m,)
    n: int
    constant: float = 0.0
    scan: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.masses <= 0):
            raise ValueError("atom masses must be positive")
        if self.atoms.size and np.any(np.sum(np.abs(self.atoms) ** 2, axis=-1) >= 1):
            raise ValueError("atoms must be interior")

    @property
    def total(self) -> float:
        return float(self.masses.sum())


def carleson_constant(atoms, masses, n: int, centers, radii) -> float:
    """sup over centers x radii of mu({d(z, zeta) < r}) / r^(2n)."""
    if len(masses) == 0:
        return 0.0
    radii = np.asarray(radii, float)
    best = 0.0
    for c in as_points(centers).reshape(-1, n):
        d = ni_distance(atoms, c)
        order = np.argsort(d)
        cum = np.concatenate([[0.0], np.cumsum(masses[order])])
        k = np.searchsorted(d[order], radii, side="left")
        best = max(best, float(np.max(cum[k] / radii ** (2 * n))))
    return best


def default_carleson_radii(bq: BallQuadrature, count: int = 24) -> np.ndarray:
    lo = max(4 * bq.sphere.spacing, 4 * np.sqrt(bq.eps_cut))
    return np.geomspace(min(lo, 1.0), np.sqrt(2.0), count)


def carleson_from_bmoa(g: PolyFunc, bq: BallQuadrature, centers=None, radii=None) -> CarlesonMeasure:
    """Discretize (1-|z|^2)|Rg|^2 dv onto the nodes of ``bq`` and scan its Carleson constant."""
    if not g.is_holomorphic:
        raise ValueError("symbol must be holomorphic")
    z = bq.nodes
    s = np.sum(np.abs(z) ** 2, axis=-1)
    m = (1 - s) * np.abs(funcrep.evaluate(funcrep.radial(g), z)) ** 2 * bq.weights
    keep = m > 0
    atoms, masses = z[keep], m[keep]
    if centers is None:
        sn = bq.sphere.nodes
        step = max(1, sn.shape[0] // 64)
        centers = sn[::step]
    if radii is None:
        radii = default_carleson_radii(bq)
    const = carleson_constant(atoms, masses, bq.n, centers, radii)
    scan = {"centers": int(len(as_points(centers).reshape(-1, bq.n))), "r_min": float(np.min(radii)),
            "r_max": float(np.max(radii)), "radii": int(len(radii))}
    return CarlesonMeasure(atoms, masses, bq.n, const, scan)


# ---------------------------------------------------------------- square functions

KINDS = ("S_X", "S_grad", "S_mu", "g", "gstar_X", "gstar_mu", "gstar_EQ")


@dataclass(frozen=True)
class SquareFunctionSpec:
    kind: str
    alpha: float = 1.0
    X: str = "R"
    lam: int = 4
    mu: CarlesonMeasure | None = None
    cube_center: np.ndarray | None = None
    cube_scale: float = 0.0  # C_1 r_Q
    complement: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown square function {self.kind!r}")
        if self.kind in ("S_X", "S_grad", "S_mu") and not self.alpha > 0.5:
            raise ValueError("aperture must exceed 1/2")
        if self.kind.startswith("gstar") and (int(self.lam) != self.lam or self.lam < 4):
            raise ValueError("lambda must be an integer >= 4")
        if self.kind.endswith("mu") and self.mu is None:
            raise ValueError("measure-type square functions need a Carleson measure")
        if self.kind == "gstar_EQ" and (self.cube_center is None or self.cube_scale <= 0):
            raise ValueError("cube-restricted g* needs a cube center and scale")
        if self.X not in ("R", "Rbar"):
            raise ValueError("X must be R or Rbar")

    def header(self) -> str:
        return f"kind={self.kind} alpha={self.alpha} X={self.X} lambda={self.lam}"


def _xderiv_values(u, X: str, z) -> np.ndarray:
    if isinstance(u, PolyFunc):
        op = funcrep.R if X == "R" else funcrep.RBAR
        return funcrep.evaluate(funcrep.apply_deriv(op, u), z)
    return poisson_radial(X, u, z)


def _values(u, z) -> np.ndarray:
    if isinstance(u, PolyFunc):
        return funcrep.evaluate(u, z)
    return poisson_integral(u, z)


def gradient_normsq(u, z) -> np.ndarray:
    """|grad~ u|^2 at z for a polynomial or for the Poisson extension of grid data."""
    if isinstance(u, PolyFunc):
        return funcrep.bergman_gradient_normsq(u, z)
    z = as_points(z).reshape(-1, u.quad.n)
    n = u.quad.n
    dz, dzb = poisson_partials(u, z)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    Ru = np.sum(z * dz, axis=-1)
    Rbu = np.sum(np.conj(z) * dzb, axis=-1)
    tot = np.sum(np.abs(dz) ** 2 + np.abs(dzb) ** 2, axis=-1) - np.abs(Ru) ** 2 - np.abs(Rbu) ** 2
    return 2 * (1 - s) / (n + 1) * tot


@dataclass
class BallDensity:
    """Integrand values times measure at a set of ball points."""

    points: np.ndarray
    mass: np.ndarray  # |field|^2 * measure weight, real

    @property
    def n(self) -> int:
        return self.points.shape[-1]


def density(spec: SquareFunctionSpec, u, bq: BallQuadrature | None) -> BallDensity:
    if spec.kind in ("S_mu", "gstar_mu"):
        mu = spec.mu
        z = mu.atoms
        s = np.sum(np.abs(z) ** 2, axis=-1)
        vals = np.abs(_values(u, z)) ** 2 if len(z) else np.zeros(0)
        return BallDensity(z, vals * mu.masses / (1 - s) ** mu.n)
    z = bq.nodes
    n = bq.n
    s = np.sum(np.abs(z) ** 2, axis=-1)
    if spec.kind == "S_grad":
        vals = gradient_normsq(u, z)
        return BallDensity(z, np.real(vals) * bq.weights / (1 - s) ** (n + 1))
    vals = np.abs(_xderiv_values(u, spec.X, z)) ** 2
    return BallDensity(z, vals * bq.weights / (1 - s) ** (n - 1))


def _region_kernel(spec: SquareFunctionSpec, z, zetas, s) -> np.ndarray:
    """(m_zeta, N) nonnegative factors multiplying the density for each zeta."""
    q = np.abs(1 - inner(z[None, :, :], zetas[:, None, :]))
    n = z.shape[-1]
    if spec.kind in ("S_X", "S_grad", "S_mu"):
        return (q < spec.alpha * (1 - s)[None, :]).astype(float)
    base = ((1 - s)[None, :] / q) ** (spec.lam * n)
    if spec.kind == "gstar_EQ":
        inside = ni_distance(z, coords_of(spec.cube_center)) < 2 * spec.cube_scale
        keep = ~inside if spec.complement else inside
        return base * keep[None, :]
    return base


def area_sums(spec: SquareFunctionSpec, dens: BallDensity, zetas, mask_fn=None) -> np.ndarray:
    zetas = as_points(zetas).reshape(-1, dens.n)
    z = dens.points
    s = np.sum(np.abs(z) ** 2, axis=-1)
    out = np.empty(zetas.shape[0])
    for sl in _chunks(max(1, z.shape[0]), zetas.shape[0]):
        K = mask_fn(z, zetas[sl], s) if mask_fn else _region_kernel(spec, z, zetas[sl], s)
        out[sl] = K @ dens.mass
    return out


def g_function(f, zetas, radial_nodes: int = 64, eps_cut: float = 1e-4) -> np.ndarray:
    """(int_0^{1-eps} |Rf(r zeta)|^2 (1-r) dr)^(1/2) with a Gauss rule in r."""
    zetas = as_points(zetas)
    single = zetas.ndim == 1
    zetas = zetas.reshape(-1, zetas.shape[-1])
    top = 1 - eps_cut
    x, w = leggauss(radial_nodes)
    r = 0.5 * top * (x + 1)
    wr = 0.5 * top * w * (1 - r)
    pts = r[None, :, None] * zetas[:, None, :]
    vals = np.abs(_xderiv_values(f, "R", pts.reshape(-1, zetas.shape[-1]))) ** 2
    out = np.sqrt(vals.reshape(zetas.shape[0], -1) @ wr)
    return out[0] if single else out


def square_function(spec: SquareFunctionSpec, u, zeta, bq: BallQuadrature | None = None):
    """Evaluate the square function described by ``spec`` at one or many boundary points."""
    z = coords_of(zeta)
    single = z.ndim == 1
    if spec.kind == "g":
        kw = {} if bq is None else {"radial_nodes": max(16, bq.radii.size), "eps_cut": bq.eps_cut}
        return g_function(u, z, **kw)
    dens = density(spec, u, bq)
    out = np.sqrt(np.maximum(area_sums(spec, dens, z), 0.0))
    return float(out[0]) if single else out


def tent_functional(alpha: float, u, zeta, bq: BallQuadrature, X: str = "R", field_kind: str = "X"):
    """(int over the tent of aperture alpha of |Xu|^2 dv/(1-|z|^2)^(n-1))^(1/2).

    ``field_kind="grad"`` uses |grad~ u|^2 dv/(1-|z|^2)^(n+1) instead.
    """
    if alpha <= 0:
        raise ValueError("tent aperture must be positive")
    spec = SquareFunctionSpec("S_grad" if field_kind == "grad" else "S_X", alpha=max(alpha, 0.51), X=X)
    dens = density(spec, u, bq)

    def mask(z, zetas, s):
        r = np.sqrt(s)
        eta = z / np.where(r > 0, r, 1.0)[:, None]
        q = np.abs(1 - inner(eta[None, :, :], zetas[:, None, :]))
        return ((q < alpha * (1 - r)[None, :]) | (r == 0)[None, :]).astype(float)

    z = coords_of(zeta)
    out = np.sqrt(area_sums(spec, dens, z, mask))
    return float(out[0]) if z.ndim == 1 else out


def export_csv(path, values, spec: SquareFunctionSpec | None = None):
    with open(path, "w", newline="") as fh:
        if spec is not None:
            fh.write(f"# {spec.header()}\n")
        w = csv.writer(fh)
        w.writerow(["zeta_index", "value"])
        for i, v in enumerate(np.atleast_1d(values)):
            w.writerow([i, "%.12g" % float(v)])


# ---------------------------------------------------------------- Volterra operator


def volterra(f: PolyFunc, g: PolyFunc) -> PolyFunc:
    """J_g f = int_0^1 f(tz) Rg(tz) dt/t, term by term: z^a, z^b -> |b|/(|a|+|b|) z^(a+b)."""
    if not (f.is_holomorphic and g.is_holomorphic):
        raise ValueError("Volterra operator takes holomorphic polynomials")
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    n = f.n
    zero = (0,) * n
    out = {}
    for (a, _), c1 in f.coeffs.items():
        for (b, _), c2 in g.coeffs.items():
            nb = sum(b)
            if nb == 0:
                continue
            k = (tuple(x + y for x, y in zip(a, b)), zero)
            coef = c1 * c2 * Fraction(nb, sum(a) + nb)
            out[k] = out.get(k, 0) + coef
    return PolyFunc(n, out, max(f.max_degree, g.max_degree))
