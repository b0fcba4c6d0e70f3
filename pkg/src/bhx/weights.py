"""Muckenhoupt weights on the sphere: A_p constants over ball families, duals, weighted norms."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import SQRT2, ArcSums, SphereQuadrature, arc_halfwidth, ni_distance
from .transforms import GridFunc


class NonPositiveWeight(ValueError):
    pass


class ResolutionError(ValueError):
    pass


def distance_to_one(quad: SphereQuadrature) -> np.ndarray:
    """|1 - zeta_1| at the nodes, computed from angles on the circle to keep tiny values exact."""
    if quad.n == 1:
        th = np.angle(quad.nodes[:, 0])
        return 2 * np.abs(np.sin(th / 2))
    return np.abs(1 - quad.nodes[:, 0])


@dataclass
class Weight:
    """Positive weight on the sphere: ``power`` means |1 - zeta_1|^a, ``grid`` carries node values."""

    form: str
    a: float = 0.0
    grid: GridFunc | None = None
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def power(cls, a: float) -> "Weight":
        return cls("power", a=float(a))

    @classmethod
    def unit(cls) -> "Weight":
        return cls("power", a=0.0)

    @classmethod
    def from_grid(cls, g: GridFunc) -> "Weight":
        v = np.real(g.values)
        if np.any(v <= 0):
            raise NonPositiveWeight("weights must be strictly positive at every node")
        return cls("grid", grid=GridFunc(g.quad, v))

    @classmethod
    def from_spec(cls, spec: dict, quad: SphereQuadrature | None = None) -> "Weight":
        if spec.get("type") == "power":
            return cls.power(spec["a"])
        if spec.get("type") == "grid":
            vals = np.asarray(json.load(open(spec["file"])), float)
            if quad is None or vals.size != quad.size:
                raise ValueError("grid weight file does not match the quadrature")
            return cls.from_grid(GridFunc(quad, vals))
        raise ValueError(f"unknown weight spec {spec!r}")

    def to_spec(self) -> dict:
        if self.form == "power":
            return {"type": "power", "a": self.a}
        return {"type": "grid", "file": None}

    def values(self, quad: SphereQuadrature) -> np.ndarray:
        if self.form == "power":
            if self.a == 0:
                return np.ones(quad.size)
            with np.errstate(divide="ignore"):
                v = distance_to_one(quad) ** self.a
            if not np.all(np.isfinite(v)) or np.any(v <= 0):
                raise NonPositiveWeight("power weight is singular at a node; use a rule avoiding the point 1")
            return v
        if self.grid.quad is not quad and self.grid.quad.size != quad.size:
            raise ValueError("grid weight lives on a different quadrature")
        return self.grid.values

    def mass(self, quad: SphereQuadrature) -> float:
        return float(quad.integrate(self.values(quad)))


def dual_weight(w: Weight, p: float) -> Weight:
    """omega' = omega^(-p'/p) = omega^(-1/(p-1))."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    e = -1.0 / (p - 1)
    if w.form == "power":
        return Weight.power(w.a * e)
    return Weight("grid", grid=GridFunc(w.grid.quad, w.grid.values ** e))


def default_radii(quad: SphereQuadrature, count: int | None = None, rmin: float | None = None) -> np.ndarray:
    """Log-spaced radii from 4 node spacings up to sqrt 2.

    Graded rules resolve much finer balls near the point 1, so there the
    floor is set by the innermost panel and the count grows with the range.
    """
    if rmin is None:
        if quad.kind == "graded":
            rmin = 4 * np.sqrt(quad.resolution["depth"])
        else:
            rmin = 4 * quad.spacing
    rmin = min(rmin, SQRT2)
    if count is None:
        count = max(24, int(np.ceil(8 * np.log10(SQRT2 / rmin))))
    return np.geomspace(rmin, SQRT2, count)


@dataclass(frozen=True)
class BallFamily:
    centers: np.ndarray  # node indices into the quadrature
    radii: np.ndarray

    @classmethod
    def default(cls, quad: SphereQuadrature, count: int | None = None, stride: int = 1, rmin: float | None = None):
        return cls(np.arange(0, quad.size, stride), default_radii(quad, count, rmin))

    def refined(self, extra_radii) -> "BallFamily":
        return BallFamily(self.centers, np.union1d(self.radii, np.asarray(extra_radii, float)))


def ball_averages(quad: SphereQuadrature, values_list, family: BallFamily):
    """Averages of each array in ``values_list`` over every ball of the family.

    Returns (avgs list of (C, R) arrays, measures (C, R)); empty balls give nan.
    """
    return ball_averages_at(quad, values_list, quad.nodes[family.centers], family.radii)


def ball_averages_at(quad: SphereQuadrature, values_list, centers, radii):
    """Same as :func:`ball_averages` for arbitrary boundary points ``centers`` (C, n)."""
    w = quad.weights
    centers = np.asarray(centers).reshape(-1, quad.n)
    radii = np.asarray(radii, float)
    C, Rn = centers.shape[0], radii.size
    if quad.n == 1:
        arcs = ArcSums(quad)
        th = np.angle(centers[:, 0])
        half = arc_halfwidth(radii)
        T = np.broadcast_to(th[:, None], (C, Rn))
        H = np.broadcast_to(half[None, :], (C, Rn))
        meas = arcs.sums(w, T, H)
        meas_safe = np.where(meas > 0, meas, np.nan)
        avgs = [arcs.sums(v * w, T, H) / meas_safe for v in values_list]
        return avgs, meas
    meas = np.zeros((C, Rn))
    sums = [np.zeros((C, Rn)) for _ in values_list]
    nodes = quad.nodes
    for i in range(C):
        d = ni_distance(nodes, centers[i])
        order = np.argsort(d)
        ds = d[order]
        k = np.searchsorted(ds, radii, side="left")
        # radius sqrt 2 already reaches antipodal nodes: the whole sphere
        k = np.where(radii >= SQRT2, ds.size, k)
        cw = np.concatenate([[0.0], np.cumsum(w[order])])
        meas[i] = cw[k]
        for s, v in zip(sums, values_list):
            cv = np.concatenate([[0.0], np.cumsum((v * w)[order])])
            s[i] = cv[k]
    meas_safe = np.where(meas > 0, meas, np.nan)
    return [s / meas_safe for s in sums], meas


@dataclass(frozen=True)
class ApEstimate:
    value: float
    center: int
    radius: float
    p: float

    def __float__(self):
        return self.value


def ap_constant(w: Weight, p: float, quad: SphereQuadrature, family: BallFamily | None = None) -> ApEstimate:
    """sup over the ball family of avg(w) * avg(w^(-1/(p-1)))^(p-1)."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    family = BallFamily.default(quad) if family is None else family
    key = (p, quad.size, family.centers.size, tuple(np.round(family.radii, 14)))
    if key in w.cache:
        return w.cache[key]
    v = w.values(quad)
    if np.any(v <= 0):
        raise NonPositiveWeight("weights must be strictly positive")
    dual = v ** (-1.0 / (p - 1))
    (a1, a2), _ = ball_averages(quad, [v, dual], family)
    prod = a1 * a2 ** (p - 1)
    prod = np.where(np.isfinite(prod), prod, -np.inf)
    i, j = np.unravel_index(int(np.argmax(prod)), prod.shape)
    est = ApEstimate(float(prod[i, j]), int(family.centers[i]), float(family.radii[j]), p)
    w.cache[key] = est
    return est


def weighted_lp_norm(f: GridFunc, w: Weight, p: float) -> float:
    if p < 1:
        raise ValueError("p must be at least 1")
    return float(f.quad.integrate(np.abs(f.values) ** p * w.values(f.quad)) ** (1.0 / p))


def spike(quad: SphereQuadrature, delta: float) -> GridFunc:
    """|1 - xi|^(delta - 1), the boundary datum of the optimality family."""
    require_resolution(quad, delta)
    return GridFunc(quad, distance_to_one(quad) ** (delta - 1))


def optimality_weight(p: float, delta: float) -> Weight:
    return Weight.power((p - 1) * (1 - delta))


DELTA_FLOOR = 1.0 / 16


def require_resolution(quad: SphereQuadrature, delta: float):
    """Refuse grids that cannot resolve |1 - xi|^(delta - 1)."""
    if delta < DELTA_FLOOR:
        raise ResolutionError(f"delta {delta} is below the floor {DELTA_FLOOR}")
    if quad.kind == "graded":
        depth = quad.resolution["depth"]
        if depth ** delta > 1e-3:
            raise ResolutionError(f"graded rule stops at {depth:g}; delta={delta} needs depth <= {1e-3 ** (1 / delta):g}")
        return
    need = int(np.ceil(64 / delta ** 2))
    if quad.size < need:
        raise ResolutionError(f"delta={delta} needs at least {need} nodes, grid has {quad.size}")
    if np.any(distance_to_one(quad) == 0):
        raise ResolutionError("grid contains the singular point 1; use a shifted or graded rule")


def _spike_antiderivative(x, s):
    """int_0^x |2 sin(u/2)|^s du for 0 <= x <= pi."""
    from scipy.special import hyp2f1

    y = np.sin(np.asarray(x, float) / 2)
    return 2 ** (s + 1) * y ** (s + 1) / (s + 1) * hyp2f1(0.5, (s + 1) / 2, (s + 3) / 2, y * y)


def spike_cell_averages(quad: SphereQuadrature, delta: float) -> GridFunc:
    """Averages of |1 - xi|^(delta - 1) over the arcs centred at the nodes of a uniform circle rule.

    Finite at every node, including xi = 1 itself.
    """
    if quad.n != 1 or quad.kind != "uniform":
        raise ValueError("cell averages need the uniform circle rule")
    require_resolution_cells(quad, delta)
    s = delta - 1.0
    N = quad.size
    half = np.pi / N
    th = np.abs(np.angle(quad.nodes[:, 0]))
    a, b = th - half, th + half

    def F(x):
        # odd extension to [-pi, 0] and reflection through pi
        sign = np.sign(x)
        x = np.abs(x)
        top = _spike_antiderivative(np.pi, s)
        inner = np.where(x <= np.pi, _spike_antiderivative(np.minimum(x, np.pi), s),
                         2 * top - _spike_antiderivative(np.clip(2 * np.pi - x, 0, np.pi), s))
        return sign * inner

    return GridFunc(quad, (F(b) - F(a)) / (2 * half))


def require_resolution_cells(quad: SphereQuadrature, delta: float):
    if delta < DELTA_FLOOR:
        raise ResolutionError(f"delta {delta} is below the floor {DELTA_FLOOR}")
    need = int(np.ceil(64 / delta ** 2))
    if quad.size < need:
        raise ResolutionError(f"delta={delta} needs at least {need} nodes, grid has {quad.size}")
