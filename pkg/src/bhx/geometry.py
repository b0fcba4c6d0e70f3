"""Nonisotropic geometry of the unit ball of C^n and quadrature on the sphere and ball.

Points are stored as complex arrays whose last axis has length n.  Every
function that takes points broadcasts over leading axes, so a single point is
just the ``(n,)`` case of an ``(m, n)`` batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

SQRT2 = math.sqrt(2.0)


class UnsupportedDimension(ValueError):
    pass


def as_points(z) -> np.ndarray:
    a = np.asarray(z, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1)
    return a


def inner(z, w) -> np.ndarray:
    """Hermitian product sum_i z_i conj(w_i) over the last axis."""
    return np.sum(as_points(z) * np.conj(as_points(w)), axis=-1)


def ni_distance(z, w) -> np.ndarray:
    """d(z, w) = |1 - <z, w>|^(1/2)."""
    return np.sqrt(np.abs(1.0 - inner(z, w)))


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = as_points(self.coords).ravel()
        nrm = np.linalg.norm(c)
        if nrm == 0:
            raise ValueError("zero vector has no direction")
        object.__setattr__(self, "coords", c / nrm)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class BallPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = as_points(self.coords).ravel()
        if np.linalg.norm(c) > 1.0 + 1e-12:
            raise ValueError("point lies outside the closed unit ball")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def coords_of(p) -> np.ndarray:
    if isinstance(p, (SpherePoint, BallPoint)):
        return p.coords
    return as_points(p)


def unit(n: int, i: int = 0) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def sphere_moment(n: int, k: int) -> float:
    """Closed form of the integral of |zeta_1|^(2k) against normalized sigma."""
    return math.factorial(k) * math.factorial(n - 1) / math.factorial(n + k - 1)


def circle_ball_measure(r: float) -> float:
    """Exact sigma(B(zeta, r)) on the unit circle."""
    if r >= SQRT2:
        return 1.0
    return (2.0 / math.pi) * math.asin(r * r / 2.0)


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class SphereQuadrature:
    nodes: np.ndarray  # (N, n) complex, unit vectors
    weights: np.ndarray  # (N,), sums to 1
    n: int
    resolution: dict = field(default_factory=dict)
    kind: str = "uniform"

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def integrate(self, values) -> complex | float:
        v = np.asarray(values)
        return np.tensordot(v, self.weights, axes=([-1], [0]))

    @property
    def angles(self) -> np.ndarray:
        """Arguments of the nodes (n = 1 only)."""
        if self.n != 1:
            raise UnsupportedDimension("angles are defined for n = 1")
        return np.angle(self.nodes[:, 0])

    @property
    def spacing(self) -> float:
        """Largest nonisotropic gap between neighbouring nodes (a resolution scale)."""
        if self.n == 1:
            th = np.sort(np.mod(self.angles, 2 * np.pi))
            gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
            return float(np.sqrt(2 * np.sin(gaps.max() / 2)))
        m = self.resolution.get("phi", None)
        if m:
            return float(np.sqrt(2 * np.sin(np.pi / m)))
        return float((1.0 / self.size) ** (1.0 / (2 * self.n)))

    def descriptor(self) -> dict:
        return {"dim": self.n, "kind": self.kind, **self.resolution}


def _circle_rule(count: int) -> SphereQuadrature:
    th = 2 * np.pi * np.arange(count) / count
    nodes = np.exp(1j * th)[:, None]
    w = np.full(count, 1.0 / count)
    return SphereQuadrature(nodes, w, 1, {"resolution": count}, "uniform")


def _hopf_rule(phi: int, t_nodes: int) -> SphereQuadrature:
    # zeta = (sqrt(t) e^{i a}, sqrt(1-t) e^{i b}); t is uniform on [0, 1] under sigma
    x, wx = leggauss(t_nodes)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * wx
    ang = 2 * np.pi * np.arange(phi) / phi
    T, A, B = np.meshgrid(t, ang, ang, indexing="ij")
    z1 = np.sqrt(T) * np.exp(1j * A)
    z2 = np.sqrt(1.0 - T) * np.exp(1j * B)
    nodes = np.stack([z1.ravel(), z2.ravel()], axis=-1)
    w = np.broadcast_to(wt[:, None, None] / (phi * phi), T.shape).ravel().copy()
    return SphereQuadrature(nodes, w, 2, {"resolution": phi, "phi": phi, "t_nodes": t_nodes}, "hopf")


def make_sphere_quadrature(n: int, resolution) -> SphereQuadrature:
    """Deterministic rule on S_n.

    n = 1: ``resolution`` equispaced angles.  n = 2: ``resolution`` uniform
    points in each torus angle times ``resolution // 2`` Gauss nodes in
    t = |zeta_1|^2 (a tuple ``(phi, t_nodes)`` overrides the split).
    """
    if n == 1:
        r = int(resolution)
        if r <= 0:
            raise ValueError("resolution must be positive")
        return _circle_rule(r)
    if n == 2:
        if isinstance(resolution, (tuple, list)):
            phi, tn = int(resolution[0]), int(resolution[1])
        else:
            phi, tn = int(resolution), max(1, int(resolution) // 2)
        if phi <= 0 or tn <= 0:
            raise ValueError("resolution must be positive")
        return _hopf_rule(phi, tn)
    raise UnsupportedDimension(
        f"no deterministic rule for n={n}; use make_monte_carlo_quadrature for sanity checks"
    )


def make_monte_carlo_quadrature(n: int, count: int, seed: int = 0) -> SphereQuadrature:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return SphereQuadrature(g, np.full(count, 1.0 / count), n, {"count": count, "seed": seed}, "monte_carlo")


def graded_panels(lo: float, hi: float, ratio: float, order: int):
    """Composite Gauss-Legendre on [lo, hi] with panels shrinking geometrically toward lo."""
    edges = [hi]
    while edges[-1] * ratio > lo:
        edges.append(edges[-1] * ratio)
    edges.append(lo)
    edges = np.array(edges[::-1])
    x, w = leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    pts = (0.5 * (b - a) * (x + 1) + a).ravel()
    wts = (0.5 * (b - a) * w).ravel()
    return pts, wts


def make_graded_circle_quadrature(resolution: int = 256, depth: float = 1e-96, order: int = 4) -> SphereQuadrature:
    """Circle rule refined geometrically toward the point 1.

    Panels halve in width from a uniform outer part (``resolution`` panels on the
    whole circle) down to arc length ``depth``; each panel carries ``order``
    Gauss nodes.  Meant for boundary data with an algebraic singularity at 1.
    """
    x, w = leggauss(order)
    outer = np.pi * 2.0 / resolution
    inner_pts, inner_w = graded_panels(depth, outer, 0.5, order)
    # first panel [0, depth]
    p0 = 0.5 * depth * (x + 1)
    w0 = 0.5 * depth * w
    nout = max(1, int(round((np.pi - outer) / outer)))
    e = np.linspace(outer, np.pi, nout + 1)
    a, b = e[:-1, None], e[1:, None]
    out_pts = (0.5 * (b - a) * (x + 1) + a).ravel()
    out_w = (0.5 * (b - a) * w).ravel()
    half = np.concatenate([p0, inner_pts, out_pts])
    hw = np.concatenate([w0, inner_w, out_w])
    th = np.concatenate([-half[::-1], half])
    wt = np.concatenate([hw[::-1], hw]) / (2 * np.pi)
    wt /= wt.sum()
    nodes = np.exp(1j * th)[:, None]
    res = {"resolution": resolution, "depth": depth, "order": order}
    return SphereQuadrature(nodes, wt, 1, res, "graded")


def graded_angles(sq: SphereQuadrature) -> np.ndarray:
    """Signed angles in (-pi, pi]; exact for graded rules (no wrap through angle())."""
    return np.angle(sq.nodes[:, 0])


@dataclass(frozen=True)
class BallQuadrature:
    sphere: SphereQuadrature
    radii: np.ndarray
    radial_weights: np.ndarray  # include 2n r^(2n-1)
    eps_cut: float

    @property
    def n(self) -> int:
        return self.sphere.n

    @property
    def nodes(self) -> np.ndarray:
        return (self.radii[:, None, None] * self.sphere.nodes[None, :, :]).reshape(-1, self.n)

    @property
    def weights(self) -> np.ndarray:
        return (self.radial_weights[:, None] * self.sphere.weights[None, :]).ravel()

    @property
    def size(self) -> int:
        return self.radii.size * self.sphere.size

    def integrate(self, values):
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))

    def descriptor(self) -> dict:
        return {
            "dim": self.n,
            "resolution": self.sphere.resolution.get("resolution"),
            "eps_cut": self.eps_cut,
            "radial_nodes": int(self.radii.size),
        }


def make_ball_quadrature(sq: SphereQuadrature, radial_nodes: int, eps_cut: float = 1e-4,
                         outer: float | None = None) -> BallQuadrature:
    """Gauss-Legendre in r on [0, 1 - eps_cut] against 2n r^(2n-1) dr, times ``sq``.

    ``outer`` replaces 1 - eps_cut when a smaller ball r B_n is wanted.
    """
    if radial_nodes <= 0:
        raise ValueError("radial_nodes must be positive")
    if not (1e-6 <= eps_cut <= 0.5):
        raise ValueError("eps_cut must lie in [1e-6, 0.5]")
    R = 1.0 - eps_cut if outer is None else float(outer)
    x, w = leggauss(radial_nodes)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * w * 2 * sq.n * r ** (2 * sq.n - 1)
    return BallQuadrature(sq, r, wr, eps_cut)


def ball_measure(zeta, r: float, quad: SphereQuadrature) -> float:
    """Quadrature estimate of sigma(B(zeta, r)); exactly 1 once r >= sqrt(2)."""
    if r >= SQRT2:
        return 1.0
    d = ni_distance(quad.nodes, coords_of(zeta))
    return float(quad.weights[d < r].sum())


# ---------------------------------------------------------------- regions


@dataclass(frozen=True)
class RegionSpec:
    kind: str  # "koranyi" | "tent" | "EQ" | "Fk"
    zeta: np.ndarray
    alpha: float = 1.0
    scale: float = 0.0  # C_1 r_Q for cube regions
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "zeta", coords_of(self.zeta))
        if self.kind == "koranyi" and not self.alpha > 0.5:
            raise ValueError("Koranyi aperture must exceed 1/2")
        if self.kind == "tent" and not self.alpha > 0:
            raise ValueError("tent aperture must be positive")
        if self.kind == "Fk" and self.k < 1:
            raise ValueError("annulus index k must be >= 1")
        if self.kind not in ("koranyi", "tent", "EQ", "Fk"):
            raise ValueError(f"unknown region kind {self.kind!r}")


def koranyi(alpha: float, zeta) -> RegionSpec:
    return RegionSpec("koranyi", zeta, alpha=alpha)


def tent(alpha: float, zeta) -> RegionSpec:
    return RegionSpec("tent", zeta, alpha=alpha)


def region_contains(spec: RegionSpec, z) -> np.ndarray:
    z = as_points(z)
    zeta = spec.zeta
    if spec.kind == "koranyi":
        s = np.sum(np.abs(z) ** 2, axis=-1)
        return np.abs(1.0 - inner(z, zeta)) < spec.alpha * (1.0 - s)
    if spec.kind == "tent":
        r = np.linalg.norm(z, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        eta = z / safe[..., None]
        out = np.abs(1.0 - inner(eta, zeta)) < spec.alpha * (1.0 - r)
        # at the origin eta is free, and eta = zeta always qualifies
        return out | (r == 0)
    d = ni_distance(z, zeta)
    if spec.kind == "EQ":
        return d < 2 * spec.scale
    return (2 ** spec.k * spec.scale <= d) & (d < 2 ** (spec.k + 1) * spec.scale)


def tent_aperture_for(alpha: float) -> float:
    """Aperture of the tent that contains the Koranyi region of aperture ``alpha``."""
    return (1.0 + math.sqrt(2.0 * alpha)) ** 2


def random_sphere(n: int, m: int, rng) -> np.ndarray:
    g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_ball(n: int, m: int, rng, rmax: float = 1.0) -> np.ndarray:
    """Uniform points of the ball of radius ``rmax`` (volume measure)."""
    s = random_sphere(n, m, rng)
    r = rmax * rng.random(m) ** (1.0 / (2 * n))
    return s * r[:, None]


def unitary_to(zeta) -> np.ndarray:
    """A unitary matrix U with U e_1 = zeta (columns orthonormal)."""
    z = coords_of(zeta)
    n = z.size
    m = np.eye(n, dtype=complex)
    m[:, 0] = z
    q, r = np.linalg.qr(m)
    ph = r[0, 0] / abs(r[0, 0])
    q[:, 0] *= ph
    return q


# ---------------------------------------------------------------- circle arcs


def arc_halfwidth(rho) -> np.ndarray:
    """Angular half-width of B(zeta, rho) on the unit circle (pi once rho >= sqrt 2)."""
    rho = np.asarray(rho, dtype=float)
    return np.where(rho >= SQRT2, np.pi, 2 * np.arcsin(np.minimum(rho * rho / 2, 1.0)))


class ArcSums:
    """Prefix sums over a circle rule sorted by angle, for fast sums over arcs.

    ``sum(values, theta, half)`` returns sum of values over nodes with
    |angle - theta| < half (mod 2 pi), vectorized over theta and half.
    """

    def __init__(self, quad: SphereQuadrature):
        if quad.n != 1:
            raise UnsupportedDimension("arc sums need n = 1")
        # keep angles in [-pi, pi) so nodes clustered at angle 0 keep full precision
        th = np.angle(quad.nodes[:, 0])
        th = np.where(th >= np.pi, th - 2 * np.pi, th)
        self.order = np.argsort(th, kind="stable")
        self.theta = th[self.order]
        self.quad = quad

    def _prefix(self, values):
        # anchored at angle 0: tiny arcs around the point 1 difference tiny partial sums
        v = np.asarray(values)[self.order]
        m0 = int(np.searchsorted(self.theta, 0.0))
        right = np.cumsum(v[m0:])
        left = -np.cumsum(v[:m0][::-1])[::-1]
        return np.concatenate([left, [0.0], right])

    def _count_below(self, x):
        # number of nodes with angle < x, x may be any real; wraps periodically
        k, r = self._reduce(x)
        return k, np.searchsorted(self.theta, r, side="left")

    @staticmethod
    def _reduce(x):
        k = np.floor((x + np.pi) / (2 * np.pi))
        return k, np.where(k == 0, x, x - 2 * np.pi * k)

    def sums(self, values, theta, half, closed: bool = False):
        theta = np.asarray(theta, float)
        half = np.asarray(half, float)
        cs = self._prefix(values)
        total = cs[-1] - cs[0]
        N = self.theta.size
        full = half >= np.pi
        lo = theta - half
        hi = theta + half
        klo, ilo = self._count_below(lo)
        if closed:
            khi, r = self._reduce(hi)
            ihi = np.searchsorted(self.theta, r, side="right")
        else:
            khi, ihi = self._count_below(hi)
        # exclude the left endpoint itself (open arc): nodes with angle <= lo
        if not closed:
            r = self._reduce(lo)[1]
            ilo = np.searchsorted(self.theta, r, side="right")
        out = (khi - klo) * total + cs[np.minimum(ihi, N)] - cs[np.minimum(ilo, N)]
        return np.where(full, total, out)
