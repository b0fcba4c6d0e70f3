"""Dyadic cubes on sphere grids, Whitney and Calderón-Zygmund decompositions,
medians, rearrangements, oscillations, local-mean-oscillation sparse families
and the sparse square operator.

Everything lives on the node set of a :class:`SphereQuadrature`: a cube is a
set of node indices and its measure is the sum of their weights.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import SQRT2, SphereQuadrature, ni_distance
from .maximal import hl_maximal
from .transforms import GridFunc
from .weights import ball_averages_at, default_radii

TOL = 1e-12


class ParameterError(ValueError):
    pass


class ResolutionError(ValueError):
    pass


def _dist_rows(quad: SphereQuadrature, rows, cols=None, chunk: int = 4_000_000):
    """Distance matrix between node index arrays (chunked over rows)."""
    nodes = quad.nodes
    rows = np.asarray(rows)
    cols = np.arange(quad.size) if cols is None else np.asarray(cols)
    B = nodes[cols]
    step = max(1, chunk // max(1, cols.size))
    for s in range(0, rows.size, step):
        A = nodes[rows[s:s + step]]
        yield s, ni_distance(A[:, None, :], B[None, :, :])


def farthest_point_order(quad: SphereQuadrature, stop: float, seed: int = 0):
    """Greedy farthest-point insertion; returns (order, insertion distances).

    Insertion stops once every node lies within ``stop`` of the chosen set.
    The prefix with insertion distance >= s is an s-separated, s-covering net,
    and the nets for decreasing s are nested.
    """
    rng = np.random.default_rng(seed)
    start = int(rng.integers(quad.size))
    nodes = quad.nodes
    mind = np.full(quad.size, np.inf)
    order, dists = [], []
    cur, d = start, np.inf
    while True:
        order.append(cur)
        dists.append(d)
        mind = np.minimum(mind, ni_distance(nodes, nodes[cur]))
        cur = int(np.argmax(mind))
        d = float(mind[cur])
        if d < stop or d == 0:
            break
    return np.array(order), np.array(dists)


@dataclass
class Cube:
    id: int
    level: int
    center: int  # node index
    radius: float  # r^k
    nodes: np.ndarray
    measure: float
    parent: int | None = None
    children: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "level": self.level, "center": self.center, "radius": self.radius,
                "nodes": self.nodes.tolist(), "measure": self.measure, "parent": self.parent,
                "children": list(self.children)}


@dataclass
class DyadicSystem:
    quad: SphereQuadrature
    c0: float
    C0: float
    r: float
    k_min: int
    k_max: int
    seed: int
    cubes: list
    levels: dict  # k -> list of cube ids
    assignment: dict  # k -> (N,) cube id per node

    @property
    def c1(self) -> float:
        return self.c0 / 3

    @property
    def C1(self) -> float:
        return 2 * self.C0

    @property
    def level_count(self) -> int:
        return self.k_max - self.k_min + 1

    def cube(self, i: int) -> Cube:
        return self.cubes[i]

    def descendants(self, i: int):
        stack = [i]
        while stack:
            q = stack.pop()
            yield q
            stack.extend(self.cubes[q].children)

    def containing(self, node: int):
        """Cube ids containing ``node``, coarse to fine."""
        return [int(self.assignment[k][node]) for k in range(self.k_min, self.k_max + 1)]

    def to_json(self) -> str:
        return json.dumps({
            "params": {"c0": self.c0, "C0": self.C0, "r": self.r, "k_min": self.k_min,
                       "k_max": self.k_max, "seed": self.seed},
            "quadrature": self.quad.descriptor(),
            "levels": {str(k): v for k, v in self.levels.items()},
            "centers": {str(k): [self.cubes[i].center for i in v] for k, v in self.levels.items()},
            "assignment": {str(k): v.tolist() for k, v in self.assignment.items()},
            "cubes": [c.to_dict() for c in self.cubes],
        }, sort_keys=True)


def build_system(quad: SphereQuadrature, c0: float = 1.0, C0: float = 1.0, r: float = 1 / 12,
                 k_min: int = -3, k_max: int = 2, seed: int = 0) -> DyadicSystem:
    if not (0 < r < 1 and c0 > 0 and C0 >= c0):
        raise ParameterError("need 0 < r < 1 and 0 < c0 <= C0")
    if 12 * C0 * r > c0 * (1 + 1e-12):
        raise ParameterError("parameters violate 12 C0 r <= c0")
    if k_max < k_min:
        raise ParameterError("k_max must be >= k_min")
    if r ** k_max < quad.spacing * r:
        raise ResolutionError(
            f"level {k_max} has scale {r ** k_max:.3g}, more than one level below the node spacing {quad.spacing:.3g}")
    order, dist = farthest_point_order(quad, c0 * r ** k_max, seed)
    w = quad.weights
    cubes: list[Cube] = []
    levels: dict = {}
    assignment: dict = {}
    parents_of_level = None
    for k in range(k_min, k_max + 1):
        centers = order[dist >= c0 * r ** k]
        assign = np.empty(quad.size, dtype=int)
        ids = []
        if parents_of_level is None:
            groups = [(None, np.arange(quad.size), centers)]
        else:
            groups = []
            center_cube = assignment[k - 1][centers]
            for pid in parents_of_level:
                groups.append((pid, cubes[pid].nodes, centers[center_cube == pid]))
        for pid, members, kids in groups:
            if kids.size == 0:
                raise RuntimeError("cube without a child center; nets are not nested")
            if kids.size == 1:
                near = np.zeros(members.size, dtype=int)
            else:
                near = np.empty(members.size, dtype=int)
                for s, D in _dist_rows(quad, members, kids):
                    near[s:s + D.shape[0]] = np.argmin(D, axis=1)
            for j, c in enumerate(kids):
                part = members[near == j]
                cid = len(cubes)
                cubes.append(Cube(cid, k, int(c), r ** k, np.sort(part), float(w[part].sum()), pid))
                if pid is not None:
                    cubes[pid].children.append(cid)
                assign[part] = cid
                ids.append(cid)
        levels[k] = ids
        assignment[k] = assign
        parents_of_level = ids
    return DyadicSystem(quad, c0, C0, r, k_min, k_max, seed, cubes, levels, assignment)


def build_adjacent(quad: SphereQuadrature, count: int = 3, **params):
    """``count`` systems from differently seeded nets, plus the achieved covering dilation.

    Returns (systems, report) where report["dilation"] is the largest, over
    grid-resolved balls B(zeta, rho), of the smallest ratio C1 r_Q / rho among
    cubes Q (any system) containing the ball's nodes.
    """
    seed0 = params.pop("seed", 0)
    systems = [build_system(quad, seed=seed0 + i, **params) for i in range(count)]
    radii = default_radii(quad, 12)
    radii = radii[radii < SQRT2]
    worst = 0.0
    D = ni_distance(quad.nodes[:, None, :], quad.nodes[None, :, :]) if quad.size <= 3000 else None
    for zi in range(0, quad.size, max(1, quad.size // 256)):
        d = D[zi] if D is not None else ni_distance(quad.nodes, quad.nodes[zi])
        for rho in radii:
            ball = np.flatnonzero(d < rho)
            best = np.inf
            for S in systems:
                for k in range(S.k_max, S.k_min - 1, -1):
                    ids = np.unique(S.assignment[k][ball])
                    if ids.size == 1:
                        best = min(best, S.C1 * S.r ** k / rho)
                        break
            worst = max(worst, best)
    return systems, {"systems": count, "dilation": worst}


def check_system(S: DyadicSystem) -> dict:
    """Exhaustive node-level check of the partition, nesting and sandwich properties."""
    quad = S.quad
    out = {"partition": True, "nesting": True, "children": True, "inflation": 1.0,
           "parent_child_ratio": 1.0, "levels": S.level_count}
    for k in range(S.k_min, S.k_max + 1):
        seen = np.zeros(quad.size, dtype=int)
        for cid in S.levels[k]:
            seen[S.cubes[cid].nodes] += 1
        out["partition"] &= bool(np.all(seen == 1))
    for c in S.cubes:
        if c.level < S.k_max:
            out["children"] &= len(c.children) >= 1
        if c.level > S.k_min:
            out["children"] &= c.parent is not None
            par = S.cubes[c.parent]
            out["nesting"] &= bool(np.all(np.isin(c.nodes, par.nodes)))
            out["parent_child_ratio"] = max(out["parent_child_ratio"], par.measure / c.measure)
        out["children"] &= c.measure > 0
    lam = 1.0
    for c in S.cubes:
        d = ni_distance(quad.nodes, quad.nodes[c.center])
        inside = np.zeros(quad.size, bool)
        inside[c.nodes] = True
        lam = max(lam, float(d[inside].max()) / (S.C1 * c.radius))
        if (~inside).any():
            m = float(d[~inside].min())
            lam = max(lam, S.c1 * c.radius / m if m > 0 else np.inf)
    out["inflation"] = lam
    out["sandwich"] = lam <= 2.0
    return out


# ---------------------------------------------------------------- Whitney


@dataclass
class Whitney:
    omega: np.ndarray  # node indices of the open set
    centers: np.ndarray
    radii: np.ndarray
    cube_of: np.ndarray  # for each node of omega, index into centers
    a1: float
    a2: float
    a3: float

    def cubes(self):
        return [self.omega[self.cube_of == j] for j in range(self.centers.size)]


def _distance_to_complement(quad, omega, comp):
    out = np.empty(omega.size)
    for s, D in _dist_rows(quad, omega, comp):
        out[s:s + D.shape[0]] = D.min(axis=1)
    return out


def whitney_decompose(omega_mask, quad: SphereQuadrature, a1: float = 0.25, a2: float = 2.0,
                      a3: float = 6.0) -> Whitney:
    """Whitney balls B(zeta_k, r_k) with r_k = dist(zeta_k, complement) / a3 and derived disjoint cubes."""
    omega_mask = np.asarray(omega_mask, bool)
    omega = np.flatnonzero(omega_mask)
    comp = np.flatnonzero(~omega_mask)
    if omega.size == 0 or comp.size == 0:
        raise ValueError("Whitney decomposition needs a nonempty proper subset")
    if not (0 < a1 < 1 < a2 < a3):
        raise ValueError("need 0 < a1 < 1 < a2 < a3")
    delta = _distance_to_complement(quad, omega, comp)
    rad = delta / a3 * (1 + 1e-9)
    sel = []
    covered = np.zeros(omega.size, bool)
    nodes = quad.nodes[omega]
    for i in np.argsort(-delta, kind="stable"):
        if covered[i]:
            continue
        sel.append(i)
        covered |= ni_distance(nodes, nodes[i]) < rad[i]
    sel = np.array(sel)
    centers, radii = omega[sel], rad[sel]
    cube_of = np.empty(omega.size, dtype=int)
    for s, D in _dist_rows(quad, omega, centers):
        rel = D / radii[None, :]
        cube_of[s:s + D.shape[0]] = np.argmin(rel, axis=1)
    return Whitney(omega, centers, radii, cube_of, a1, a2, a3)


def check_whitney(W: Whitney, quad: SphereQuadrature) -> dict:
    N = quad.size
    in_omega = np.zeros(N, bool)
    in_omega[W.omega] = True
    cover = np.zeros(N, int)
    overlap = np.zeros(N, int)
    small = np.zeros(N, int)
    inner_ok = meets_ok = True
    for c, r in zip(W.centers, W.radii):
        d = ni_distance(quad.nodes, quad.nodes[c])
        cover += d < r
        overlap += d < W.a2 * r
        small += d < W.a1 * r
        inner_ok &= bool(np.all(in_omega[d < W.a2 * r]))
        meets_ok &= bool(np.any(~in_omega[d < W.a3 * r]))
    cubes = W.cubes()
    sizes = np.zeros(N, int)
    cube_ok = True
    for (c, r), q in zip(zip(W.centers, W.radii), cubes):
        sizes[q] += 1
        d = ni_distance(quad.nodes, quad.nodes[c])
        qm = np.zeros(N, bool)
        qm[q] = True
        cube_ok &= bool(np.all(qm[d < W.a1 * r])) and bool(np.all(d[q] < r))
    return {
        "union": bool(np.all((cover > 0) == in_omega)),
        "inside_and_meets": inner_ok and meets_ok,
        "disjoint": bool(small.max() <= 1),
        "overlap": int(overlap.max()),
        "cubes_partition": bool(np.all(sizes[in_omega] == 1) and np.all(sizes[~in_omega] == 0)),
        "cubes_sandwich": cube_ok,
        "balls": int(W.centers.size),
    }


# ---------------------------------------------------------------- Calderón-Zygmund


@dataclass
class CZOutput:
    t: float
    omega: np.ndarray  # boolean mask
    whitney: Whitney | None
    good: GridFunc
    bad: list  # (node indices, values on them)
    constants: dict

    def reconstruct(self) -> np.ndarray:
        v = np.array(self.good.values, dtype=complex if np.iscomplexobj(self.good.values) else float)
        for idx, vals in self.bad:
            v[idx] += vals
        return v


def maximal_with_centre(f: GridFunc, radii=None) -> np.ndarray:
    """Mf at every node over radii that include a ball holding only the centre node."""
    rr = default_radii(f.quad) if radii is None else np.asarray(radii, float)
    return hl_maximal(f, radii=np.union1d(rr, [1e-12]))


def cz_decompose(f: GridFunc, t: float, radii=None) -> CZOutput:
    quad = f.quad
    w = quad.weights
    l1 = f.l1()
    if t <= l1:
        raise ValueError("threshold must exceed the mean of |f| (else the exceptional set is the sphere)")
    Mf = maximal_with_centre(f, radii)
    omega = Mf > t
    consts = {"good_sup": 0.0, "measure_sum": 0.0, "bad_l1": 0.0}
    if not omega.any():
        consts["good_sup"] = float(np.abs(f.values).max()) / t
        return CZOutput(t, omega, None, f, [], consts)
    if omega.all():
        raise ValueError("exceptional set is the whole sphere")
    W = whitney_decompose(omega, quad)
    g = np.array(f.values, dtype=float if f.is_real else complex)
    bad = []
    worst_b = 0.0
    for q in W.cubes():
        m = float(w[q].sum())
        avg = np.dot(w[q], f.values[q]) / m
        g[q] = avg
        b = f.values[q] - avg
        bad.append((q, b))
        worst_b = max(worst_b, float(np.dot(w[q], np.abs(b))) / (t * m))
    consts["good_sup"] = float(np.abs(g).max()) / t
    consts["measure_sum"] = float(w[omega].sum()) * t / l1
    consts["bad_l1"] = worst_b
    consts["balls"] = int(W.centers.size)
    return CZOutput(t, omega, W, GridFunc(quad, g), bad, consts)


# ---------------------------------------------------------------- medians and rearrangements


def _real_on(f: GridFunc, nodes):
    v = f.values[nodes]
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise ValueError("median needs real-valued data")
        v = v.real
    return v


def median(f: GridFunc, Q) -> float:
    """Smallest node value m with sigma{f > m} <= sigma(Q)/2 and sigma{f < m} <= sigma(Q)/2."""
    nodes = Q.nodes if isinstance(Q, Cube) else np.asarray(Q)
    if nodes.size == 0:
        raise ValueError("empty cube")
    v = _real_on(f, nodes)
    w = f.quad.weights[nodes]
    half = w.sum() / 2
    u, inv = np.unique(v, return_inverse=True)
    mass = np.bincount(inv, weights=w, minlength=u.size)
    below = np.concatenate([[0.0], np.cumsum(mass)[:-1]])
    above = w.sum() - below - mass
    ok = (below <= half * (1 + TOL)) & (above <= half * (1 + TOL))
    return float(u[np.argmax(ok)])


def rearrangement(f: GridFunc, t: float, nodes=None) -> float:
    """(chi_E f)^*(t) = inf{a > 0 : sigma{|f chi_E| > a} <= t}; E defaults to the sphere."""
    if t <= 0:
        raise ValueError("t must be positive")
    idx = np.arange(f.quad.size) if nodes is None else np.asarray(nodes)
    return _rearr(np.abs(f.values[idx]), f.quad.weights[idx], t)


def _rearr(a, w, t):
    # candidates are 0 and the distinct values; mass strictly above each one
    u, inv = np.unique(a, return_inverse=True)
    mass = np.bincount(inv, weights=w, minlength=u.size)
    total = mass.sum()
    above0 = total - (mass[0] if u[0] == 0 else 0.0)
    if above0 <= t * (1 + TOL):
        return 0.0
    above = total - np.cumsum(mass)
    return float(u[np.argmax(above <= t * (1 + TOL))])


def oscillation(f: GridFunc, Q, eps: float) -> float:
    """inf over c of (chi_Q (f - c))^*(eps sigma(Q)), exactly.

    The inf is the half-width of the narrowest window of sorted values on Q
    holding at least (1 - eps) sigma(Q) of the mass.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    nodes = Q.nodes if isinstance(Q, Cube) else np.asarray(Q)
    v = _real_on(f, nodes)
    w = f.quad.weights[nodes]
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    need = w.sum() * (1 - eps) * (1 - TOL)
    cs = np.concatenate([[0.0], np.cumsum(w)])
    # for each left end i the smallest j with cs[j+1] - cs[i] >= need
    j = np.searchsorted(cs, cs[:-1] + need, side="left") - 1
    valid = j < v.size
    if not valid.any():
        return 0.0
    i = np.flatnonzero(valid)
    width = v[np.maximum(j[valid], i)] - v[i]
    return float(max(width.min(), 0.0) / 2)


# ---------------------------------------------------------------- local mean oscillation


@dataclass
class SparseFamily:
    system: DyadicSystem
    cubes: list
    eps: float
    partial: bool = False
    carved: dict = field(default_factory=dict)  # cube id -> carved node indices E(Q)

    @property
    def density(self) -> float:
        """max sigma(Q) / sigma(E(Q)); a sparse family has density <= 2."""
        w = self.system.quad.weights
        best = 1.0
        for q in self.cubes:
            e = float(w[self.carved[q]].sum())
            best = max(best, self.system.cubes[q].measure / e if e > 0 else np.inf)
        return best

    def to_json(self) -> str:
        return json.dumps({"cubes": list(map(int, self.cubes)), "eps": self.eps,
                           "density": self.density, "partial": self.partial}, sort_keys=True)


def child_ratio_floor(S: DyadicSystem, root: int) -> float:
    """min sigma(child) / sigma(parent) over the tree below ``root``, capped at 1/2."""
    best = 0.5
    for q in S.descendants(root):
        c = S.cubes[q]
        for ch in c.children:
            best = min(best, S.cubes[ch].measure / c.measure)
    return best


def _carve(S: DyadicSystem, members):
    w_set = set(members)
    carved = {}
    for q in members:
        rest = np.zeros(S.quad.size, bool)
        rest[S.cubes[q].nodes] = True
        stack = list(S.cubes[q].children)
        while stack:
            p = stack.pop()
            if p in w_set:
                rest[S.cubes[p].nodes] = False
            else:
                stack.extend(S.cubes[p].children)
        carved[q] = np.flatnonzero(rest)
    return carved


def lmo_decompose(f: GridFunc, S: DyadicSystem, root: int, eps: float | None = None) -> SparseFamily:
    """Stopping-cube recursion of the local mean oscillation decomposition below cube ``root``.

    ``eps`` defaults to a quarter of the child/parent measure floor of the tree.
    """
    eps = child_ratio_floor(S, root) / 4 if eps is None else eps
    meds: dict = {}

    def med(q):
        if q not in meds:
            meds[q] = median(f, S.cubes[q])
        return meds[q]

    family = []
    partial = False
    frontier = [(root, 0)]
    while frontier:
        q0, depth = frontier.pop()
        family.append(q0)
        if depth > S.level_count:
            partial = True
            continue
        c0 = S.cubes[q0]
        m0 = med(q0)
        thr = _rearr(np.abs(_real_on(f, c0.nodes) - m0), S.quad.weights[c0.nodes], eps * c0.measure)
        stops = []
        stack = [q0]
        while stack:
            q = stack.pop()
            kids = S.cubes[q].children
            if kids and max(abs(med(ch) - m0) for ch in kids) > thr:
                if q == q0:
                    raise RuntimeError("root cube satisfies its own stopping rule; eps too large")
                stops.append(q)
            else:
                stack.extend(kids)
        frontier.extend((s, depth + 1) for s in stops)
    fam = SparseFamily(S, family, eps, partial)
    fam.carved = _carve(S, family)
    return fam


def lmo_domination(f: GridFunc, fam: SparseFamily, root: int) -> dict:
    """Node-wise check of |f - m_f(Q0)| <= 2 sum_Q omega_eps(f;Q) chi_Q on Q0."""
    S = fam.system
    nodes = S.cubes[root].nodes
    rhs = np.zeros(S.quad.size)
    for q in fam.cubes:
        rhs[S.cubes[q].nodes] += 2 * oscillation(f, S.cubes[q], fam.eps)
    lhs = np.abs(_real_on(f, nodes) - median(f, S.cubes[root]))
    ok = lhs <= rhs[nodes] * (1 + 1e-12) + 1e-12 * (1 + lhs)
    w = S.quad.weights[nodes]
    return {"mass_fraction": float(w[ok].sum() / w.sum()), "failures": nodes[~ok].tolist()}


# ---------------------------------------------------------------- sparse operator


def sparse_operator(fam: SparseFamily, m: int, f: GridFunc, zetas=None) -> np.ndarray:
    """T_{2,m} f = (sum over Q of (avg over B(zeta_Q, 2^m C1 r_Q) of |f|)^2 chi_Q)^(1/2) at nodes."""
    S = fam.system
    quad = S.quad
    out = np.zeros(quad.size)
    absf = np.abs(f.values)
    for q in fam.cubes:
        c = S.cubes[q]
        rad = min(2.0 ** m * S.C1 * c.radius, 2.0)
        (avg,), _ = ball_averages_at(quad, [absf], quad.nodes[c.center][None, :], [rad])
        out[c.nodes] += float(avg[0, 0]) ** 2
    out = np.sqrt(out)
    return out if zetas is None else out[np.asarray(zetas)]
