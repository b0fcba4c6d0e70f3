"""Closed-form kernels on the ball: Poisson-Szego, power kernels, radial derivatives, Green function.

Also a handful of sampled checks of the classical kernel estimates; they
return measured constants instead of asserting any particular value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import as_points, inner, ni_distance, random_ball, random_sphere


class SingularKernel(ValueError):
    pass


@dataclass(frozen=True)
class KernelId:
    kind: str  # "poisson" | "kpow" | "xpoisson" | "green"
    ell: int = 1
    X: str = "R"

    def __post_init__(self):
        if self.kind == "kpow" and (int(self.ell) != self.ell or self.ell < 1):
            raise ValueError("power kernel order must be a positive integer")
        if self.kind == "xpoisson" and self.X not in ("R", "Rbar"):
            raise ValueError("X must be R or Rbar")


def _normsq(z):
    return np.sum(np.abs(z) ** 2, axis=-1)


def _interior(z):
    if np.any(_normsq(z) >= 1.0):
        raise SingularKernel("kernel evaluated on the boundary")


def poisson_szego(z, zeta) -> np.ndarray:
    z, zeta = as_points(z), as_points(zeta)
    _interior(z)
    n = z.shape[-1]
    s = _normsq(z)
    return (1 - s) ** n / np.abs(1 - inner(z, zeta)) ** (2 * n)


def xpoisson(X: str, z, xi) -> np.ndarray:
    """R or Rbar applied in z to P(z, xi)."""
    z, xi = as_points(z), as_points(xi)
    _interior(z)
    n = z.shape[-1]
    s = _normsq(z)
    w = inner(z, xi)
    den = np.abs(1 - w)
    second = n * (1 - s) ** (n - 1) * s / den ** (2 * n)
    if X == "R":
        first = n * np.conj(1 - w) * (1 - s) ** n * w / den ** (2 * n + 2)
    elif X == "Rbar":
        first = n * (1 - w) * (1 - s) ** n * np.conj(w) / den ** (2 * n + 2)
    else:
        raise ValueError("X must be R or Rbar")
    return first - second


def kpow(ell: int, z, w) -> np.ndarray:
    q = 1 - inner(z, w)
    if np.any(q == 0):
        raise SingularKernel("<z, w> = 1")
    return q ** (-int(ell))


def green_invariant(z, n: int | None = None) -> np.ndarray:
    """Invariant Green function; accepts points or (with ``n``) radii |z|."""
    if n is None:
        z = as_points(z)
        n = z.shape[-1]
        t = np.sqrt(_normsq(z))
    else:
        t = np.asarray(z, dtype=float)
    if np.any(t == 0):
        raise SingularKernel("Green function is singular at the origin")
    if np.any(t > 1 + 1e-12):
        raise ValueError("point outside the ball")
    t = np.minimum(t, 1.0)
    if n == 1:
        return 0.5 * np.log(1.0 / t)
    if n == 2:
        # (1/4) [-t^-2/2 - ln t] from |z| to 1
        return 0.25 * (-0.5 + 0.5 / t ** 2 + np.log(t))
    flat = np.atleast_1d(t)
    vals = [integrate.quad(lambda s: (1 - s * s) ** (n - 1) * s ** (1 - 2 * n), x, 1.0)[0] / (2 * n) for x in flat]
    return np.reshape(vals, np.shape(t))


# ---------------------------------------------------------------- sampled estimates


def pairing_difference_holds(z, xi, eta) -> np.ndarray:
    """|<z,xi> - <z,eta>| <= 2|1-<z,eta>|^(1/2) |1-<xi,eta>|^(1/2) + |1-<xi,eta>|, elementwise."""
    lhs = np.abs(inner(z, xi) - inner(z, eta))
    a = np.abs(1 - inner(z, eta))
    b = np.abs(1 - inner(xi, eta))
    return lhs <= 2 * np.sqrt(a * b) + b + 1e-14 * (1 + lhs)


def telescoping_holds(ell: int, z, xi, eta) -> np.ndarray:
    lhs = np.abs(kpow(ell, z, eta) - kpow(ell, z, xi))
    diff = inner(z, eta) - inner(z, xi)
    rhs = sum(np.abs(diff * kpow(k + 1, z, eta) * kpow(ell - k, z, xi)) for k in range(ell))
    return lhs <= rhs * (1 + 1e-12) + 1e-300


def xpoisson_size_constant(n: int, samples: int, seed: int = 0, X: str = "R") -> float:
    """Sampled sup of |XP(z,xi)| |1-<z,xi>|^(2n) / (1-|z|^2)^(n-1)."""
    rng = np.random.default_rng(seed)
    z = random_ball(n, samples, rng, rmax=0.999)
    xi = random_sphere(n, samples, rng)
    v = np.abs(xpoisson(X, z, xi)) * np.abs(1 - inner(z, xi)) ** (2 * n) / (1 - _normsq(z)) ** (n - 1)
    return float(v.max())


def comparability_constant(n: int, samples: int, alpha: float = 1.0, C: float = 8.0, seed: int = 0) -> float:
    """Sampled sup of d(zeta, zeta0) / d(z, xi) over configurations with
    d(zeta0, xi) < delta, d(zeta0, zeta) >= C delta and z in D_alpha(zeta)."""
    rng = np.random.default_rng(seed)
    best = 0.0
    got = 0
    tries = 0
    while got < samples and tries < 200:
        tries += 1
        m = 4 * samples
        zeta0 = random_sphere(n, m, rng)
        xi = random_sphere(n, m, rng)
        zeta = random_sphere(n, m, rng)
        z = random_ball(n, m, rng, rmax=0.999)
        delta = ni_distance(zeta0, xi) * (1 + rng.random(m))
        keep = ni_distance(zeta0, zeta) >= C * delta
        keep &= np.abs(1 - inner(z, zeta)) < alpha * (1 - _normsq(z))
        if keep.any():
            r = ni_distance(zeta[keep], zeta0[keep]) / ni_distance(z[keep], xi[keep])
            best = max(best, float(r.max()))
            got += int(keep.sum())
    return best


def holomorphic_radial_fd(fn, z, h: float = 1e-5, conj: bool = False) -> np.ndarray:
    """Central-difference estimate of R fn (or Rbar fn) at z.

    Uses d/dz_i = (d/dx_i - i d/dy_i)/2 and sums z_i d/dz_i.
    """
    z = as_points(z)
    out = 0
    for i in range(z.shape[-1]):
        e = np.zeros(z.shape[-1], complex)
        e[i] = h
        fx = (fn(z + e) - fn(z - e)) / (2 * h)
        fy = (fn(z + 1j * e) - fn(z - 1j * e)) / (2 * h)
        if conj:
            out = out + np.conj(z[..., i]) * 0.5 * (fx + 1j * fy)
        else:
            out = out + z[..., i] * 0.5 * (fx - 1j * fy)
    return out


def green_radial_antiderivative_check(n: int, r: float) -> float:
    """Difference between the closed form and direct quadrature of the defining integral."""
    direct = integrate.quad(lambda s: (1 - s * s) ** (n - 1) * s ** (1 - 2 * n), r, 1.0)[0] / (2 * n)
    return abs(float(green_invariant(r, n=n)) - direct)

