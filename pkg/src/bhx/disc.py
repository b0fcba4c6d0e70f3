"""Spectral evaluation of area integrals on the unit disc (n = 1).

For real boundary data with Fourier coefficients a_k (a_{-k} = conj a_k) the
Poisson extension is u = sum a_k r^|k| e^{ik phi}, so R u is a one-sided
series that an FFT samples exactly on a uniform angle grid.  Every radius
gets its own grid, sized to the number of modes that survive r^k, which
resolves the boundary layer of spiky data like |1 - xi|^(delta - 1) where
node quadrature on the circle cannot.

Arc integrals over Korányi slices use the exact antiderivative of the
sampled trigonometric polynomial; the g* kernel is a circular convolution.
Both are then interpolated linearly at the requested boundary angles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .geometry import graded_panels


def power_coefficients(a: float, K: int) -> np.ndarray:
    """Fourier coefficients c_0..c_K of |1 - e^{i theta}|^a, a > -1.

    c_0 = Gamma(a+1)/Gamma(a/2+1)^2 and c_k/c_{k-1} = (k-1-a/2)/(k+a/2).
    """
    if a <= -1:
        raise ValueError("exponent must exceed -1")
    k = np.arange(1, K + 1)
    ratio = (k - 1 - a / 2) / (k + a / 2)
    sign = np.concatenate([[1.0], np.cumprod(np.sign(ratio))])
    logs = np.log(np.abs(np.where(ratio == 0, 1.0, ratio)))
    log0 = gammaln(a + 1) - 2 * gammaln(a / 2 + 1)
    out = sign * np.exp(log0 + np.concatenate([[0.0], np.cumsum(logs)]))
    zero = np.flatnonzero(ratio == 0)
    if zero.size:
        out[zero[0] + 1:] = 0.0
    return out


def spike_coefficients(delta: float, K: int) -> np.ndarray:
    """Fourier coefficients a_0..a_K of |1 - e^{i theta}|^(delta - 1) (all positive)."""
    return power_coefficients(delta - 1.0, K)


def grid_coefficients(values, K: int) -> np.ndarray:
    """a_0..a_K of real data on the uniform circle rule (trigonometric interpolation)."""
    v = np.asarray(values, float)
    N = v.size
    c = np.fft.fft(v) / N
    out = np.zeros(K + 1, complex)
    m = min(K, (N - 1) // 2)
    out[: m + 1] = c[: m + 1]
    return out


def poisson_on_circle(coeffs, r: float, M: int) -> np.ndarray:
    """u(r e^{i phi_j}) on M uniform angles for real data with coefficients a_0..a_K."""
    a = np.asarray(coeffs)
    K = min(a.size - 1, M // 2 - 1)
    k = np.arange(K + 1)
    c = np.zeros(M, complex)
    c[: K + 1] = a[: K + 1] * r ** k
    c[0] *= 0.5
    return 2 * (np.fft.ifft(c) * M).real


def koranyi_halfwidth(r, alpha: float) -> np.ndarray:
    """Half-width of the slice {phi : r e^{i phi} in D_alpha(1)}; pi for the whole circle, 0 if empty."""
    r = np.asarray(r, float)
    one_minus_c = (alpha ** 2 * (1 - r * r) ** 2 - (1 - r) ** 2) / (2 * np.maximum(r, 1e-300))
    out = 2 * np.arcsin(np.sqrt(np.clip(one_minus_c / 2, 0.0, 1.0)))
    out = np.where(one_minus_c <= 0, 0.0, out)
    return np.where(one_minus_c >= 2, np.pi, out)


@dataclass(frozen=True)
class RadialRule:
    radii: np.ndarray
    weights: np.ndarray  # against dv = 2 r dr (dphi / 2 pi)
    eps_cut: float


def radial_rule(eps_cut: float = 1e-4, per_octave: int = 6) -> RadialRule:
    """Gauss panels in t = 1 - r, halving toward the rim, from t = 1 down to ``eps_cut``."""
    t, w = graded_panels(eps_cut, 1.0, 0.5, per_octave)
    r = 1 - t
    return RadialRule(r, 2 * r * w, eps_cut)


class DiscEngine:
    """Area integrals of the Poisson extension of real circle data given by Fourier coefficients.

    ``coeffs(K)`` returns a_0..a_K.  Modes are cut where r^k < e^{-mode_factor};
    grids oversample the band of |Ru|^2 by ``oversample``.
    """

    def __init__(self, coeffs, eps_cut: float = 1e-4, per_octave: int = 6,
                 mode_factor: float = 40.0, oversample: int = 8):
        self.rule = radial_rule(eps_cut, per_octave)
        self.mode_factor = mode_factor
        self.oversample = oversample
        kmax = self._modes(self.rule.radii.max())
        self.a = np.asarray(coeffs(kmax))

    def _modes(self, r: float) -> int:
        return int(np.ceil(self.mode_factor / max(1 - r, 1e-300))) + 1

    def _ru_samples(self, r: float):
        K = min(self._modes(r), self.a.size - 1)
        M = 1 << int(np.ceil(np.log2(self.oversample * (K + 1))))
        k = np.arange(K + 1)
        c = np.zeros(M, complex)
        c[: K + 1] = k * self.a[: K + 1] * np.exp(k * np.log(r))
        return np.fft.ifft(c) * M, M

    def _slices(self, thetas, field: str):
        thetas = np.asarray(thetas, float)
        for r, w in zip(self.rule.radii, self.rule.weights):
            ru, M = self._ru_samples(r)
            h = np.abs(ru) ** 2
            if field == "grad":
                # |u_z|^2 + |u_zbar|^2 = 2 |Ru|^2 / r^2 for real data
                h = 2 * h / (r * r)
            yield r, w, h, M

    def area_squares(self, thetas, alpha: float, field: str = "R") -> np.ndarray:
        """S_alpha(u)(e^{i theta})^2 with density |Ru|^2 (``R``) or the Bergman-gradient density (``grad``)."""
        thetas = np.asarray(thetas, float)
        out = np.zeros(thetas.shape)
        for r, w, h, M in self._slices(thetas, field):
            psi = float(koranyi_halfwidth(r, alpha))
            if psi <= 0:
                continue
            hh = np.fft.fft(h) / M
            if psi >= np.pi:
                out += w * hh[0].real
                continue
            m = np.fft.fftfreq(M, 1.0 / M)
            # periodic part of the antiderivative (in units of dphi / 2 pi)
            anti = np.zeros(M, complex)
            nz = m != 0
            anti[nz] = hh[nz] / (1j * m[nz])
            per = (np.fft.ifft(anti) * M).real / (2 * np.pi)
            grid = 2 * np.pi * np.arange(M + 1) / M
            perc = np.concatenate([per, per[:1]])

            def H(x):
                return hh[0].real * x / (2 * np.pi) + np.interp(np.mod(x, 2 * np.pi), grid, perc)

            out += w * (H(thetas + psi) - H(thetas - psi))
        return out

    def gstar_squares(self, thetas, lam: int = 4) -> np.ndarray:
        """g*_lambda(u)(e^{i theta})^2 with X = R."""
        thetas = np.asarray(thetas, float)
        out = np.zeros(thetas.shape)
        for r, w, h, M in self._slices(thetas, "R"):
            phi = 2 * np.pi * np.arange(M) / M
            ker = ((1 - r * r) / np.abs(1 - r * np.exp(1j * phi))) ** lam
            conv = np.fft.ifft(np.fft.fft(h) * np.fft.fft(ker)).real / M
            grid = np.concatenate([phi, [2 * np.pi]])
            out += w * np.interp(np.mod(thetas, 2 * np.pi), grid, np.concatenate([conv, conv[:1]]))
        return out


def spike_engine(delta: float, **kw) -> DiscEngine:
    return DiscEngine(lambda K: spike_coefficients(delta, K), **kw)
