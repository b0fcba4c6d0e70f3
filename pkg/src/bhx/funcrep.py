"""Exact polynomials in z and conj(z) on the ball, with the invariant derivative operators.

A :class:`PolyFunc` stores ``sum c[a, b] z^a conj(z)^b`` as a dict keyed by pairs
of exponent tuples.  Coefficients are Python complex numbers by default; the
exact mode stores :class:`GaussRational` values so identities can be checked
with no rounding at all.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_DEGREE = 32


class DegreeError(ValueError):
    pass


@dataclass(frozen=True)
class GaussRational:
    """Exact complex rational re + i im."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, complex):
            return GaussRational(Fraction(x.real), Fraction(x.imag))
        return GaussRational(Fraction(x), Fraction(0))

    def __add__(self, o):
        o = GaussRational.of(o)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussRational.of(o))

    def __rsub__(self, o):
        return GaussRational.of(o) - self

    def __mul__(self, o):
        o = GaussRational.of(o)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = GaussRational.of(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def _zero(c) -> bool:
    return not c


class PolyFunc:
    """Polynomial sum c[a, b] z^a zbar^b in n complex variables."""

    __slots__ = ("n", "coeffs", "max_degree")

    def __init__(self, n: int, coeffs=None, max_degree: int = MAX_DEGREE):
        self.n = int(n)
        self.max_degree = max_degree
        clean = {}
        for (a, b), c in (coeffs or {}).items():
            a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
            if len(a) != self.n or len(b) != self.n:
                raise ValueError("multi-index length does not match dimension")
            if min(a + b) < 0:
                raise ValueError("negative exponent")
            if _zero(c):
                continue
            if sum(a) + sum(b) > max_degree:
                raise DegreeError(f"degree {sum(a) + sum(b)} exceeds cap {max_degree}")
            key = (a, b)
            v = clean.get(key, 0) + c
            if _zero(v):
                clean.pop(key, None)
            else:
                clean[key] = v
        self.coeffs = clean

    # -- constructors
    @classmethod
    def constant(cls, n: int, c=1.0) -> "PolyFunc":
        return cls(n, {((0,) * n, (0,) * n): c})

    @classmethod
    def monomial(cls, n: int, a, b=None, c=1.0) -> "PolyFunc":
        b = (0,) * n if b is None else b
        return cls(n, {(tuple(a), tuple(b)): c})

    @classmethod
    def coordinate(cls, n: int, i: int, conj: bool = False) -> "PolyFunc":
        e = tuple(1 if j == i else 0 for j in range(n))
        z = (0,) * n
        return cls.monomial(n, z if conj else e, e if conj else z)

    @classmethod
    def random_holomorphic(cls, n: int, degree: int, rng, exact: bool = False, terms: int | None = None):
        """Random holomorphic polynomial of total degree <= ``degree``."""
        keys = [a for a in _multi_indices(n, degree)]
        if terms is not None and terms < len(keys):
            pick = rng.choice(len(keys), size=terms, replace=False)
            keys = [keys[i] for i in sorted(pick)]
        co = {}
        for a in keys:
            if exact:
                re, im = rng.integers(-9, 10, size=2)
                den = int(rng.integers(1, 8))
                co[(a, (0,) * n)] = GaussRational(Fraction(int(re), den), Fraction(int(im), den))
            else:
                co[(a, (0,) * n)] = complex(rng.standard_normal(), rng.standard_normal())
        return cls(n, co)

    # -- structure
    @property
    def degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.coeffs), default=0)

    @property
    def is_holomorphic(self) -> bool:
        return all(not any(b) for _, b in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, PolyFunc) and self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self):
        return f"PolyFunc(n={self.n}, terms={len(self.coeffs)}, degree={self.degree})"

    def map_coeffs(self, fn) -> "PolyFunc":
        return PolyFunc(self.n, {k: fn(k, c) for k, c in self.coeffs.items()}, self.max_degree)

    def to_float(self) -> "PolyFunc":
        return self.map_coeffs(lambda k, c: complex(c))

    def to_exact(self) -> "PolyFunc":
        return self.map_coeffs(lambda k, c: GaussRational.of(c))

    # -- algebra
    def _check(self, o):
        if not isinstance(o, PolyFunc):
            return PolyFunc.constant(self.n, o)
        if o.n != self.n:
            raise ValueError("dimension mismatch")
        return o

    def __add__(self, o):
        o = self._check(o)
        out = dict(self.coeffs)
        for k, c in o.coeffs.items():
            out[k] = out.get(k, 0) + c
        return PolyFunc(self.n, out, max(self.max_degree, o.max_degree))

    __radd__ = __add__

    def __neg__(self):
        return self.map_coeffs(lambda k, c: -c)

    def __sub__(self, o):
        return self + (-self._check(o))

    def __rsub__(self, o):
        return self._check(o) - self

    def __mul__(self, o):
        if not isinstance(o, PolyFunc):
            return self.map_coeffs(lambda k, c: c * o)
        o = self._check(o)
        out = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in o.coeffs.items():
                k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
                out[k] = out.get(k, 0) + c1 * c2
        return PolyFunc(self.n, out, max(self.max_degree, o.max_degree))

    __rmul__ = __mul__

    def conj(self) -> "PolyFunc":
        return PolyFunc(self.n, {(b, a): c.conjugate() for (a, b), c in self.coeffs.items()}, self.max_degree)

    # -- evaluation
    def __call__(self, z) -> np.ndarray:
        return evaluate(self, z)

    # -- serialization
    def to_json(self) -> str:
        rows = []
        for (a, b), c in sorted(self.coeffs.items()):
            c = complex(c)
            rows.append({"a": list(a), "b": list(b), "re": c.real, "im": c.imag})
        return json.dumps(rows, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, n: int | None = None) -> "PolyFunc":
        rows = json.loads(text)
        if not rows:
            if n is None:
                raise ValueError("empty polynomial needs an explicit dimension")
            return cls(n, {})
        dim = len(rows[0]["a"])
        return cls(dim, {(tuple(r["a"]), tuple(r["b"])): complex(r["re"], r["im"]) for r in rows})


def _multi_indices(n: int, degree: int):
    if n == 1:
        for k in range(degree + 1):
            yield (k,)
        return
    for k in range(degree + 1):
        for rest in _multi_indices(n - 1, degree - k):
            yield (k,) + rest


def evaluate(f: PolyFunc, z) -> np.ndarray:
    """Evaluate at points ``z`` of shape (..., n); returns shape (...)."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != f.n:
        raise ValueError(f"point dimension {z.shape[-1]} does not match polynomial dimension {f.n}")
    if not f.coeffs:
        return np.zeros(z.shape[:-1], dtype=complex)
    da = max(max(a) for a, _ in f.coeffs)
    db = max(max(b) for _, b in f.coeffs)
    zc = np.conj(z)
    pw = [[np.ones(z.shape[:-1], complex)] for _ in range(f.n)]
    pc = [[np.ones(z.shape[:-1], complex)] for _ in range(f.n)]
    for i in range(f.n):
        for _ in range(da):
            pw[i].append(pw[i][-1] * z[..., i])
        for _ in range(db):
            pc[i].append(pc[i][-1] * zc[..., i])
    out = np.zeros(z.shape[:-1], dtype=complex)
    for (a, b), c in f.coeffs.items():
        term = complex(c)
        for i in range(f.n):
            if a[i]:
                term = term * pw[i][a[i]]
            if b[i]:
                term = term * pc[i][b[i]]
        out = out + term
    return out


# ---------------------------------------------------------------- derivatives


@dataclass(frozen=True)
class DerivOp:
    kind: str  # "R", "Rbar", "T", "Tbar", "dz", "dzbar"
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if self.kind in ("T", "Tbar") and not (0 <= self.i < self.j):
            raise ValueError("tangential operators need 0 <= i < j")
        if self.kind not in ("R", "Rbar", "T", "Tbar", "dz", "dzbar"):
            raise ValueError(f"unknown operator {self.kind!r}")


R = DerivOp("R")
RBAR = DerivOp("Rbar")


def dz(f: PolyFunc, i: int) -> PolyFunc:
    out = {}
    for (a, b), c in f.coeffs.items():
        if a[i]:
            a2 = a[:i] + (a[i] - 1,) + a[i + 1:]
            out[(a2, b)] = c * a[i]
    return PolyFunc(f.n, out, f.max_degree)


def dzbar(f: PolyFunc, i: int) -> PolyFunc:
    out = {}
    for (a, b), c in f.coeffs.items():
        if b[i]:
            b2 = b[:i] + (b[i] - 1,) + b[i + 1:]
            out[(a, b2)] = c * b[i]
    return PolyFunc(f.n, out, f.max_degree)


def radial(f: PolyFunc) -> PolyFunc:
    return PolyFunc(f.n, {(a, b): c * sum(a) for (a, b), c in f.coeffs.items() if sum(a)}, f.max_degree)


def radial_bar(f: PolyFunc) -> PolyFunc:
    return PolyFunc(f.n, {(a, b): c * sum(b) for (a, b), c in f.coeffs.items() if sum(b)}, f.max_degree)


def apply_deriv(op: DerivOp, f: PolyFunc) -> PolyFunc:
    n = f.n
    if op.kind == "R":
        return radial(f)
    if op.kind == "Rbar":
        return radial_bar(f)
    if op.kind == "dz":
        return dz(f, op.i)
    if op.kind == "dzbar":
        return dzbar(f, op.i)
    if op.j >= n:
        raise ValueError("operator index exceeds dimension")
    zi = PolyFunc.coordinate(n, op.i)
    zj = PolyFunc.coordinate(n, op.j)
    if op.kind == "T":
        return zi.conj() * dz(f, op.j) - zj.conj() * dz(f, op.i)
    return zi * dzbar(f, op.j) - zj * dzbar(f, op.i)


def tangential_ops(n: int):
    return [DerivOp(k, i, j) for i in range(n) for j in range(i + 1, n) for k in ("T", "Tbar")]


def _abs2(f: PolyFunc, z) -> np.ndarray:
    return np.abs(evaluate(f, z)) ** 2


def bergman_gradient_normsq(f: PolyFunc, z, form: str = "auto") -> np.ndarray:
    """|grad~ u|^2 at z.

    ``form="partials"`` uses the sum-of-partials expression (valid everywhere);
    ``form="radial"`` uses the split into radial and complex-tangential parts,
    which divides by |z|^2.  ``auto`` picks partials.
    """
    z = np.asarray(z, dtype=complex)
    n = f.n
    s = np.sum(np.abs(z) ** 2, axis=-1)
    if form in ("auto", "partials"):
        tot = sum(_abs2(dz(f, i), z) + _abs2(dzbar(f, i), z) for i in range(n))
        tot = tot - _abs2(radial(f), z) - _abs2(radial_bar(f), z)
        return 2 * (1 - s) / (n + 1) * tot
    if form == "radial":
        xs = _abs2(radial(f), z) + _abs2(radial_bar(f), z)
        ys = sum((_abs2(apply_deriv(op, f), z) for op in tangential_ops(n)), np.zeros_like(s))
        return 2 * (1 - s) / ((n + 1) * s) * ((1 - s) * xs + ys)
    raise ValueError(f"unknown form {form!r}")


@dataclass(frozen=True)
class LaplacianResult:
    """Invariant Laplacian as prefactor 4(1-|z|^2)/(n+1) times a polynomial part."""

    poly: PolyFunc

    @property
    def n(self) -> int:
        return self.poly.n

    def prefactor(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return 4 * (1 - np.sum(np.abs(z) ** 2, axis=-1)) / (self.n + 1)

    def __call__(self, z) -> np.ndarray:
        return self.prefactor(z) * evaluate(self.poly, z)

    @property
    def is_m_harmonic(self) -> bool:
        return self.poly.is_zero()


def invariant_laplacian(f: PolyFunc) -> LaplacianResult:
    n = f.n
    out = PolyFunc(n, {}, f.max_degree)
    for i in range(n):
        dzi = dzbar(f, i)
        for j in range(n):
            mixed = dz(dzi, j)
            if mixed.is_zero():
                continue
            term = mixed if i == j else PolyFunc(n, {}, f.max_degree)
            term = term - PolyFunc.coordinate(n, i, conj=True) * PolyFunc.coordinate(n, j) * mixed
            out = out + term
    return LaplacianResult(out)
