"""Sparse Laurent polynomials over the complex numbers.

A :class:`LaurentPoly` is an immutable map ``exponent -> coefficient``.  The
zero polynomial is the empty map, and coefficients that are negligible
relative to the largest one are dropped after every operation.

>>> p = LaurentPoly({1: 1, -1: 1})
>>> p(1.0)
(2+0j)
>>> scale_arg(p, 2.0).coeffs == {1: 2, -1: 0.5}
True
"""

import cmath
import math

import numpy as np

from .errors import ConvergenceError, DomainError

PRUNE_RTOL = 1e-14
CLUSTER_RTOL = 1e-6


def _prune(coeffs):
    if not coeffs:
        return {}
    big = max(abs(c) for c in coeffs.values())
    cut = PRUNE_RTOL * big
    return {k: c for k, c in coeffs.items() if c != 0 and abs(c) >= cut}


class LaurentPoly:
    """Element of C[z, 1/z] stored as a pruned dict of coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        raw = {}
        for k, c in (coeffs or {}).items():
            c = complex(c)
            k = int(k)
            raw[k] = raw.get(k, 0) + c
        object.__setattr__(self, "coeffs", _prune(raw))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls({k: c})

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    @classmethod
    def from_dense(cls, values, start=0):
        """Coefficients listed in ascending order starting at exponent `start`."""
        return cls({start + i: c for i, c in enumerate(values)})

    @classmethod
    def from_roots(cls, roots, shift=0, lead=1.0):
        """``lead * z**shift * prod(z - r)``."""
        dense = np.array([1.0 + 0j])
        for r in roots:
            dense = np.convolve(dense, [-complex(r), 1.0])
        return cls.from_dense(lead * dense, start=shift)

    # -- structure -------------------------------------------------------
    def is_zero(self):
        return not self.coeffs

    @property
    def min_exp(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no exponents")
        return min(self.coeffs)

    @property
    def max_exp(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no exponents")
        return max(self.coeffs)

    @property
    def width(self):
        """Number of nonzero roots counted with multiplicity."""
        return self.max_exp - self.min_exp

    def coeff(self, k):
        return self.coeffs.get(k, 0j)

    def dense(self, start=None, stop=None):
        """Coefficient array for exponents ``start .. stop`` inclusive."""
        if start is None:
            start = self.min_exp
        if stop is None:
            stop = self.max_exp
        return np.array([self.coeffs.get(k, 0j) for k in range(start, stop + 1)])

    def norm_inf(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            out = {}
            for i, a in self.coeffs.items():
                for j, b in other.coeffs.items():
                    out[i + j] = out.get(i + j, 0) + a * b
            return LaurentPoly(out)
        s = complex(other)
        return LaurentPoly({k: s * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise DomainError("negative powers of a Laurent polynomial are not polynomials")
        out = LaurentPoly.constant(1.0)
        for _ in range(e):
            out = out * self
        return out

    def shift(self, k):
        """Multiply by z**k."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def derivative(self, order=1):
        """Exact k-th derivative in z."""
        out = dict(self.coeffs)
        for _ in range(order):
            out = {k - 1: k * c for k, c in out.items() if k != 0}
        return LaurentPoly(out)

    def __call__(self, z):
        return eval(self, z)

    def allclose(self, other, atol=1e-12):
        other = _coerce(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def __repr__(self):
        body = ", ".join(f"{k}: {c!r}" for k, c in sorted(self.coeffs.items()))
        return f"LaurentPoly({{{body}}})"

    # -- serialization ---------------------------------------------------
    def to_json(self):
        return {"coeffs": [[k, c.real, c.imag] for k, c in sorted(self.coeffs.items())]}

    @classmethod
    def from_json(cls, obj):
        try:
            entries = obj["coeffs"]
            return cls({int(k): complex(float(re), float(im)) for k, re, im in entries})
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed Laurent polynomial JSON: {exc}") from None


def _coerce(x):
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.constant(x)


def eval(p, z):
    """Value of `p` at nonzero `z` (scalar or numpy array)."""
    if np.any(np.asarray(z) == 0):
        raise DomainError("Laurent polynomial evaluated at z = 0")
    if not p.coeffs:
        return np.zeros_like(np.asarray(z), dtype=complex) if np.ndim(z) else 0j
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    lo, hi = p.min_exp, p.max_exp
    acc = 0j * z
    for k in range(max(hi, 0), -1, -1):
        acc = acc * z + p.coeffs.get(k, 0)
    if lo < 0:
        w = 1 / z
        neg = 0j * z
        for k in range(lo, 0):
            neg = neg * w + p.coeffs.get(k, 0)
        acc = acc + neg * w
    return acc


def scale_arg(p, s):
    """Return p(s z)."""
    if s == 0:
        raise DomainError("scale factor must be nonzero")
    s = complex(s)
    return LaurentPoly({k: c * s**k for k, c in p.coeffs.items()})


def conj_reflect(p):
    """Return conj(p)(1/z): coefficient c_k moves to exponent -k conjugated."""
    return LaurentPoly({-k: c.conjugate() for k, c in p.coeffs.items()})


def divmod_window(dividend, divisor, window_start):
    """Divide with the remainder supported on ``window_start .. window_start+n-1``.

    `n` is the number of nonzero roots of `divisor`.  The divisor is shifted
    to an ordinary polynomial with nonzero constant term; low-order terms of
    the dividend are eliminated from below and high-order terms by ordinary
    long division.
    """
    if divisor.is_zero():
        raise DomainError("division by the zero polynomial")
    dl = divisor.min_exp
    d = divisor.dense()
    n = len(d) - 1
    if dividend.is_zero():
        return LaurentPoly(), LaurentPoly()
    work = {k - window_start: c for k, c in dividend.coeffs.items()}
    quot = {}
    if n == 0:
        return (LaurentPoly({k + window_start - dl: c / d[0] for k, c in work.items()}),
                LaurentPoly())
    # eliminate negative exponents using the constant term
    lo = min(work)
    for k in range(lo, 0):
        c = work.pop(k, 0)
        if c == 0:
            continue
        f = c / d[0]
        quot[k] = quot.get(k, 0) + f
        for j in range(1, n + 1):
            work[k + j] = work.get(k + j, 0) - f * d[j]
    # ordinary long division for exponents >= n
    hi = max(work) if work else -1
    for k in range(hi, n - 1, -1):
        c = work.pop(k, 0)
        if c == 0:
            continue
        f = c / d[n]
        quot[k - n] = quot.get(k - n, 0) + f
        for j in range(n):
            work[k - n + j] = work.get(k - n + j, 0) - f * d[j]
    rem = LaurentPoly({k + window_start: c for k, c in work.items() if 0 <= k < n})
    q = LaurentPoly({k + window_start - dl: c for k, c in quot.items()})
    return q, rem


def _aberth(coef, rng, max_iter=500):
    """Simultaneous roots of the ordinary polynomial with ascending `coef`."""
    n = len(coef) - 1
    poly = np.asarray(coef[::-1], dtype=complex)  # descending for polyval
    dpoly = np.polyder(poly)
    a = np.abs(coef)
    # Fujiwara-type radius bounds for the initial circle
    upper = 2 * max((a[n - k] / a[n]) ** (1.0 / k) for k in range(1, n + 1))
    lower = 0.5 / max((a[k] / a[0]) ** (1.0 / k) for k in range(1, n + 1))
    radius = math.sqrt(upper * lower)
    for attempt in range(8):
        phase = 0.4 + rng.uniform(0, 2 * math.pi) if attempt else 0.4
        z = radius * np.exp(1j * (phase + 2 * math.pi * np.arange(n) / n))
        if attempt:
            z *= 1 + 0.1 * rng.standard_normal(n)
        for _ in range(max_iter):
            pv = np.polyval(poly, z)
            dv = np.polyval(dpoly, z)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = pv / dv
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                corr = ratio / (1 - ratio * inv.sum(axis=1))
            corr = np.where(pv == 0, 0, corr)
            if not np.all(np.isfinite(corr)):
                break
            z = z - corr
            if np.all(np.abs(corr) <= 4e-16 * np.maximum(np.abs(z), 1e-300)):
                return z
        else:
            # slow (multiple-root) convergence still lands in a usable cluster
            return z
    raise ConvergenceError("Aberth iteration diverged after restarts")


def _polish(coef, r, m, steps=3):
    # a root of multiplicity m is a simple root of the (m-1)-th derivative
    poly = np.asarray(coef[::-1], dtype=complex)
    for _ in range(m - 1):
        poly = np.polyder(poly)
    dpoly = np.polyder(poly)
    for _ in range(steps):
        dv = np.polyval(dpoly, r)
        if dv == 0:
            break
        step = np.polyval(poly, r) / dv
        if not np.isfinite(step) or abs(step) > CLUSTER_RTOL * (1 + abs(r)):
            break
        r = r - step
    return complex(r)


def nonzero_roots(p, seed=0):
    """Nonzero roots of `p` as a list of ``(location, multiplicity)``.

    Roots closer than ``1e-6 * (1 + |r|)`` are merged into one cluster whose
    location is the cluster mean.
    """
    if p.is_zero():
        raise DomainError("the zero polynomial has no well-defined roots")
    coef = p.dense()
    n = len(coef) - 1
    if n == 0:
        return []
    if n == 1:
        return [(complex(-coef[0] / coef[1]), 1)]
    rng = np.random.default_rng(seed)
    z = _aberth(coef, rng)
    clusters = []
    for r in sorted(z, key=lambda w: (abs(w), cmath.phase(w))):
        for cl in clusters:
            centre = np.mean(cl)
            if abs(r - centre) <= CLUSTER_RTOL * (1 + abs(centre)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = [(_polish(coef, complex(np.mean(cl)), len(cl)), len(cl)) for cl in clusters]
    scale = np.abs(coef)
    for r, m in out:
        size = float(np.sum(scale * np.abs(r) ** np.arange(n + 1)))
        resid = abs(np.polyval(coef[::-1], r))
        if resid > 1e-6 * size:
            raise ConvergenceError(f"root {r} has residual {resid:.3g} (scale {size:.3g})")
    return out


def root_list(p):
    """Roots repeated according to multiplicity."""
    return [r for r, m in nonzero_roots(p) for _ in range(m)]
