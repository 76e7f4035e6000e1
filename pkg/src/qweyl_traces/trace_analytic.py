"""Traces given by integrals against quasiperiodic weights.

For all roots of P in the open annulus |q| < |z| < 1/|q| a twisted trace is

    T(R) = integral_0^1 w(x) R(e^(2 pi i x)) dx

with w a theta quotient.  In general a trace splits as an integral over a
factor Q with roots on the unit circle, point masses at those roots, and a
finite sum of derivatives at points off the circle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConvergenceError, PoleError
from .laurent import LaurentPoly, divmod_window, eval as leval, nonzero_roots
from .special import WeightParams, weight_w

N_START = 16
N_MAX = 2**16
DEFAULT_TOL = 1e-13
ROOT_MATCH_TOL = 1e-8
ROUNDOFF = 1e-14


def circle_integral(f, tol=DEFAULT_TOL, full_output=False, offset=0.0):
    """Periodic trapezoid rule for the integral of f over [0, 1].

    `f` takes a numpy array of nodes.  Nodes are ``j / N + offset / 16`` and
    are reused when N doubles.  Convergence means two successive values differ
    by less than ``tol * max(1, |I|)``, or by less than the rounding floor
    ``ROUNDOFF * mean |f|`` when the integral cancels.
    """
    N = N_START
    shift = offset / N_START
    vals = f(np.arange(N) / N + shift)
    total, mass = np.sum(vals), np.sum(np.abs(vals))
    prev = total / N
    while N < N_MAX:
        vals = f((np.arange(N) + 0.5) / N + shift)
        total, mass = total + np.sum(vals), mass + np.sum(np.abs(vals))
        N *= 2
        cur = total / N
        if abs(cur - prev) < max(tol * max(1.0, abs(cur)), ROUNDOFF * mass / N):
            cur = complex(cur)
            return (cur, N) if full_output else cur
        prev = cur
    raise ConvergenceError(f"trapezoid rule did not converge with {N} nodes (pole on the contour?)")


def _check_contour(wp, Q=None):
    # poles of the weight sit at beta + 1/2 + tau/2 + Z + Z tau
    for b in wp.beta:
        s = (b.imag + wp.tau.imag / 2) / wp.tau.imag
        if abs(s - round(s)) * wp.tau.imag < 1e-9:
            x = b.real + 0.5 + wp.tau.real / 2 + round(s) * wp.tau.real
            if Q is not None and abs(leval(Q, cmath.exp(2j * math.pi * x))) < ROOT_MATCH_TOL:
                continue
            raise PoleError(f"weight has a pole on the real line near beta={b}", location=b)


def analytic_trace(wp, R, tol=DEFAULT_TOL, full_output=False):
    """integral_0^1 w(x) R(e^(2 pi i x)) dx."""
    if R.is_zero():
        return (0j, 0) if full_output else 0j
    _check_contour(wp)

    def f(x):
        return weight_w(x, wp) * leval(R, np.exp(2j * math.pi * x))

    return circle_integral(f, tol, full_output)


def moments_from_weight(wp, window, tol=DEFAULT_TOL):
    """T(z^i) for i in the inclusive range ``window = (lo, hi)``."""
    lo, hi = window
    return tuple(analytic_trace(wp, LaurentPoly.monomial(i), tol) for i in range(lo, hi + 1))


def alphas_from_roots(roots):
    """x-coordinates alpha with exp(2 pi i alpha) = root and 0 <= Re alpha < 1."""
    out = []
    for r in roots:
        a = cmath.log(complex(r)) / (2j * math.pi)
        re = a.real % 1.0
        # a real root can land just below 1 after rounding
        out.append(complex(0.0 if re > 1 - 1e-12 else re, a.imag))
    return out


def betas_from_P(P):
    """beta_i = alpha_i + 1/2 for the roots of P, with multiplicity."""
    roots = [r for r, m in nonzero_roots(P) for _ in range(m)]
    return [a + 0.5 for a in alphas_from_roots(roots)]


def weight_for(P, q, c, a, lam=1.0):
    """Theta-quotient weight for P with zeros `a` and the poles fixed by P's roots."""
    tau = cmath.log(complex(q)) / (1j * math.pi)
    return WeightParams(lam, a, betas_from_P(P), tau, c)


@dataclass(frozen=True)
class GeneralTraceSpec:
    """T(R) = int R1 Q w + sum c_j R0(z_j) + sum c_ak R^(k)(a), where R = R1 Q + R0."""

    weight: WeightParams
    Qfactor: LaurentPoly = field(default_factory=lambda: LaurentPoly.constant(1))
    point_masses: tuple = ()
    delta_part: tuple = ()

    def __post_init__(self):
        masses = tuple((complex(z), complex(c)) for z, c in self.point_masses)
        deltas = tuple((complex(a), int(k), complex(c)) for a, k, c in self.delta_part)
        object.__setattr__(self, "point_masses", masses)
        object.__setattr__(self, "delta_part", deltas)
        Q = self.Qfactor
        qscale = sum(abs(c) for c in Q.coeffs.values())
        for z, _ in masses:
            if abs(abs(z) - 1) > ROOT_MATCH_TOL or abs(leval(Q, z)) > ROOT_MATCH_TOL * qscale:
                raise ConfigurationError(f"point mass at {z} is not a root of Q on the circle")
        for a, k, _ in deltas:
            if abs(abs(a) - 1) <= ROOT_MATCH_TOL:
                raise ConfigurationError(f"delta term at {a} lies on the unit circle")
            if k < 0:
                raise ConfigurationError("derivative order must be nonnegative")
        if Q.width > 0:
            for r, _ in nonzero_roots(Q):
                if abs(abs(r) - 1) > ROOT_MATCH_TOL:
                    raise ConfigurationError(f"Q has a root {r} off the unit circle")

    def to_json(self):
        return {
            "weight": self.weight.to_json(),
            "Q": self.Qfactor.to_json(),
            "point_masses": [[[z.real, z.imag], [c.real, c.imag]] for z, c in self.point_masses],
            "delta_part": [[[a.real, a.imag], k, [c.real, c.imag]] for a, k, c in self.delta_part],
        }

    @classmethod
    def from_json(cls, obj):
        def cx(v):
            return complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        try:
            Q = LaurentPoly.from_json(obj["Q"]) if "Q" in obj else LaurentPoly.constant(1)
            return cls(WeightParams.from_json(obj["weight"]), Q,
                       [(cx(z), cx(c)) for z, c in obj.get("point_masses", [])],
                       [(cx(a), int(k), cx(c)) for a, k, c in obj.get("delta_part", [])])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed general trace JSON: {exc}") from None


def general_trace_eval(spec, R, tol=DEFAULT_TOL):
    Q = spec.Qfactor
    if Q.width > 0:
        R1, R0 = divmod_window(R, Q, 0)
    else:
        # Q is a monomial, hence a unit
        e, lead = Q.min_exp, Q.coeff(Q.min_exp)
        R1 = LaurentPoly({k - e: c / lead for k, c in R.coeffs.items()})
        R0 = LaurentPoly()
    value = 0j
    if not R1.is_zero():
        _check_contour(spec.weight, Q)
        RQ = R1 * Q

        def f(x):
            return weight_w(x, spec.weight) * leval(RQ, np.exp(2j * math.pi * x))

        # an irrational node offset keeps nodes off removable singularities
        value += circle_integral(f, tol, offset=(math.sqrt(5) - 1) / 7)
    for z, c in spec.point_masses:
        if not R0.is_zero():
            value += c * leval(R0, z)
    for a, k, c in spec.delta_part:
        value += c * leval(R.derivative(k), a)
    return value


@dataclass
class RootShiftReport:
    P_tilde: LaurentPoly
    P_circ: LaurentPoly
    shifts: list

    def to_json(self):
        return {
            "P_tilde": self.P_tilde.to_json(),
            "P_circ": self.P_circ.to_json(),
            "shifts": [{"alpha": [a.real, a.imag], "alpha_tilde": [b.real, b.imag], "k": k}
                       for a, b, k in self.shifts],
        }


def shift_exponent(z, q):
    """Minimal k >= 1 moving z into the closed annulus, or 0 if already inside.

    The shifted root is q^(2k) z for |z| > 1/|q| and q^(-2k) z for |z| < |q|.
    """
    aq = abs(q)
    r = abs(z)
    k = 0
    if r > 1 / aq:
        while r * aq ** (2 * k) > 1 / aq:
            k += 1
    elif r < aq:
        while r * aq ** (-2 * k) < aq:
            k += 1
    return k


def root_shift(P, q):
    q = complex(q)
    roots = [r for r, m in nonzero_roots(P) for _ in range(m)]
    shifted, inner, shifts = [], [], []
    for r in roots:
        k = shift_exponent(r, q)
        if k == 0:
            shifted.append(r)
            inner.append(r)
            continue
        s = r * q ** (2 * k) if abs(r) > 1 / abs(q) else r * q ** (-2 * k)
        shifted.append(s)
        shifts.append((r, s, k))
    lo = P.min_exp
    return RootShiftReport(LaurentPoly.from_roots(shifted, lo), LaurentPoly.from_roots(inner, lo), shifts)


def telescoped_sum(R, q, t, k, z):
    """sum_{l<k} t^l R(q^(2l+1) z), equal to S(z) - t^k S(q^(2k) z) when R = phi(S)."""
    return sum(t**l * leval(R, q ** (2 * l + 1) * z) for l in range(k))
