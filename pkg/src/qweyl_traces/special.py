"""Jacobi theta function, theta-quotient weights and Weierstrass p.

The theta function here is

    theta(x; tau) = sum_n q^(n^2) exp(2 pi i n x),   q = exp(pi i tau),

with zeros at 1/2 + tau/2 + Z + Z tau.  All functions accept numpy arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, PoleError

POLE_RADIUS = 1e-9
DEFAULT_TOL = 1e-16


@dataclass(frozen=True)
class ThetaParams:
    tau: complex
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        tau = complex(self.tau)
        if tau.imag <= 0:
            raise ConfigurationError(f"need Im tau > 0, got tau={tau}")
        if not 0 < self.tol <= 1e-6:
            raise ConfigurationError("theta tolerance must lie in (0, 1e-6]")
        object.__setattr__(self, "tau", tau)

    @property
    def nome(self):
        return cmath.exp(1j * math.pi * self.tau)

    def terms(self):
        """Series half-width N after range reduction."""
        aq = abs(self.nome)
        if aq < self.tol:
            return 2
        return math.ceil(math.sqrt(math.log(self.tol * (1 - aq)) / math.log(aq))) + 2


def tau_from_q(q):
    """tau with exp(pi i tau) = q, principal branch."""
    return cmath.log(complex(q)) / (1j * math.pi)


def _reduce(z, tau):
    """Split z = z0 + m*tau + l with |Im z0| <= Im tau / 2 and 0 <= Re z0 < 1."""
    z = np.asarray(z, dtype=complex)
    m = np.round(z.imag / tau.imag)
    z0 = z - m * tau
    z0 = z0 - np.floor(z0.real)
    return z0, m


def _series(z0, p, order=0):
    """Derivatives 0..order of the theta series at reduced points."""
    N = p.terms()
    n = np.arange(-N, N + 1)
    e = np.exp(1j * math.pi * p.tau * n**2 + 2j * math.pi * np.multiply.outer(z0, n))
    out = [e.sum(axis=-1)]
    f = 2j * math.pi * n
    for k in range(1, order + 1):
        out.append((e * f**k).sum(axis=-1))
    return out


def theta(z, p):
    """theta(z; tau) by range reduction and a truncated series."""
    z0, m = _reduce(z, p.tau)
    (val,) = _series(z0, p)
    # theta(z0 + m tau) = exp(-pi i (m^2 tau + 2 m z0)) theta(z0)
    out = np.exp(-1j * math.pi * (m**2 * p.tau + 2 * m * z0)) * val
    return out if np.ndim(out) else complex(out)


def theta_triple_product(z, p):
    """Product form, truncated once every factor is within tol of 1."""
    z0, m = _reduce(z, p.tau)
    nome = p.nome
    e = np.exp(2j * math.pi * z0)
    acc = np.ones_like(e)
    k = 1
    while True:
        a = nome ** (2 * k)
        b = nome ** (2 * k - 1)
        f1 = 1 - a
        f2 = 1 + b * e
        f3 = 1 + b / e
        acc = acc * f1 * f2 * f3
        small = max(abs(a), float(np.max(np.abs(b * e))), float(np.max(np.abs(b / e))))
        if small < p.tol:
            break
        k += 1
    out = np.exp(-1j * math.pi * (m**2 * p.tau + 2 * m * z0)) * acc
    return out if np.ndim(out) else complex(out)


def log_theta_derivatives(z, p, order=2):
    """(log theta)', (log theta)'' [, (log theta)'''] at z.

    The second and higher log-derivatives are doubly periodic; the first
    picks up -2 pi i per tau-shift.
    """
    z0, m = _reduce(z, p.tau)
    vals = _series(z0, p, order)
    t0 = vals[0]
    near = np.abs(t0) < 1e-300
    if np.any(near):
        raise PoleError("log-derivative of theta at a zero of theta")
    d1 = vals[1] / t0
    out = [d1 - 2j * math.pi * m]
    if order >= 2:
        d2 = vals[2] / t0 - d1**2
        out.append(d2)
    if order >= 3:
        d3 = vals[3] / t0 - 3 * d1 * vals[2] / t0 + 2 * d1**3
        out.append(d3)
    return out


def _lattice_distance(z, centre, tau):
    """Distance of z from centre + Z + Z tau in lattice coordinates."""
    w = np.asarray(z, dtype=complex) - centre
    b = w.imag / tau.imag
    a = w.real - b * tau.real
    return np.hypot(a - np.round(a), b - np.round(b))


@dataclass(frozen=True)
class WeightParams:
    """w(x) = lam * prod theta(x - a_i) / prod theta(x - beta_i)."""

    lam: float
    a: tuple
    beta: tuple
    tau: complex
    c: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        beta = tuple(complex(x) for x in self.beta)
        tau = complex(self.tau)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "c", float(self.c))
        if len(a) != len(beta):
            raise ConfigurationError("need as many zeros as poles")
        if tau.imag <= 0:
            raise ConfigurationError("need Im tau > 0")
        d = sum(a) - sum(beta) - self.c
        if abs(d.imag) > 1e-8 or abs(d.real - round(d.real)) > 1e-8:
            raise ConfigurationError(
                f"sum(a) - sum(beta) - c = {d} is not an integer")
        for x in a + beta:
            if abs(x.imag) >= tau.imag:
                raise ConfigurationError(f"|Im| of {x} is not below Im tau")

    @property
    def n(self):
        return len(self.a)

    @property
    def theta_params(self):
        return ThetaParams(self.tau, self.tol)

    @property
    def shift(self):
        """Integer m with sum(a) - sum(beta) = c + m."""
        return round((sum(self.a) - sum(self.beta) - self.c).real)

    def to_json(self):
        return {
            "lambda": self.lam,
            "a": [[x.real, x.imag] for x in self.a],
            "beta": [[x.real, x.imag] for x in self.beta],
            "tau": [self.tau.real, self.tau.imag],
            "c": self.c,
        }

    @classmethod
    def from_json(cls, obj):
        def cx(v):
            return complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        try:
            return cls(obj["lambda"], [cx(v) for v in obj["a"]], [cx(v) for v in obj["beta"]],
                       cx(obj["tau"]), obj["c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed weight JSON: {exc}") from None


def weight_w(x, wp):
    """Theta-quotient weight; raises PoleError near a pole."""
    p = wp.theta_params
    centre = 0.5 + wp.tau / 2
    for b in wp.beta:
        if np.any(_lattice_distance(np.asarray(x) - b, centre, wp.tau) < POLE_RADIUS):
            raise PoleError(f"weight evaluated at a pole near beta={b}", location=b)
    x = np.asarray(x, dtype=complex)
    num = np.ones_like(x)
    for a in wp.a:
        num = num * theta(x - a, p)
    den = np.ones_like(x)
    for b in wp.beta:
        den = den * theta(x - b, p)
    out = wp.lam * num / den
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class WeierstrassParams:
    """p-function with periods 2 ln q (real) and 2 pi i, for 0 < q < 1.

    Internally u = omega * v with v on the lattice Z + tau Z; of the two
    period bases the one with the larger Im tau is used, so the theta
    series converges quickly for every q.
    """

    q: float
    period1: float = field(init=False)
    period2: complex = field(init=False)
    e1: float = field(init=False)
    e2: float = field(init=False)
    e3: float = field(init=False)
    omega: complex = field(init=False, repr=False)
    tau: complex = field(init=False, repr=False)
    _shift: complex = field(init=False, repr=False)

    def __post_init__(self):
        q = float(self.q)
        if not 0 < q < 1:
            raise ConfigurationError(f"need 0 < q < 1, got {q}")
        L = -math.log(q)
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("q", q)
        set_("period1", -2 * L)
        set_("period2", 2j * math.pi)
        if L >= math.pi:
            # v = u / (2 pi i): 2 pi i -> 1, 2 ln q -> i L / pi
            set_("omega", 2j * math.pi)
            set_("tau", complex(0, L / math.pi))
        else:
            # v = u / (2 ln q): 2 ln q -> 1, 2 pi i -> i pi / L
            set_("omega", complex(-2 * L))
            set_("tau", complex(0, math.pi / L))
        set_("_shift", 0j)
        raw = [_p_unshifted(v, self) for v in (0.5, self.tau / 2, 0.5 + self.tau / 2)]
        set_("_shift", sum(raw) / 3)
        e_pi = complex(weierstrass_p(math.pi * 1j, self))
        e_lq = complex(weierstrass_p(-L, self))
        e_mid = complex(weierstrass_p(math.pi * 1j - L, self))
        set_("e1", e_pi.real)
        set_("e2", e_mid.real)
        set_("e3", e_lq.real)

    @property
    def theta_params(self):
        return ThetaParams(self.tau)


def _p_unshifted(v, wp):
    # sigma(v) is proportional to exp(quadratic) * theta(v + 1/2 + tau/2)
    _, d2 = log_theta_derivatives(np.asarray(v) + 0.5 + wp.tau / 2, wp.theta_params, 2)
    return -d2


def weierstrass_p(u, wp):
    """p(u) for the lattice 2 ln q Z + 2 pi i Z."""
    v = np.asarray(u, dtype=complex) / wp.omega
    if np.any(_lattice_distance(v, 0, wp.tau) < POLE_RADIUS):
        raise PoleError("p evaluated at a lattice point", location=complex(np.ravel(u)[0]))
    out = (_p_unshifted(v, wp) - wp._shift) / wp.omega**2
    return out if np.ndim(out) else complex(out)


def weierstrass_p_prime(u, wp):
    v = np.asarray(u, dtype=complex) / wp.omega
    if np.any(_lattice_distance(v, 0, wp.tau) < POLE_RADIUS):
        raise PoleError("p' evaluated at a lattice point")
    _, _, d3 = log_theta_derivatives(v + 0.5 + wp.tau / 2, wp.theta_params, 3)
    out = -d3 / wp.omega**3
    return out if np.ndim(out) else complex(out)


def invariants(wp):
    """(g2, g3) from the half-period values."""
    e1, e2, e3 = wp.e1, wp.e2, wp.e3
    g2 = -4 * (e1 * e2 + e1 * e3 + e2 * e3)
    g3 = 4 * e1 * e2 * e3
    return g2, g3


def half_period_values(wp):
    """(e1, e2, e3) = (p(pi i), p(pi i + ln q), p(ln q))."""
    return wp.e1, wp.e2, wp.e3


def half_period_imag_parts(wp):
    """Imaginary parts of the three half-period values before rounding to real."""
    pts = [math.pi * 1j, math.pi * 1j + math.log(wp.q), math.log(wp.q)]
    return [abs(complex(weierstrass_p(x, wp)).imag) for x in pts]


def check_domain(z):
    if np.any(np.asarray(z) == 0):
        raise DomainError("argument must be nonzero")
