"""Normal-form arithmetic in the generalized q-Weyl algebra.

The algebra is generated by u, v and Z, 1/Z subject to

    Z u = q^2 u Z,   Z v = q^-2 v Z,   u v = P(Z/q),   v u = P(q Z).

Every element is a finite sum of graded pieces.  The piece of degree i is
stored as a Laurent polynomial R_i and means u^i R_i(Z) for i >= 0 and
v^(-i) R_i(Z) for i < 0, with the u/v powers kept to the left.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, NotInSubalgebraError
from .laurent import LaurentPoly, conj_reflect, scale_arg

CIRCLE_REAL_TOL = 1e-10


@dataclass(frozen=True)
class AlgebraParams:
    P: LaurentPoly
    q: complex

    def __post_init__(self):
        q = complex(self.q)
        object.__setattr__(self, "q", q)
        if q == 0 or abs(q) >= 1:
            raise ConfigurationError(f"need 0 < |q| < 1, got q={q}")
        if self.P.is_zero() or self.P.width < 1:
            raise ConfigurationError("P must have at least one nonzero root")

    @property
    def n(self):
        return self.P.width


class AlgebraElement:
    """Sum over i of the degree-i piece, stored as ``{i: LaurentPoly}``."""

    __slots__ = ("components",)

    def __init__(self, components=None):
        comps = {}
        for i, poly in (components or {}).items():
            if not isinstance(poly, LaurentPoly):
                poly = LaurentPoly(poly)
            if not poly.is_zero():
                comps[int(i)] = poly
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def scalar(cls, c):
        return cls({0: LaurentPoly.constant(c)})

    @classmethod
    def term(cls, i, poly):
        return cls({i: poly})

    def component(self, i):
        return self.components.get(i, LaurentPoly())

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        out = dict(self.components)
        for i, p in other.components.items():
            out[i] = out[i] + p if i in out else p
        return AlgebraElement(out)

    def __neg__(self):
        return AlgebraElement({i: -p for i, p in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, AlgebraElement):
            raise TypeError("use multiply(a, b, params) for algebra products")
        return AlgebraElement({i: p * s for i, p in self.components.items()})

    __rmul__ = __mul__

    def norm_inf(self):
        return max((p.norm_inf() for p in self.components.values()), default=0.0)

    def allclose(self, other, rtol=1e-9):
        scale = max(self.norm_inf(), other.norm_inf(), 1e-300)
        return (self - other).norm_inf() <= rtol * scale

    def __repr__(self):
        return f"AlgebraElement({self.components!r})"

    def to_json(self):
        return {"components": [[i, p.to_json()] for i, p in sorted(self.components.items())]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls({int(i): LaurentPoly.from_json(p) for i, p in obj["components"]})
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed algebra element JSON: {exc}") from None


def gen_u():
    return AlgebraElement({1: LaurentPoly.constant(1)})


def gen_v():
    return AlgebraElement({-1: LaurentPoly.constant(1)})


def gen_Z(k=1):
    return AlgebraElement({0: LaurentPoly.monomial(k)})


def _ladder(P, q, j, sign):
    """prod_{l<j} P(q^(sign*(2l+1)) Z): equals u^j v^j (sign -1) or v^j u^j (+1)."""
    out = LaurentPoly.constant(1)
    for l in range(j):
        out = out * scale_arg(P, q ** (sign * (2 * l + 1)))
    return out


def _mul_terms(i, R, j, S, params):
    """(x^i R(Z)) (y^j S(Z)) as (degree, poly) with the power to the left."""
    P, q = params.P, params.q
    q2 = q * q
    # move R(Z) past the second power: R(Z) u = u R(q^2 Z), R(Z) v = v R(q^-2 Z)
    RS = scale_arg(R, q2**j) * S
    if i >= 0 and j >= 0 or i <= 0 and j <= 0:
        return i + j, RS
    if i > 0:  # u^i v^m with m = -j
        m = -j
        if i >= m:
            return i - m, _ladder(P, q, m, -1) * RS
        # F(Z) v^(m-i) = v^(m-i) F(q^(-2(m-i)) Z)
        F = _ladder(P, q, i, -1)
        return i - m, scale_arg(F, q2 ** (-(m - i))) * RS
    m = -i  # v^m u^j
    if m >= j:
        return i + j, _ladder(P, q, j, +1) * RS
    G = _ladder(P, q, m, +1)
    return i + j, scale_arg(G, q2 ** (j - m)) * RS


def multiply(a, b, params):
    """Normal form of the product ``a * b``."""
    out = {}
    for i, R in a.components.items():
        for j, S in b.components.items():
            k, poly = _mul_terms(i, R, j, S, params)
            out[k] = out[k] + poly if k in out else poly
    return AlgebraElement(out)


def product(elements, params):
    out = AlgebraElement.scalar(1)
    for e in elements:
        out = multiply(out, e, params)
    return out


def from_word(word, params):
    """Element for a word in the letters u, v, Z and z (= 1/Z)."""
    letters = {"u": gen_u(), "v": gen_v(), "Z": gen_Z(1), "z": gen_Z(-1)}
    try:
        return product([letters[ch] for ch in word], params)
    except KeyError as exc:
        raise DomainError(f"unknown letter {exc} in word {word!r}") from None


def apply_g_t(a, t):
    """The automorphism scaling the degree-i piece by t^i."""
    if t == 0:
        raise DomainError("g_t needs t != 0")
    t = complex(t)
    return AlgebraElement({i: p * t**i for i, p in a.components.items()})


@dataclass(frozen=True)
class ConjugationParams:
    """Data for the antilinear conjugation rho with rho^2 = g_t, t = exp(2 pi i c)."""

    c: float
    P: LaurentPoly
    q: float
    t: complex = field(init=False)

    def __post_init__(self):
        c = float(self.c)
        if not 0 <= c < 1:
            raise ConfigurationError(f"c must lie in [0, 1), got {c}")
        qc = complex(self.q)
        if abs(qc.imag) > 0 or not 0 < qc.real < 1:
            raise ConfigurationError(f"conjugation needs real 0 < q < 1, got {self.q}")
        resid = (conj_reflect(self.P) - self.P).norm_inf()
        if resid > CIRCLE_REAL_TOL * max(self.P.norm_inf(), 1.0):
            raise ConfigurationError(
                f"P is not real on the unit circle (reflection residual {resid:.3g})")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "q", qc.real)
        object.__setattr__(self, "t", cmath.exp(2j * np.pi * c))


def apply_rho(a, conj):
    """Antilinear conjugation: u -> e^(-pi i c) v, v -> e^(pi i c) u, Z -> 1/Z."""
    out = {}
    for i, p in a.components.items():
        phase = cmath.exp(-1j * np.pi * conj.c * i)
        out[-i] = conj_reflect(p) * phase
    return AlgebraElement(out)


def filtration_degree(a, n):
    """Degree for deg u = deg v = n, deg Z = 2; defined on the positive part only."""
    deg = 0
    for i, p in a.components.items():
        if p.min_exp < 0:
            raise NotInSubalgebraError("element has negative powers of Z")
        deg = max(deg, n * abs(i) + 2 * p.max_exp)
    return deg


def filtered_basis(k, n):
    """Words u^i Z^j then v^i Z^j (i >= 1) with n*i + 2*j <= k.

    Ordered by the power of u (i = 0, 1, ...), then of v, then by j.
    """
    if k < 0:
        raise DomainError("filtration level must be nonnegative")
    out = []
    for sign in (1, -1):
        i = 0 if sign == 1 else 1
        while n * i <= k:
            for j in range((k - n * i) // 2 + 1):
                out.append(AlgebraElement({sign * i: LaurentPoly.monomial(j)}))
            i += 1
    return out
