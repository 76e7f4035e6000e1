"""Central reductions of U_q(sl2) as q-Weyl algebras with a two-root parameter.

Here E, F, K act as u, v, Z and the Casimir value c fixes

    P(x) = -(x + 1/x - 2) / (q - 1/q)^2 + c.

Traces (t = 1) are T(R) = integral over |z| = 1 of R(z) w(z) |dz| with w a
q^2-elliptic function, spanned by 1 and w1 = 1 / (w0 - c0), where
w0(z) = p(ln z) and c0 = w0(q z1) for a root z1 of P.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, InconsistencyError, NoPositiveTraceError
from .laurent import LaurentPoly, eval as leval
from .positivity import certify, sample_grid
from .qweyl import AlgebraParams, apply_g_t, filtered_basis, gen_u, gen_v, gen_Z, multiply
from .special import WeierstrassParams, weierstrass_p
from .trace_alg import TraceSpec, trace_eval, trace_of_poly
from .trace_analytic import circle_integral

CIRCLE_TOL = 1e-6
NODE_OFFSET = (math.sqrt(5) - 1) / 7
# 1 / (w0 - c0) amplifies round-off in p when c0 is close to a half-period value
MOMENT_TOL = 1e-10


def _check_q(q):
    if not 0 < q < 1:
        raise DomainError(f"need 0 < q < 1, got {q}")


def casimir_to_P(q, c):
    _check_q(q)
    k = 1 / (q - 1 / q) ** 2
    return LaurentPoly({-1: -k, 0: 2 * k + c, 1: -k})


def casimir_roots(q, c):
    """Roots of P from the quadratic x^2 - s x + 1 with s = c (q - 1/q)^2 + 2."""
    _check_q(q)
    s = c * (q - 1 / q) ** 2 + 2
    d = cmath.sqrt(s * s - 4)
    r1, r2 = (s + d) / 2, (s - d) / 2
    return sorted([complex(r1), complex(r2)], key=lambda z: (abs(z), cmath.phase(z)))


def unitarizability_interval(q):
    _check_q(q)
    d = (q - 1 / q) ** 2
    return (-q - 1 / q - 2) / d, (q + 1 / q - 2) / d


def circle_root_interval(q):
    _check_q(q)
    return -4 / (q - 1 / q) ** 2, 0.0


def classify_roots(q, c, roots=None):
    """Root configuration: in_annulus, on_circle and which real ray (if any)."""
    roots = casimir_roots(q, c) if roots is None else roots
    in_annulus = all(q < abs(r) < 1 / q for r in roots)
    on_circle = all(abs(abs(r) - 1) <= CIRCLE_TOL for r in roots)
    ray = None
    if not on_circle:
        ray = "positive" if roots[0].real > 0 else "negative"
    return {"in_annulus": in_annulus, "on_circle": on_circle, "ray": ray}


def _bisect(pred, lo, hi, tol=1e-12):
    """Boundary of a predicate that differs at lo and hi."""
    plo = pred(lo)
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = (lo + hi) / 2
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def locate_boundaries(q, span=None):
    """Numerically located endpoints of the annulus and circle intervals."""
    lo_u, hi_u = unitarizability_interval(q)
    lo_c, hi_c = circle_root_interval(q)
    inside = lambda c: classify_roots(q, c)["in_annulus"]
    circle = lambda c: classify_roots(q, c)["on_circle"]
    w = span or 0.25 * (hi_u - lo_u)
    mid_c = (lo_c + hi_c) / 2
    return {
        "annulus": (_bisect(inside, lo_u - w, mid_c), _bisect(inside, mid_c, hi_u + w)),
        "circle": (_bisect(circle, lo_c - w, mid_c), _bisect(circle, mid_c, hi_c + w)),
    }


@dataclass(frozen=True)
class Sl2Params:
    q: float
    c: float
    P: LaurentPoly = field(init=False)
    roots: tuple = field(init=False)
    c0: float = field(init=False)
    wp: WeierstrassParams = field(init=False, repr=False)

    def __post_init__(self):
        q, c = float(self.q), float(self.c)
        _check_q(q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "P", casimir_to_P(q, c))
        roots = tuple(casimir_roots(q, c))
        object.__setattr__(self, "roots", roots)
        wp = WeierstrassParams(q)
        object.__setattr__(self, "wp", wp)
        c0 = complex(weierstrass_p(math.log(q) + cmath.log(roots[0]), wp))
        if abs(c0.imag) > 1e-8 * max(1.0, abs(c0)):
            raise InconsistencyError(f"c0 = {c0} is not real")
        object.__setattr__(self, "c0", c0.real)

    @property
    def algebra(self):
        return AlgebraParams(self.P, self.q)

    def w0(self, z):
        return weierstrass_p(np.log(np.asarray(z, dtype=complex)), self.wp)

    def w1(self, z):
        return 1 / (self.w0(z) - self.c0)

    def regime(self):
        e1, e2, e3 = self.wp.e1, self.wp.e2, self.wp.e3
        c0 = self.c0
        if e2 < c0 < e3:
            return "roots-on-circle"
        if c0 >= e3:
            return "roots-on-positive-ray"
        if e1 <= c0 <= e2:
            return "roots-on-negative-ray"
        raise InconsistencyError(f"c0 = {c0} lies below e1 = {e1}")


def weight_function(params, A, B):
    """W(x) = 2 pi (A + B w1(e^(2 pi i x))); the |dz| measure contributes 2 pi."""
    def W(x):
        z = np.exp(2j * math.pi * np.asarray(x, dtype=complex))
        return 2 * math.pi * (A + B * params.w1(z))
    return W


def trace_spec_for(params, A, B, P_sign=1):
    """t = 1 trace on the algebra with parameter P_sign * P for w = A + B w1."""
    W = weight_function(params, A, B)
    moments = []
    for k in (-1, 0):
        f = lambda x, k=k: W(x) * np.exp(2j * math.pi * k * x)
        moments.append(circle_integral(f, MOMENT_TOL, offset=NODE_OFFSET))
    alg = AlgebraParams(params.P * P_sign, params.q)
    return TraceSpec(alg, 1.0, moments, window_start=-1)


def certify_weight(params, A, B, P_sign, m_max=4):
    spec = trace_spec_for(params, A, B, P_sign)
    W = weight_function(params, A, B)
    return certify(lambda R: trace_of_poly(spec, R), spec.P, params.q, 0.0, m_max, weight=W)


def _feasible_arc(normals):
    """Directions d with n . d >= 0 for all sampled normals, as an angle interval."""
    n = normals / np.linalg.norm(normals, axis=1)[:, None]
    m = n.mean(axis=0)
    base = math.atan2(m[1], m[0])
    ang = np.angle(np.exp(1j * (np.arctan2(n[:, 1], n[:, 0]) - base)))
    lo, hi = ang.min(), ang.max()
    if hi - lo > math.pi:
        return None
    return base + hi - math.pi / 2, base + lo + math.pi / 2


def _families_from_arc(arc, P_sign, source):
    """Split the arc of (A, B) directions into families +-lambda (a + w1), a = A / B."""
    th_lo, th_hi = arc
    out = []
    for sign in (1, -1):
        # directions with sign(B) = sign: theta in (0, pi) for +, (pi, 2 pi) for -
        lo, hi = (0.0, math.pi) if sign == 1 else (math.pi, 2 * math.pi)
        best = None
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            a, b = max(th_lo + shift, lo), min(th_hi + shift, hi)
            if a < b - 1e-12:
                best = (a, b)
        if best is None:
            continue
        a_lo = None if best[1] >= hi - 1e-12 else math.cos(best[1]) / math.sin(best[1])
        a_hi = None if best[0] <= lo + 1e-12 else math.cos(best[0]) / math.sin(best[0])
        out.append({"P_sign": P_sign, "sign": sign, "a_interval": [a_lo, a_hi], "source": source})
    return out


def sampled_families(params, P_sign, N=2048):
    """Admissible (A, B) from sampled sign conditions on |z| = 1 and |z| = q.

    The extremes of w1 on both circles sit at z = 1 and z = -1 (half periods
    of p), so those values are added exactly; w1(1) = 0 as a limit.
    """
    e1, e2, e3, c0 = params.wp.e1, params.wp.e2, params.wp.e3, params.c0
    z = np.exp(2j * math.pi * sample_grid(N))
    w1_circle = np.append(params.w1(z).real, [0.0, 1 / (e1 - c0)])
    w1_shift = np.append(params.w1(params.q * z).real, [1 / (e3 - c0), 1 / (e2 - c0)])
    Pz = P_sign * np.append(leval(params.P, z).real, [leval(params.P, 1.0).real,
                                                       leval(params.P, -1.0).real])
    normals = np.vstack([
        np.stack([np.ones_like(w1_circle), w1_circle], axis=1),
        np.sign(Pz)[:, None] * np.stack([np.ones_like(w1_shift), w1_shift], axis=1),
    ])
    # P vanishing at a sample gives no constraint there
    normals = normals[np.any(normals != 0, axis=1)]
    arc = _feasible_arc(normals)
    if arc is None:
        return []
    return _families_from_arc(arc, P_sign, "extrapolated")


@dataclass
class Sl2ConeDescription:
    regime: str
    basis: tuple
    ray_families: list
    e: tuple
    c0: float

    def to_json(self):
        return {
            "regime": self.regime,
            "basis": list(self.basis),
            "ray_families": self.ray_families,
            "e": list(self.e),
            "c0": self.c0,
        }


def sl2_cone(params):
    lo, hi = unitarizability_interval(params.q)
    if not lo < params.c < hi:
        raise NoPositiveTraceError(
            f"c = {params.c} is outside the unitarizability interval ({lo}, {hi})")
    regime = params.regime()
    e1, e2, e3 = params.wp.e1, params.wp.e2, params.wp.e3
    c0 = params.c0
    if regime == "roots-on-circle":
        # P < 0 on the arc through z = 1, so the positive branch needs -P
        families = [
            {"P_sign": -1, "sign": 1, "a_interval": [1 / (c0 - e1), 1 / (c0 - e2)],
             "source": "closed-form"},
            {"P_sign": 1, "sign": -1, "a_interval": [-1 / (e3 - c0), 0.0],
             "source": "closed-form"},
        ]
    else:
        families = sampled_families(params, 1) + sampled_families(params, -1)
    return Sl2ConeDescription(regime, ("1", "1/(w0-c0)"), families, (e1, e2, e3), c0)


@dataclass
class InvariantTraceReport:
    conjugation_residual: float
    raising_residual: float
    lowering_residual: float
    twisted_law_residual: float
    restricted_rank: int
    words: int

    def to_json(self):
        return dict(self.__dict__)


def invariant_twisted_spec(T0):
    """T(a) = T0(a / K) as a trace twisted by t = q^-2.

    With t = q^-2 the exponent 1 is resonant and outside the window, so its
    value T(z) = T0(1) is supplied explicitly.
    """
    w = T0.window_start
    moments = [trace_of_poly(T0, LaurentPoly.monomial(e - 1)) for e in range(w, w + T0.n)]
    extra = trace_of_poly(T0, LaurentPoly.constant(1))
    return TraceSpec(T0.params, T0.q ** -2, moments, window_start=w, extra=extra)


def invariant_trace_check(params, k_max=6, T0=None):
    """Ad-invariance residuals of T(a) = T0(a / K) on the filtered basis up to k_max."""
    alg = params.algebra
    if T0 is None:
        T0 = TraceSpec(alg, 1.0, (1.0, 0.3), window_start=-1)
    if abs(T0.t - 1) > 1e-12:
        raise ConfigurationError("T0 must be an untwisted trace")
    Kinv, K = gen_Z(-1), gen_Z(1)
    E, F = gen_u(), gen_v()
    T = lambda a: trace_eval(T0, multiply(Kinv, a, alg))
    Tt = invariant_twisted_spec(T0)
    basis = filtered_basis(k_max, alg.n)
    res = [0.0, 0.0, 0.0, 0.0]
    for a in basis:
        scale = 1 + abs(T(a))
        Ad = multiply(multiply(K, a, alg), Kinv, alg)
        res[0] = max(res[0], abs(T(Ad) - T(a)) / scale)
        r = T(multiply(E, a, alg)) - T(multiply(Ad, E, alg))
        res[1] = max(res[1], abs(r) / scale)
        comm = multiply(F, a, alg) - multiply(a, F, alg)
        res[2] = max(res[2], abs(T(multiply(comm, K, alg))) / scale)
        for b in basis[:6]:
            lhs = trace_eval(Tt, multiply(a, b, alg))
            rhs = trace_eval(Tt, multiply(b, apply_g_t(a, Tt.t), alg))
            res[3] = max(res[3], abs(lhs - rhs) / (1 + abs(lhs)))
    return InvariantTraceReport(*res, restricted_rank(alg), len(basis))


def restricted_rank(alg, J=8, rtol=1e-9):
    """Rank of T(K^-j), j = 0..J, over a basis of the two-dimensional space of T0."""
    rows = []
    for mom in ((1.0, 0.0), (0.0, 1.0)):
        T0 = TraceSpec(alg, 1.0, mom, window_start=-1)
        rows.append([trace_of_poly(T0, LaurentPoly.monomial(-j - 1)) for j in range(J + 1)])
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))
