"""Positivity of twisted traces: sign conditions, cone membership, Gram certificates."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InconsistencyError, WrongRegimeError
from .laurent import LaurentPoly, conj_reflect, eval as leval, nonzero_roots
from .special import WeightParams, weight_w
from .trace_alg import hermitian_gram_from, trace_of_poly
from .trace_analytic import betas_from_P, general_trace_eval, root_shift

GRID = 512
SIGN_RTOL = 1e-10
LATTICE_TOL = 1e-8
EIG_RTOL = 1e-8
ZERO_BLOCK_RTOL = 1e-10


def sample_grid(N=GRID):
    """Offset grid (j + 1/2) / N on [0, 1]."""
    return (np.arange(N) + 0.5) / N


def _real_betas(beta):
    return [b.real for b in beta if abs(b.imag) <= LATTICE_TOL]


def m0_sign(P, beta, tau, N=257):
    """0 or 1 with (-1)^m0 P(e^(2 pi i x)) / prod cos(pi (x - beta_j)) > 0 on R.

    The product runs over the real beta_j; its zeros coincide with the roots
    of P on the unit circle, so the quotient has no zeros or poles.
    """
    x = sample_grid(N)
    real = _real_betas(beta)
    den = np.ones_like(x)
    for b in real:
        den = den * np.cos(math.pi * (x - b))
    # skip samples where the cancellation is numerically unreliable
    keep = np.abs(den) > 1e-6
    vals = leval(P, np.exp(2j * math.pi * x[keep])) / den[keep]
    scale = max(np.abs(vals).max(), 1e-300)
    if np.abs(vals.imag).max() > 1e-8 * scale:
        raise InconsistencyError("P is not real on the unit circle")
    signs = np.sign(vals.real)
    if np.all(signs > 0):
        return 0
    if np.all(signs < 0):
        return 1
    raise InconsistencyError("quotient changes sign; roots on the circle do not match the real beta")


def _near_int(x, step=1):
    r = x / step
    return abs(r.real - round(r.real)) <= LATTICE_TOL and abs(x.imag) <= LATTICE_TOL


def pair_zeros(a):
    """Match zeros into conjugate pairs modulo 1.

    Returns representatives where each pair is exactly conjugate (the second
    member shifted by an integer, which leaves theta unchanged), or None if
    no such matching exists.
    """
    rest = list(a)
    out = []
    while rest:
        x = rest.pop(0)
        for j, y in enumerate(rest):
            d = x - y.conjugate()
            if _near_int(d):
                rest.pop(j)
                out += [x, y + round(d.real)]
                break
        else:
            return None
    return out


@dataclass
class ConeMembershipReport:
    pairing_ok: bool
    parity_ok: bool
    lambda_positive: bool
    sampled_sign_ok: bool
    m0: int | None
    verdict: str
    grid_min_w: float | None = None
    grid_min_shifted: float | None = None
    reasons: list = field(default_factory=list)

    def to_json(self):
        return {
            "pairing_ok": self.pairing_ok,
            "parity_ok": self.parity_ok,
            "lambda_positive": self.lambda_positive,
            "sampled_sign_ok": self.sampled_sign_ok,
            "m0": self.m0,
            "verdict": self.verdict,
            "grid_min_w": self.grid_min_w,
            "grid_min_shifted": self.grid_min_shifted,
            "reasons": list(self.reasons),
        }


def sign_samples(weight, P, q, c, N=GRID):
    """Samples of w(x) and e^(-pi i c) P(e^(2 pi i x)) w(x + tau/2) on the offset grid.

    `weight` is a callable accepting complex arrays.
    """
    x = sample_grid(N)
    half = cmath.log(complex(q)) / (2j * math.pi)
    w = np.asarray(weight(x.astype(complex)))
    shifted = cmath.exp(-1j * math.pi * c) * leval(P, np.exp(2j * math.pi * x)) * np.asarray(weight(x + half))
    return x, w, shifted


def relative_min(vals):
    """min Re / max |.|, or -inf if the imaginary part is not negligible."""
    scale = max(np.abs(vals).max(), 1e-300)
    if np.abs(vals.imag).max() > 1e-8 * scale:
        return -math.inf
    return float(vals.real.min() / scale)


def _membership(wp, P, q, reasons):
    lam_ok = wp.lam > 0
    paired = pair_zeros(wp.a)
    pairing_ok = paired is not None
    try:
        m0 = m0_sign(P, wp.beta, wp.tau)
    except InconsistencyError as exc:
        m0 = None
        reasons.append(str(exc))
    parity_ok = False
    if pairing_ok and m0 is not None:
        d = sum(paired) - sum(wp.beta) - wp.c - m0
        parity_ok = _near_int(d, 2)
    _, w, shifted = sign_samples(lambda x: weight_w(x, wp), P, q, wp.c)
    min_w, min_s = relative_min(w), relative_min(shifted)
    sign_ok = min_w >= -SIGN_RTOL and min_s >= -SIGN_RTOL
    for flag, msg in ((pairing_ok, "zeros are not in conjugate pairs"),
                      (parity_ok, "parity condition fails"),
                      (lam_ok, "lambda is not positive"),
                      (sign_ok, "sampled sign condition fails")):
        if not flag:
            reasons.append(msg)
    ok = pairing_ok and parity_ok and lam_ok and sign_ok
    return ConeMembershipReport(pairing_ok, parity_ok, lam_ok, sign_ok, m0,
                                "member" if ok else "non-member", min_w, min_s, reasons)


def cone_membership_annulus(wp, P):
    q = cmath.exp(1j * math.pi * wp.tau)
    aq = abs(q)
    for r, _ in nonzero_roots(P):
        if not aq < abs(r) < 1 / aq:
            raise WrongRegimeError(
                f"root {r} is outside the open annulus; use general_cone_check")
    return _membership(wp, P, q, [])


def circ_factor(P, q):
    """The factor of P with roots in the closed annulus, scaled so P / factor > 0 on |z| = 1."""
    inner = [r for r, m in nonzero_roots(root_shift(P, q).P_circ) for _ in range(m)]
    base = circle_real_from_roots(inner) if inner else LaurentPoly.constant(1)
    z = np.exp(2j * math.pi * sample_grid(64))
    ratio = leval(P, z) / leval(base, z)
    if np.abs(ratio.imag).max() > 1e-8 * np.abs(ratio).max() or not (
            np.all(ratio.real > 0) or np.all(ratio.real < 0)):
        raise InconsistencyError("P is not a real multiple of a circle-real factor with constant sign")
    return base if ratio.real[0] > 0 else -1 * base


def general_cone_check(spec, P, q):
    """Membership in the positive cone for a trace with roots anywhere.

    A nonzero delta part or a point mass that is not a nonnegative real
    rules membership out.  A zero weight (lambda = 0) is the vertex of the
    cone; otherwise the weight is checked against the annulus conditions
    for the factor of P with roots in the closed annulus.
    """
    reasons = []
    if spec.delta_part:
        reasons.append("delta part is nonzero")
    for z, c in spec.point_masses:
        if c.real < -LATTICE_TOL or abs(c.imag) > LATTICE_TOL:
            reasons.append(f"point mass {c} at {z} is not a nonnegative real")
    if reasons:
        return ConeMembershipReport(False, False, spec.weight.lam > 0, False, None,
                                    "non-member", reasons=reasons)
    if spec.weight.lam == 0:
        return ConeMembershipReport(True, True, True, True, None, "member",
                                    reasons=["zero weight"])
    return _membership(spec.weight, circ_factor(P, q), complex(q), reasons)


@dataclass
class PositivityCertificate:
    sector0_min_eig: list
    sector1_min_eig: list
    grid_min_w: float | None
    grid_min_shifted: float | None
    verdict: str

    def to_json(self):
        return {
            "sector0_min_eig": self.sector0_min_eig,
            "sector1_min_eig": self.sector1_min_eig,
            "grid_min_w": self.grid_min_w,
            "grid_min_shifted": self.grid_min_shifted,
            "verdict": self.verdict,
        }


def gram_eigen_scan(trace_fn, P, q, c, m_max):
    """Relative minimum eigenvalues (min eig / spectral radius) for m = 1..m_max.

    A block whose spectral radius is below 1e-10 |T(1)| is reported as zero.
    """
    out = ([], [])
    ref = abs(trace_fn(LaurentPoly.constant(1)))
    for sector in (0, 1):
        for m in range(1, m_max + 1):
            rep = hermitian_gram_from(trace_fn, P, q, c, sector, m)
            ev = np.linalg.eigvalsh(rep.matrix)
            scale = np.abs(ev).max()
            # a block that is round-off next to T(1) is reported as exactly zero
            if scale <= ZERO_BLOCK_RTOL * ref or scale == 0:
                out[sector].append(0.0)
            else:
                out[sector].append(float(ev[0] / scale))
    return out


def certify(trace_fn, P, q, c, m_max, weight=None, tol=EIG_RTOL):
    s0, s1 = gram_eigen_scan(trace_fn, P, q, c, m_max)
    gw = gs = None
    if weight is not None:
        _, w, shifted = sign_samples(weight, P, q, c)
        gw, gs = relative_min(w), relative_min(shifted)
    eigs = s0 + s1
    grids = [g for g in (gw, gs) if g is not None]
    if any(e < -tol for e in eigs) or any(g < -SIGN_RTOL for g in grids):
        verdict = "not-positive"
    elif all(e > tol for e in eigs):
        verdict = "positive"
    else:
        verdict = "inconclusive"
    return PositivityCertificate(s0, s1, gw, gs, verdict)


def positivity_certificate(spec, conj, m_max, weight=None, tol=EIG_RTOL):
    """Hermitian Gram eigenvalue scan for a moment-defined trace.

    Eigenvalues are reported relative to the spectral radius of each matrix.
    With a `weight` callable the two sampled sign conditions are checked too;
    grid minima are likewise relative to the largest sampled magnitude.
    """
    if abs(spec.t - conj.t) > 1e-12:
        raise ConfigurationError("conjugation twist does not match the trace twist")
    return certify(lambda R: trace_of_poly(spec, R), spec.P, conj.q, conj.c, m_max, weight, tol)


def general_positivity_certificate(spec, P, q, c, m_max, tol=EIG_RTOL):
    return certify(lambda R: general_trace_eval(spec, R), P, q, c, m_max, tol=tol)


# -- construction helpers ---------------------------------------------------

def circle_real_from_roots(roots, sign=1):
    """z^(-n/2) prod (z - r) rescaled by a unimodular constant to be real on |z| = 1.

    `roots` must be closed under r -> 1/conj(r) with multiplicity.
    """
    n = len(roots)
    if n % 2:
        raise ConfigurationError("a circle-real Laurent polynomial has an even number of roots")
    p = LaurentPoly.from_roots(roots, -(n // 2))
    top = p.max_exp
    gamma = conj_reflect(p).coeff(top) / p.coeff(top)
    p = p * cmath.sqrt(gamma)
    resid = (conj_reflect(p) - p).norm_inf()
    if resid > 1e-9 * p.norm_inf():
        raise ConfigurationError("roots are not closed under reflection in the unit circle")
    return p * sign


def member_zeros(P, q, c, rng, spread=(0.1, 0.4)):
    """Conjugate-paired zeros satisfying the parity condition for P."""
    tau = cmath.log(complex(q)) / (1j * math.pi)
    beta = betas_from_P(P)
    m0 = m0_sign(P, beta, tau)
    n = len(beta)
    xs = list(rng.uniform(0, 1, n // 2))
    ys = list(rng.uniform(*spread, n // 2) * tau.imag)
    target = (sum(beta).real + c + m0) / 2
    xs[-1] = target - sum(xs[:-1])
    a = []
    for x, y in zip(xs, ys):
        a += [complex(x, y), complex(x, -y)]
    return a


def member_weight(P, q, c, rng, lam=1.0):
    tau = cmath.log(complex(q)) / (1j * math.pi)
    return WeightParams(lam, member_zeros(P, q, c, rng), betas_from_P(P), tau, c)


def break_pairing(wp, delta=0.05):
    a = list(wp.a)
    a[0] += delta
    a[1] -= delta
    return WeightParams(wp.lam, a, wp.beta, wp.tau, wp.c)


def flip_parity(wp):
    a = list(wp.a)
    a[-1] += 0.5
    a[-2] += 0.5
    return WeightParams(wp.lam, a, wp.beta, wp.tau, wp.c)


def negate(wp):
    return WeightParams(-wp.lam, wp.a, wp.beta, wp.tau, wp.c)
