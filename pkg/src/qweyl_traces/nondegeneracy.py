"""An explicit t = q^2 trace and Gram-determinant nondegeneracy scans.

The weight w(x) is the q^2-invariant meromorphic function with simple poles
at q^(2k) a and q^(2k) b (b = q^2 / a), residues normalized by A/a = 1 and
B/b = -1, and zero additive constant.  The trace is

    T(R) = contour integral over |z| = 1 of R(z) w(z) dz.

For T to vanish on the twisted commutators the parameter polynomial must
vanish at a/q and b/q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, PoleError, ResonanceError
from .laurent import LaurentPoly, eval as leval
from .qweyl import AlgebraParams, filtered_basis
from .trace_alg import TraceSpec, _report, gram_matrix, sesquilinear_matrix
from .trace_analytic import circle_integral

ML_TOL = 1e-16


@dataclass(frozen=True)
class ExplicitWeightParams:
    a: complex
    q: complex
    b: complex = field(init=False)

    def __post_init__(self):
        a, q = complex(self.a), complex(self.q)
        if not 0 < abs(q) < 1:
            raise ConfigurationError("need 0 < |q| < 1")
        if not abs(q) ** 2 < abs(a) < 1:
            raise ConfigurationError(f"need |q|^2 < |a| < 1, got |a| = {abs(a)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", q * q / a)

    @property
    def residues(self):
        """(A, B), the residues at a and b."""
        return self.a, -self.b

    def truncation(self, tol=ML_TOL):
        return math.ceil(math.log(tol) / (2 * math.log(abs(self.q)))) + 4


def explicit_P(p):
    """Monic (z - a/q)(z - b/q): the parameter making the contour integral a q^2-twisted trace."""
    return LaurentPoly.from_roots([p.a / p.q, p.b / p.q])


def mittag_leffler_w(p, x, truncation_K=None):
    """Partial-fraction series with k = -K..K; negative k use the convergent rewrite."""
    K = p.truncation() if truncation_K is None else truncation_K
    if K < 8:
        raise ConfigurationError("truncation must be at least 8")
    x = np.asarray(x, dtype=complex)
    q2 = p.q**2
    a, b = p.a, p.b
    A, B = p.residues
    out = np.zeros_like(x)
    for k in range(-K, K + 1):
        pa, pb = q2**k * a, q2**k * b
        for pole in (pa, pb):
            if np.any(np.abs(x - pole) < 1e-9 * max(1.0, abs(pole))):
                raise PoleError(f"w evaluated at the pole {pole}", location=pole)
        if k >= 0:
            out = out + q2**k * A / (x - pa) + q2**k * B / (x - pb)
        else:
            out = out + x / (x - pa) - x / (x - pb)
    return out if np.ndim(out) else complex(out)


def laurent_coeff_w(p, i):
    """Coefficient of z^(-i-1) in the expansion of w on the unit circle, i >= 0."""
    if i < 0:
        raise DomainError("index must be nonnegative")
    q2 = p.q**2
    den = 1 - q2 ** (i + 1)
    if abs(den) < 1e-14:
        raise ResonanceError(i, "1 - q^(2(i+1)) vanishes")
    return (p.a ** (i + 1) - q2 ** (i + 1) * p.a ** (-i - 1)) / den


def laurent_coeff_any(p, e):
    """Coefficient of z^e for any integer e (the constant term is zero)."""
    if e <= -1:
        return laurent_coeff_w(p, -e - 1)
    if e == 0:
        return 0j
    q2e = p.q ** (2 * e)
    return q2e * (p.b ** (-e) - p.a ** (-e)) / (1 - q2e)


def explicit_trace(p, R):
    """T(R) = 2 pi i times the residue-at-infinity-free coefficient of z^-1 in R w."""
    return 2j * math.pi * sum(c * laurent_coeff_any(p, -k - 1) for k, c in R.coeffs.items())


def explicit_moments(p, window=(0, 1)):
    lo, hi = window
    return tuple(explicit_trace(p, LaurentPoly.monomial(i)) for i in range(lo, hi + 1))


def explicit_trace_spec(p):
    """TraceSpec on the subalgebra generated by u, v, Z for the explicit weight."""
    return TraceSpec(AlgebraParams(explicit_P(p), p.q), p.q**2, explicit_moments(p),
                     window_start=0, positive_part=True)


def hilbert_like_matrix(R, m, p, tol=1e-14):
    """M_ij = contour integral of R(z) w(z) z^(i+j) dz over |z| = 1, 0 <= i, j <= m."""
    cache = {}
    for s in range(2 * m + 1):
        RS = R.shift(s + 1)

        def f(x, RS=RS):
            z = np.exp(2j * math.pi * x)
            return leval(RS, z) * mittag_leffler_w(p, z)

        cache[s] = 2j * math.pi * circle_integral(f, tol)
    return np.array([[cache[i + j] for j in range(m + 1)] for i in range(m + 1)])


def leading_matrix(m, d, q):
    """(M_0)_ij = 1 / (1 - q^(2i+2j+2d+2))."""
    q = complex(q)
    return np.array([[1 / (1 - q ** (2 * i + 2 * j + 2 * d + 2)) for j in range(m + 1)]
                     for i in range(m + 1)])


def det_coefficients(R, m, q, radius=0.6, degree=None):
    """Laurent coefficients in a of det(M / 2 pi i), fitted by a DFT on |a| = radius.

    Returns ``{exponent: coefficient}`` for exponents -D..D with
    D = (m+1)(d+m+1), the largest possible degree.
    """
    d = R.max_exp
    D = (m + 1) * (d + m + 1) if degree is None else degree
    N = 2 * D + 2
    ang = 2 * math.pi * np.arange(N) / N
    vals = []
    for th in ang:
        p = ExplicitWeightParams(radius * np.exp(1j * th), q)
        M = hilbert_like_matrix(R, m, p) / (2j * math.pi)
        vals.append(np.linalg.det(M))
    vals = np.array(vals)
    out = {}
    for e in range(-D, D + 1):
        out[e] = complex(np.mean(vals * np.exp(-1j * e * ang)) / radius**e)
    return out


def cauchy_det_closed_form(x, y):
    """prod_{i<j} (x_j - x_i)(y_i - y_j) / prod_{i,j} (x_i - y_j)."""
    x = [complex(v) for v in x]
    y = [complex(v) for v in y]
    n = len(x)
    if len(y) != n:
        raise DomainError("x and y must have the same length")
    num = 1 + 0j
    for i in range(n):
        for j in range(i + 1, n):
            num *= (x[j] - x[i]) * (y[i] - y[j])
    if num == 0:
        raise DomainError("points must be pairwise distinct")
    den = 1 + 0j
    for xi in x:
        for yj in y:
            if xi == yj:
                raise DomainError("x_i coincides with y_j")
            den *= xi - yj
    return num / den


def cauchy_matrix(x, y):
    return np.array([[1 / (complex(xi) - complex(yj)) for yj in y] for xi in x])


@dataclass
class NondegeneracyReport:
    per_k: list
    overall: str

    def to_json(self):
        return {
            "per_k": [{"k": k, "d": d, "det": [det.real, det.imag],
                       "min_singular_value": s, "verdict": v}
                      for k, d, det, s, v in self.per_k],
            "overall": self.overall,
        }


def nondeg_scan(spec, conj=None, k_max=8):
    """Gram matrices over the filtered basis for k = 0..k_max.

    With `conj` the sesquilinear form T(a rho(b)) is used instead of the
    bilinear pairing T(a b).
    """
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    rows = []
    first_bad = None
    for k in range(k_max + 1):
        if conj is None:
            rep = gram_matrix(spec, k)
        else:
            rep = _report(k, sesquilinear_matrix(spec, conj, filtered_basis(k, spec.n)))
        rows.append((k, rep.matrix.shape[0], rep.det, rep.min_singular_value, rep.verdict))
        if rep.verdict == "degenerate" and first_bad is None:
            first_bad = k
    overall = f"nondegenerate-up-to-{k_max}" if first_bad is None else f"degenerate-at-{first_bad}"
    return NondegeneracyReport(rows, overall)
