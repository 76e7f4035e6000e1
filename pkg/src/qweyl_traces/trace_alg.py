"""Twisted traces parameterized by moments.

A g_t-twisted trace is a functional on C[z, 1/z] that kills every
``phi(P * R)`` with ``phi(S)(z) = S(z/q) - t S(q z)``.  Since phi acts
diagonally on monomials, a trace is fixed by its values on a window of n
consecutive monomials complementary to the ideal generated by P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InconsistencyError, ResonanceError
from .laurent import LaurentPoly, divmod_window, scale_arg
from .qweyl import AlgebraParams, apply_rho, filtered_basis, multiply

RESONANCE_TOL = 1e-12
NONDEG_RTOL = 1e-8
HERMITIAN_TOL = 1e-8


def phi_factor(k, q, t):
    """phi(z^k) = phi_factor(k) z^k."""
    return q ** (-k) * (1 - t * q ** (2 * k))


def phi(S, q, t):
    return LaurentPoly({k: c * phi_factor(k, q, t) for k, c in S.coeffs.items()})


def resonant_exponent(q, t, kmin=-200, kmax=200):
    """Integer k with t = q^(-2k), or None."""
    q, t = complex(q), complex(t)
    # solve |t| = |q|^(-2k) first, then confirm the phase
    k = round(-math.log(abs(t)) / (2 * math.log(abs(q))))
    if kmin <= k <= kmax and abs(1 - t * q ** (2 * k)) <= RESONANCE_TOL:
        return k
    return None


def phi_inverse(R, q, t):
    """Monomial-wise inverse of phi; raises ResonanceError on a vanishing factor."""
    out = {}
    for k, c in R.coeffs.items():
        if abs(1 - t * q ** (2 * k)) <= RESONANCE_TOL:
            raise ResonanceError(k)
        out[k] = c / phi_factor(k, q, t)
    return LaurentPoly(out)


def default_window_start(n, positive_part=False):
    return 0 if positive_part else math.ceil(-n / 2)


@dataclass(frozen=True)
class TraceSpec:
    """A twisted trace given by its moments T(z^(w+i)), i = 0..n-1.

    `extra` is T(z^k) for the resonant exponent k when t = q^(-2k) and k
    falls outside the window.  With ``positive_part=True`` the trace lives on
    the subalgebra generated by u, v, Z (ordinary P, window starting at 0)
    and resonant t is rejected.
    """

    params: AlgebraParams
    t: complex
    moments: tuple
    window_start: int | None = None
    extra: complex | None = None
    positive_part: bool = False
    resonance: int | None = field(init=False, default=None)

    def __post_init__(self):
        n = self.params.n
        t = complex(self.t)
        object.__setattr__(self, "t", t)
        moments = tuple(complex(m) for m in self.moments)
        object.__setattr__(self, "moments", moments)
        if len(moments) != n:
            raise ConfigurationError(f"expected {n} moments, got {len(moments)}")
        if t == 0:
            raise ConfigurationError("t must be nonzero")
        w = self.window_start
        if w is None:
            w = default_window_start(n, self.positive_part)
            object.__setattr__(self, "window_start", w)
        q = self.params.q
        k = resonant_exponent(q, t)
        if self.positive_part:
            if w != 0 or self.params.P.min_exp < 0:
                raise ConfigurationError("positive-part traces need ordinary P and window 0")
            if k is not None and k >= 0:
                raise ResonanceError(k, f"t = q^(-2*{k}) is excluded on the positive part")
            k = None
        object.__setattr__(self, "resonance", k)
        if k is None:
            return
        if w <= k < w + n:
            if self.extra is not None and abs(self.extra - moments[k - w]) > 1e-12 * (1 + abs(self.extra)):
                raise ConfigurationError("extra value disagrees with the window moment")
            object.__setattr__(self, "extra", moments[k - w])
            return
        if self.extra is None:
            raise ConfigurationError(
                f"t is resonant at k={k} outside the window; supply the extra value T(z^{k})")
        # z^k = w0 + P*s with w0 in the window, and phi(w0) = -phi(P s) must be killed
        _, w0 = divmod_window(LaurentPoly.monomial(k), self.params.P, w)
        resid = sum(c * phi_factor(e, q, t) * moments[e - w] for e, c in w0.coeffs.items())
        scale = sum(abs(c * phi_factor(e, q, t) * moments[e - w]) for e, c in w0.coeffs.items())
        if abs(resid) > 1e-9 * max(scale, 1e-300):
            raise ConfigurationError("window moments are inconsistent with the resonance")

    @property
    def n(self):
        return self.params.n

    @property
    def q(self):
        return self.params.q

    @property
    def P(self):
        return self.params.P

    def to_json(self):
        out = {
            "P": self.P.to_json(),
            "q": [self.q.real, self.q.imag],
            "t": [self.t.real, self.t.imag],
            "window_start": self.window_start,
            "moments": [[m.real, m.imag] for m in self.moments],
        }
        if self.extra is not None:
            out["extra"] = [self.extra.real, self.extra.imag]
        if self.positive_part:
            out["positive_part"] = True
        return out

    @classmethod
    def from_json(cls, obj):
        try:
            P = LaurentPoly.from_json(obj["P"])
            q = _complex(obj["q"])
            t = _complex(obj["t"])
            moments = [_complex(m) for m in obj["moments"]]
            extra = _complex(obj["extra"]) if obj.get("extra") is not None else None
            return cls(AlgebraParams(P, q), t, moments,
                       window_start=obj.get("window_start"), extra=extra,
                       positive_part=bool(obj.get("positive_part", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed trace spec JSON: {exc}") from None


def _complex(x):
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(float(re), float(im))
    return complex(x)


def trace_of_poly(spec, A):
    """T(A(Z)) for a Laurent polynomial A."""
    q, t, w = spec.q, spec.t, spec.window_start
    k = spec.resonance
    value = 0j
    if k is not None and k in A.coeffs:
        value += A.coeffs[k] * spec.extra
        A = LaurentPoly({e: c for e, c in A.coeffs.items() if e != k})
    if A.is_zero():
        return value
    S = phi_inverse(A, q, t)
    _, B = divmod_window(S, spec.P, w)
    for e, c in B.coeffs.items():
        value += c * phi_factor(e, q, t) * spec.moments[e - w]
    return value


def trace_eval(spec, a):
    """T(a): only the degree-0 piece of `a` contributes."""
    if isinstance(a, LaurentPoly):
        return trace_of_poly(spec, a)
    return trace_of_poly(spec, a.component(0))


def trace_space_dimension(params, t, window, rtol=1e-9):
    """Numeric corank of the constraints T(phi(P z^k)) = 0 on a monomial window.

    `window` is an inclusive exponent range ``(lo, hi)``; only constraints
    supported inside it are used.  At t = q^(-2k) the same constraint set
    applies: phi kills z^k, and z^k is not a multiple of P.
    """
    lo, hi = window
    size = hi - lo + 1
    n = params.n
    if size < 3 * n:
        raise ConfigurationError(f"window of {size} exponents is smaller than 3n = {3 * n}")
    P, q, t = params.P, params.q, complex(t)
    rows = []
    for k in range(lo - P.min_exp, hi - P.max_exp + 1):
        row = np.zeros(size, dtype=complex)
        for e, c in P.coeffs.items():
            row[e + k - lo] = c * phi_factor(e + k, q, t)
        rows.append(row / max(np.abs(row).max(), 1e-300))
    M = np.array(rows)
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(s > rtol * s[0])) if len(s) else 0
    return size - rank


@dataclass
class GramReport:
    k: int
    matrix: np.ndarray
    det: complex
    min_singular_value: float
    verdict: str
    min_eigenvalue: float | None = None

    def to_json(self):
        out = {
            "k": self.k,
            "size": int(self.matrix.shape[0]),
            "det": [self.det.real, self.det.imag],
            "min_singular_value": self.min_singular_value,
            "verdict": self.verdict,
        }
        if self.min_eigenvalue is not None:
            out["min_eigenvalue"] = self.min_eigenvalue
        return out


def _report(k, M, rtol=NONDEG_RTOL, eig=None):
    s = np.linalg.svd(M, compute_uv=False)
    smin = float(s[-1]) if len(s) else 0.0
    ok = len(s) and s[0] > 0 and smin > rtol * s[0]
    det = complex(np.linalg.det(M)) if len(s) else 1 + 0j
    return GramReport(k, M, det, smin, "nondegenerate" if ok else "degenerate", eig)


def gram_matrix(spec, k, rtol=NONDEG_RTOL):
    """M_ij = T(w_i w_j) over the filtered basis of level k."""
    basis = filtered_basis(k, spec.n)
    d = len(basis)
    M = np.zeros((d, d), dtype=complex)
    for i, a in enumerate(basis):
        ia = next(iter(a.components))
        for j, b in enumerate(basis):
            if ia + next(iter(b.components)) != 0:
                continue
            M[i, j] = trace_eval(spec, multiply(a, b, spec.params))
    return _report(k, M, rtol)


def hermitian_gram_from(trace_fn, P, q, c, sector, m, rtol=NONDEG_RTOL):
    """Hermitian form of an arbitrary functional on Laurent polynomials.

    Sector 0 uses the basis Z^j, |j| <= m, with entries T(z^(j-k)).  Sector 1
    uses u (qZ)^j with entries e^(-pi i c) T(P(z/q) (z/q)^j (q/z)^k).
    """
    idx = range(-m, m + 1)
    size = 2 * m + 1
    M = np.zeros((size, size), dtype=complex)
    if sector == 0:
        cache = {d: trace_fn(LaurentPoly.monomial(d)) for d in range(-2 * m, 2 * m + 1)}
        for a, j in enumerate(idx):
            for b, k in enumerate(idx):
                M[a, b] = cache[j - k]
    elif sector == 1:
        Pq = scale_arg(P, 1 / q)
        phase = np.exp(-1j * np.pi * c)
        for a, j in enumerate(idx):
            for b, k in enumerate(idx):
                mono = LaurentPoly.monomial(j - k, q ** (k - j))
                M[a, b] = phase * trace_fn(Pq * mono)
    else:
        raise ConfigurationError("sector must be 0 or 1")
    # T(1) sets the scale when the whole sector is annihilated
    scale = max(np.abs(M).max(), abs(trace_fn(LaurentPoly.constant(1))), 1e-300)
    resid = np.abs(M - M.conj().T).max()
    if resid > HERMITIAN_TOL * scale:
        raise InconsistencyError(
            f"sector {sector} form is not Hermitian (residual {resid:.3g}, scale {scale:.3g})")
    H = (M + M.conj().T) / 2
    eig = float(np.linalg.eigvalsh(H)[0])
    return _report(m, H, rtol, eig)


def hermitian_gram(spec, conj, sector, m, rtol=NONDEG_RTOL):
    """Matrix of (a, b) = T(a rho(b)) on the degree-0 or degree-1 piece."""
    if abs(spec.t - conj.t) > 1e-12:
        raise ConfigurationError("conjugation twist does not match the trace twist")
    return hermitian_gram_from(lambda R: trace_of_poly(spec, R), spec.P, conj.q, conj.c,
                               sector, m, rtol)


def sesquilinear_matrix(spec, conj, basis):
    """Matrix of T(a rho(b)) on an explicit basis (used as a cross-check)."""
    d = len(basis)
    M = np.zeros((d, d), dtype=complex)
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            M[i, j] = trace_eval(spec, multiply(a, apply_rho(b, conj), spec.params))
    return M
