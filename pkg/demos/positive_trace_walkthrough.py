"""Build a positive twisted trace from a weight function and check it three ways.

Run with ``python demos/positive_trace_walkthrough.py``.
"""

import cmath

import numpy as np

from qweyl_traces.laurent import LaurentPoly
from qweyl_traces.positivity import (
    circle_real_from_roots,
    cone_membership_annulus,
    flip_parity,
    member_weight,
    positivity_certificate,
    sign_samples,
)
from qweyl_traces.qweyl import AlgebraParams, ConjugationParams
from qweyl_traces.special import weight_w
from qweyl_traces.trace_alg import TraceSpec, default_window_start, trace_of_poly
from qweyl_traces.trace_analytic import analytic_trace, moments_from_weight

q, c = 0.5, 0.3
rng = np.random.default_rng(7)

# P is real on the unit circle: its roots come in pairs r, 1/conj(r)
roots = [1.3 * cmath.exp(1.0j), cmath.exp(1.0j) / 1.3, 1.4 * cmath.exp(-2.2j), cmath.exp(-2.2j) / 1.4]
P = circle_real_from_roots(roots)
print("P =", P)

# A weight with paired zeros, the right parity and a positive scale
wp = member_weight(P, q, c, rng)
report = cone_membership_annulus(wp, P)
print("membership:", report.verdict, "| m0 =", report.m0)

# The weight determines finitely many moments, and those determine the trace
n = P.width
start = default_window_start(n)
conj = ConjugationParams(c, P, q)
spec = TraceSpec(AlgebraParams(P, q), conj.t, moments_from_weight(wp, (start, start + n - 1)), window_start=start)

R = LaurentPoly({-3: 0.5, 0: 1.0, 2: -0.25j})
print("integral  T(R) =", analytic_trace(wp, R))
print("algebraic T(R) =", trace_of_poly(spec, R))

cert = positivity_certificate(spec, conj, 4)
print("certificate:", cert.verdict, "| smallest relative eigenvalue", f"{min(cert.sector0_min_eig):.3e}")

# Flipping the parity of the zeros keeps the trace but loses positivity
bad = flip_parity(wp)
bad_spec = TraceSpec(spec.params, conj.t, moments_from_weight(bad, (start, start + n - 1)), window_start=start)
print("flipped parity:", cone_membership_annulus(bad, P).verdict, "/",
      positivity_certificate(bad_spec, conj, 4).verdict)

# the weight itself stays positive; the failure shows on the shifted line
for name, w in (("original", wp), ("flipped", bad)):
    _, on_line, shifted = sign_samples(lambda x, w=w: weight_w(x, w), P, q, c)
    print(f"{name:8} min w {on_line.real.min():+.3e}   min shifted {shifted.real.min():+.3e}")
