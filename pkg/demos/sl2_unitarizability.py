"""Sweep the Casimir parameter and watch the positive cone appear and vanish."""

import numpy as np

from qweyl_traces.errors import NoPositiveTraceError
from qweyl_traces.sl2 import Sl2Params, classify_roots, sl2_cone, unitarizability_interval

q = 0.5
lo, hi = unitarizability_interval(q)
print(f"q = {q}: positive traces exist for c in ({lo:.4f}, {hi:.4f})")

for c in np.linspace(lo - 0.5, hi + 0.5, 9):
    roots = classify_roots(q, c)
    try:
        fams = sl2_cone(Sl2Params(q, c)).ray_families
        summary = ", ".join(f"sign {f['sign']:+d} on {np.round(f['a_interval'], 3).tolist()}" for f in fams)
    except NoPositiveTraceError:
        summary = "none"
    print(f"c = {c:+.3f}  in annulus: {roots['in_annulus']!s:5}  families: {summary}")
