"""A trace given by a q^2-periodic rational weight, scanned for degeneracy."""

from qweyl_traces.nondegeneracy import ExplicitWeightParams, explicit_P, explicit_trace_spec, laurent_coeff_w, nondeg_scan

p = ExplicitWeightParams(0.4, 0.5)
print("poles at", p.a, "and", p.b, "| P =", explicit_P(p))
print("first coefficients of w:", [round(laurent_coeff_w(p, i).real, 6) for i in range(5)])

report = nondeg_scan(explicit_trace_spec(p), k_max=6)
for row in report.per_k:
    print(row)
print(report.overall)
