"""End-to-end acceptance checks, one per criterion.

Each test prints a single ``PASS`` or ``FAIL`` line with the worst observed
residual before asserting, so ``pytest -v`` output doubles as a report.
"""

import cmath
import math

import numpy as np

from qweyl_traces.laurent import LaurentPoly
from qweyl_traces.nondegeneracy import (
    ExplicitWeightParams,
    cauchy_det_closed_form,
    cauchy_matrix,
    explicit_trace_spec,
    laurent_coeff_w,
    mittag_leffler_w,
    nondeg_scan,
)
from qweyl_traces.positivity import (
    break_pairing,
    circle_real_from_roots,
    cone_membership_annulus,
    flip_parity,
    general_cone_check,
    general_positivity_certificate,
    member_weight,
    negate,
    positivity_certificate,
)
from qweyl_traces.qweyl import (
    AlgebraElement,
    AlgebraParams,
    ConjugationParams,
    apply_g_t,
    filtered_basis,
    from_word,
    multiply,
)
from qweyl_traces.sl2 import (
    Sl2Params,
    certify_weight,
    circle_root_interval,
    classify_roots,
    invariant_trace_check,
    locate_boundaries,
    sl2_cone,
    unitarizability_interval,
)
from qweyl_traces.special import ThetaParams, WeightParams, tau_from_q, theta, theta_triple_product
from qweyl_traces.trace_alg import TraceSpec, default_window_start, trace_eval, trace_of_poly, trace_space_dimension
from qweyl_traces.trace_analytic import GeneralTraceSpec, analytic_trace, circle_integral, moments_from_weight

from conftest import dict_close, element_to_dict, random_annulus_roots, rewrite_word

SEED = 1729


def verdict(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def random_params(rng, n):
    # |q| and the scale of P are kept moderate so level-6 normal forms stay in double precision
    q = rng.uniform(0.7, 0.9) * cmath.exp(1j * rng.uniform(0, 0.5))
    P = LaurentPoly.from_roots(random_annulus_roots(rng, q, n), -(n // 2))
    P = P * (cmath.exp(1j * rng.uniform(0, 2 * math.pi)) / P.norm_inf())
    return AlgebraParams(P, q)


def random_word(rng, max_len):
    return "".join(rng.choice(list("uvZz"), size=int(rng.integers(0, max_len + 1))))


def test_criterion_1_algebra_soundness(capsys):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for trial in range(200):
        params = random_params(rng, 1 + trial % 3)
        P, q = params.P, params.q
        # the four defining relations, against the rewriting oracle
        for word, want in (("Zuz", {(1, 0): q**2}), ("Zvz", {(-1, 0): q**-2}),
                           ("uv", {(0, k): c * q**-k for k, c in P.coeffs.items()}),
                           ("vu", {(0, k): c * q**k for k, c in P.coeffs.items()})):
            got = element_to_dict(from_word(word, params))
            if not dict_close(got, want, 1e-12):
                worst = math.inf
        a, b, c = (from_word(random_word(rng, 4), params) for _ in range(3))
        left = multiply(multiply(a, b, params), c, params)
        right = multiply(a, multiply(b, c, params), params)
        dl, dr = element_to_dict(left), element_to_dict(right)
        scale = max([abs(v) for v in dl.values()] + [1e-300])
        worst = max(worst, max((abs(dl.get(k, 0) - dr.get(k, 0)) for k in set(dl) | set(dr)), default=0) / scale)
    verdict(capsys, 1, worst <= 1e-9, f"relations and associativity on 200 triples, worst relative residual {worst:.2e}")


def test_criterion_1_products_match_rewriting(capsys):
    rng = np.random.default_rng(SEED + 1)
    params = random_params(rng, 2)
    bad = 0
    for _ in range(200):
        w = random_word(rng, 8)
        if not dict_close(element_to_dict(from_word(w, params)), rewrite_word(w, params.P, params.q), 1e-9):
            bad += 1
    assert bad == 0


def test_criterion_2_twisted_trace_law(capsys):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    configs = 0
    for n in (1, 2, 3):
        for _ in range(5):
            params = random_params(rng, n)
            t = rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            spec = TraceSpec(params, t, rng.normal(size=n) + 1j * rng.normal(size=n))
            basis = filtered_basis(6, n)
            configs += 1
            for _ in range(100):
                pick = lambda: sum((basis[i] * complex(*rng.normal(size=2))
                                    for i in rng.choice(len(basis), 3)), AlgebraElement())
                a, b = pick(), pick()
                lhs = trace_eval(spec, multiply(a, b, params))
                rhs = trace_eval(spec, multiply(b, apply_g_t(a, t), params))
                worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    verdict(capsys, 2, worst <= 1e-9, f"{configs} configurations x 100 pairs in A<=6, worst {worst:.2e}")


def test_criterion_3_dimension(capsys):
    rng = np.random.default_rng(SEED)
    found = []
    for n in (1, 2, 3, 4):
        q = 0.6 * cmath.exp(0.3j)
        P = LaurentPoly.from_roots(random_annulus_roots(rng, q, n), -(n // 2))
        params = AlgebraParams(P, q)
        for t in (1.3 - 0.4j, q**-2):
            found.append((n, trace_space_dimension(params, t, (-3 * n - 2, 3 * n + 2))))
    ok = all(n == d for n, d in found)
    verdict(capsys, 3, ok, f"corank per (n) at generic and resonant t: {found}")


def _circle_real_P(rng, pairs, sign=1):
    # moduli stay inside [1.2, 1.5] (annulus edge at 2): roots near either circle push a pole of
    # the weight or of the shifted symbol toward the real line, and the ratio min/max of the
    # symbol, which bounds the relative Gram eigenvalue, falls below 1e-8
    roots = []
    for _ in range(pairs):
        r = rng.uniform(1.2, 1.5) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        roots += [r, 1 / np.conj(r)]
    return circle_real_from_roots(roots, sign)


def _member(rng, q=0.5):
    # clustered root angles give a weight spanning ten decades, whose Gram matrices are
    # positive but below any fixed relative threshold; such draws are resampled
    while True:
        P = _circle_real_P(rng, int(rng.integers(1, 3)), int(rng.choice([-1, 1])))
        c = float(rng.uniform(0, 1))
        wp = member_weight(P, q, c, rng, lam=float(rng.uniform(0.5, 2)))
        rep = cone_membership_annulus(wp, P)
        if min(rep.grid_min_w, rep.grid_min_shifted) > 1e-4:
            return P, c, wp


def _spec_from_weight(wp, P, q, t):
    n = P.width
    w = default_window_start(n)
    return TraceSpec(AlgebraParams(P, q), t, moments_from_weight(wp, (w, w + n - 1)), window_start=w)


def test_criterion_4_analytic_vs_algebraic(capsys):
    rng = np.random.default_rng(SEED)
    q = 0.5
    worst = 0.0
    for trial in range(50):
        if trial % 10 == 0:
            P, c, wp = _member(rng, q)
            spec = _spec_from_weight(wp, P, q, cmath.exp(2j * math.pi * c))
        lo = int(rng.integers(-8, 1))
        R = LaurentPoly({k: complex(*rng.normal(size=2)) for k in range(lo, lo + 9)})
        want = analytic_trace(wp, R)
        got = trace_of_poly(spec, R)
        worst = max(worst, abs(got - want) / abs(want))
    verdict(capsys, 4, worst <= 1e-9, f"50 random R of degree <= 8 over 5 paired weights, worst relative {worst:.2e}")


def test_criterion_5_theta_identities(capsys):
    tau = tau_from_q(0.5)
    p = ThetaParams(tau)
    xs = np.linspace(0, 1, 20, endpoint=False)
    ys = np.linspace(-0.5, 0.5, 20) * tau.imag
    z = (xs[:, None] + 1j * ys[None, :]).ravel()
    a, b = theta(z, p), theta_triple_product(z, p)
    prod_err = float(np.max(np.abs(a - b) / np.abs(a)))
    quasi = theta(z + tau, p) - np.exp(-1j * math.pi * tau - 2j * math.pi * z) * a
    quasi_err = float(np.max(np.abs(quasi) / np.abs(theta(z + tau, p))))
    zero = abs(theta(0.5 + tau / 2, p))
    ok = prod_err <= 1e-10 and quasi_err <= 1e-10 and zero <= 1e-14
    verdict(capsys, 5, ok, f"product {prod_err:.2e}, quasiperiodicity {quasi_err:.2e}, |theta(1/2 + tau/2)| {zero:.1e}")


def _split_pair(wp):
    x = wp.a[0].real
    return WeightParams(wp.lam, [complex(x - 0.2), complex(x + 0.2)] + list(wp.a[2:]), wp.beta, wp.tau, wp.c)


def test_criterion_6_positivity_classification(capsys):
    rng = np.random.default_rng(SEED)
    q = 0.5
    worst_member = math.inf
    members_ok = 0
    for _ in range(20):
        P, c, wp = _member(rng, q)
        conj = ConjugationParams(c, P, q)
        rep = cone_membership_annulus(wp, P)
        cert = positivity_certificate(_spec_from_weight(wp, P, q, conj.t), conj, 6)
        low = min(cert.sector0_min_eig + cert.sector1_min_eig)
        worst_member = min(worst_member, low)
        members_ok += rep.verdict == "member" and low > 1e-8
    caught = 0
    makers = (negate, flip_parity, _split_pair, break_pairing)
    for i in range(20):
        P, c, wp = _member(rng, q)
        bad = makers[i % len(makers)](wp)
        conj = ConjugationParams(c, P, q)
        flagged = cone_membership_annulus(bad, P).verdict == "non-member"
        try:
            cert = positivity_certificate(_spec_from_weight(bad, P, q, conj.t), conj, 6)
            refuted = cert.verdict == "not-positive"
        except ArithmeticError:
            # a functional whose form is not Hermitian is refuted outright
            refuted = True
        caught += flagged or refuted
    ok = members_ok == 20 and caught == 20
    verdict(capsys, 6, ok, f"members certified {members_ok}/20 (lowest relative eigenvalue {worst_member:.2e}), "
                           f"violators caught {caught}/20")


def _delta_spec(a, c1, q):
    ab = np.conj(a)
    P = circle_real_from_roots([q * a, a / q, q / ab, 1 / (q * ab)])
    zero = WeightParams(0.0, [], [], tau_from_q(q), 0.0)
    return GeneralTraceSpec(zero, delta_part=[(a, 0, c1), (1 / ab, 0, np.conj(c1))]), P


def _mass_spec(z1, z2, m1, m2, q):
    Q = LaurentPoly.from_roots([z1, z2], 0)
    P = circle_real_from_roots([z1 / q, z2 / q, q * z1, q * z2])
    zero = WeightParams(0.0, [], [], tau_from_q(q), 0.0)
    return GeneralTraceSpec(zero, Q, [(z1, m1), (z2, m2)]), P


DELTA_CASES = [(1.3 * cmath.exp(0.4j), 1), (0.8 * cmath.exp(2j), 0.5 + 0.5j), (1.1, 1 + 1j),
               (1.2 * cmath.exp(-1j), 2), (0.9 * cmath.exp(3j), -1 + 0.2j)]
MASS_CASES = [(cmath.exp(0.7j), cmath.exp(2.5j), -0.5, 1), (1, -1, 1, -0.2), (cmath.exp(1j), cmath.exp(-1j), -1, -1),
              (1j, -1j, -0.5, 0.5), (cmath.exp(0.2j), cmath.exp(4j), 2, -0.1)]


def test_criterion_7_general_case_exclusions(capsys):
    q = 0.5
    rejected = refuted = 0
    specs = [_delta_spec(a, c1, q) for a, c1 in DELTA_CASES] + [_mass_spec(*m, q) for m in MASS_CASES]
    for i, (spec, P) in enumerate(specs):
        rejected += general_cone_check(spec, P, q).verdict == "non-member"
        c = 0.0 if i % 2 == 0 else 0.3
        refuted += general_positivity_certificate(spec, P, q, c, 4).verdict == "not-positive"
    ok = rejected == len(specs) and refuted >= 5
    verdict(capsys, 7, ok, f"rejected {rejected}/{len(specs)}, Gram refutations {refuted}/{len(specs)} at m <= 4")


def test_criterion_8_explicit_weight_pipeline(capsys):
    p = ExplicitWeightParams(0.4, 0.5)
    scan = nondeg_scan(explicit_trace_spec(p), k_max=8)
    coeff_err = 0.0
    for i in range(9):
        f = lambda x, i=i: mittag_leffler_w(p, np.exp(2j * math.pi * x)) * np.exp(2j * math.pi * (i + 1) * x)
        want = circle_integral(f)
        coeff_err = max(coeff_err, abs(laurent_coeff_w(p, i) - want) / abs(want))
    rng = np.random.default_rng(SEED)
    cauchy_err = 0.0
    for n in range(1, 7):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        y = rng.normal(size=n) + 1j * rng.normal(size=n) + 3
        want = np.linalg.det(cauchy_matrix(x, y))
        cauchy_err = max(cauchy_err, abs(cauchy_det_closed_form(x, y) - want) / abs(want))
    ok = scan.overall == "nondegenerate-up-to-8" and coeff_err <= 1e-9 and cauchy_err <= 1e-10
    verdict(capsys, 8, ok, f"scan {scan.overall}, coefficient error {coeff_err:.2e}, Cauchy error {cauchy_err:.2e}")


def test_criterion_9_sl2_intervals(capsys):
    mismatches = 0
    edge_err = 0.0
    for q in (0.3, 0.5, 0.8):
        lo_u, hi_u = unitarizability_interval(q)
        lo_c, hi_c = circle_root_interval(q)
        span = hi_u - lo_u
        for c in np.linspace(lo_u - 0.5 * span, hi_u + 0.5 * span, 40):
            cls = classify_roots(q, c)
            mismatches += cls["in_annulus"] != (lo_u < c < hi_u)
            mismatches += cls["on_circle"] != (lo_c <= c <= hi_c)
        found = locate_boundaries(q)
        edge_err = max(edge_err, *(abs(a - b) for a, b in zip(found["annulus"], (lo_u, hi_u))),
                       *(abs(a - b) for a, b in zip(found["circle"], (lo_c, hi_c))))
    ok = mismatches == 0 and edge_err <= 1e-8
    verdict(capsys, 9, ok, f"classification mismatches {mismatches} over 120 c values, boundary error {edge_err:.1e}")


def test_criterion_10_sl2_cone(capsys):
    p = Sl2Params(0.5, -1.0)
    cone = sl2_cone(p)
    inside = outside = 0
    total_in = total_out = 0
    for fam in cone.ray_families:
        lo, hi = fam["a_interval"]
        s = fam["sign"]
        for a in (lo, hi, (lo + hi) / 2):
            total_in += 1
            inside += certify_weight(p, s * a, s * 1.0, fam["P_sign"], m_max=4).verdict == "positive"
        for a in (lo - 1e-3, hi + 1e-3):
            total_out += 1
            outside += certify_weight(p, s * a, s * 1.0, fam["P_sign"], m_max=4).verdict == "not-positive"
    ok = cone.regime == "roots-on-circle" and inside == total_in and outside == total_out
    verdict(capsys, 10, ok, f"family points certified {inside}/{total_in}, offsets refuted {outside}/{total_out}")


def test_criterion_11_invariant_trace(capsys):
    worst = 0.0
    for c in (-1.0, -0.5, 0.1):
        rep = invariant_trace_check(Sl2Params(0.5, c), k_max=6)
        worst = max(worst, rep.conjugation_residual, rep.raising_residual, rep.lowering_residual)
    verdict(capsys, 11, worst <= 1e-9, f"ad-invariance residual on A+ words up to level 6: {worst:.2e}")
