import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qweyl_traces.errors import ConfigurationError, InconsistencyError, ResonanceError
from qweyl_traces.laurent import LaurentPoly, divmod_window
from qweyl_traces.nondegeneracy import ExplicitWeightParams, explicit_trace_spec, mittag_leffler_w
from qweyl_traces.positivity import circle_real_from_roots, member_weight
from qweyl_traces.qweyl import (
    AlgebraElement,
    AlgebraParams,
    ConjugationParams,
    apply_g_t,
    filtered_basis,
    from_word,
    gen_u,
    multiply,
)
from qweyl_traces.special import WeightParams
from qweyl_traces.trace_alg import (
    TraceSpec,
    default_window_start,
    gram_matrix,
    hermitian_gram,
    hermitian_gram_from,
    phi,
    phi_factor,
    phi_inverse,
    trace_eval,
    trace_of_poly,
    trace_space_dimension,
)
from qweyl_traces.trace_analytic import circle_integral, moments_from_weight

from conftest import random_annulus_roots, random_poly


def test_phi_examples():
    assert phi(LaurentPoly.monomial(1), 0.5, 2).allclose(LaurentPoly.monomial(1))
    t = 0.7 - 0.2j
    assert phi(LaurentPoly.constant(1), 0.3, t).allclose(LaurentPoly.constant(1 - t))
    q = 0.6
    assert phi(LaurentPoly.monomial(3), q, q**-6).is_zero()


def test_phi_is_the_difference_operator(rng):
    q, t = 0.4 + 0.3j, 1.7 - 0.5j
    S = random_poly(rng, -3, 3)
    z = 0.9 * cmath.exp(0.4j)
    assert abs(phi(S, q, t)(z) - (S(z / q) - t * S(q * z))) < 1e-9 * (1 + abs(S(z / q)))


def test_phi_inverse_examples(rng):
    assert phi_inverse(LaurentPoly.monomial(1), 0.5, 2).allclose(LaurentPoly.monomial(1))
    S = random_poly(rng, -4, 4)
    q, t = 0.5, 0.3 + 0.1j
    assert phi_inverse(phi(S, q, t), q, t).allclose(S, 1e-12)
    with pytest.raises(ResonanceError) as err:
        phi_inverse(LaurentPoly({0: 1, 1: 1}), 0.5, 4.0)
    assert err.value.k == 1


def test_trace_of_u_vanishes():
    spec = TraceSpec(AlgebraParams(LaurentPoly({1: 1, 0: -1.5}), 0.5), 2.0, [1.0])
    assert trace_eval(spec, gen_u()) == 0


def test_hand_solved_one_moment_trace():
    spec = TraceSpec(AlgebraParams(LaurentPoly({1: 1, 0: -1.5}), 0.5), 2.0, [1.0])
    assert spec.window_start == 0
    assert trace_of_poly(spec, LaurentPoly.monomial(1)) == pytest.approx(-1.5)


def test_moments_are_reproduced(rng):
    P = random_poly(rng, -1, 2)
    moments = list(rng.normal(size=3) + 1j * rng.normal(size=3))
    spec = TraceSpec(AlgebraParams(P, 0.5 + 0.2j), 0.8j, moments)
    for i, m in enumerate(moments):
        assert trace_of_poly(spec, LaurentPoly.monomial(spec.window_start + i)) == pytest.approx(m)


def test_moment_count_checked():
    with pytest.raises(ConfigurationError):
        TraceSpec(AlgebraParams(LaurentPoly({1: 1, 0: -1.5}), 0.5), 2.0, [1.0, 2.0])


def _random_spec(rng, n, t=None, q=None):
    # normal forms of u^k v^k carry coefficients of size |q|^(-k^2), so |q| is
    # kept away from 0 to stay inside double precision at filtration level 6
    q = q if q is not None else rng.uniform(0.7, 0.9) * cmath.exp(1j * rng.uniform(0, 0.5))
    P = LaurentPoly.from_roots(random_annulus_roots(rng, q, n), -(n // 2))
    P = P * (cmath.exp(1j * rng.uniform(0, 2 * math.pi)) / P.norm_inf())
    # g_t scales degree-k pieces by t^k, so |t| is kept near 1 for the same reason
    t = t if t is not None else rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    moments = rng.normal(size=n) + 1j * rng.normal(size=n)
    return TraceSpec(AlgebraParams(P, q), t, moments)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_ideal_annihilation(seed, n):
    rng = np.random.default_rng(seed)
    spec = _random_spec(rng, n)
    for k in range(-8, 9):
        R = phi(spec.P * LaurentPoly.monomial(k), spec.q, spec.t)
        scale = sum(abs(c * trace_of_poly(spec, LaurentPoly.monomial(e))) for e, c in R.coeffs.items())
        assert abs(trace_of_poly(spec, R)) <= 1e-10 * max(1.0, scale)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_twisted_trace_law(seed, n):
    rng = np.random.default_rng(seed)
    spec = _random_spec(rng, n)
    basis = filtered_basis(6, n)
    for _ in range(5):
        a = sum((b * complex(*rng.normal(size=2)) for b in rng.choice(basis, 3)), AlgebraElement())
        b = sum((b * complex(*rng.normal(size=2)) for b in rng.choice(basis, 3)), AlgebraElement())
        lhs = trace_eval(spec, multiply(a, b, spec.params))
        rhs = trace_eval(spec, multiply(b, apply_g_t(a, spec.t), spec.params))
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_trace_law_at_resonant_t(rng):
    q = 0.5
    P = LaurentPoly.from_roots(random_annulus_roots(rng, q, 2), -1)
    t = q**-2
    # z^1 is resonant and outside the window {-1, 0}; the window moments must
    # then satisfy one linear condition, and T(z) is a free extra value
    _, w0 = divmod_window(LaurentPoly.monomial(1), P, -1)
    v = [w0.coeff(e) * phi_factor(e, q, t) for e in (-1, 0)]
    params = AlgebraParams(P, q)
    specs = [TraceSpec(params, t, [v[1], -v[0]], window_start=-1, extra=x) for x in (0.0, 0.7)]
    assert specs[0].resonance == 1
    with pytest.raises(ConfigurationError):
        TraceSpec(params, t, [v[1] + 1, -v[0]], window_start=-1, extra=0.0)
    for a, b in ((from_word("uZ", params), from_word("vz", params)),
                 (from_word("uu", params), from_word("vvZ", params)),
                 (from_word("u", params), from_word("vZZ", params))):
        for spec in specs:
            lhs = trace_eval(spec, multiply(a, b, params))
            rhs = trace_eval(spec, multiply(b, apply_g_t(a, t), params))
            assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_resonant_t_rejected_on_positive_part():
    P = LaurentPoly({0: 1, 1: -2, 2: 0.5})
    with pytest.raises(ResonanceError):
        TraceSpec(AlgebraParams(P, 0.5), 4.0, [1.0, 1.0], positive_part=True)


def test_linearity_in_moments(rng):
    spec = _random_spec(rng, 3)
    R = random_poly(rng, -5, 5)
    parts = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1
        parts.append(trace_of_poly(TraceSpec(spec.params, spec.t, e), R))
    assert trace_of_poly(spec, R) == pytest.approx(sum(m * p for m, p in zip(spec.moments, parts)))


def test_dimension_examples():
    q = 0.5
    P2 = LaurentPoly({-1: 0.4, 0: -1.1, 1: 0.9})
    assert trace_space_dimension(AlgebraParams(P2, q), 0.37 + 0.2j, (-6, 6)) == 2
    assert trace_space_dimension(AlgebraParams(LaurentPoly({1: 1, 0: -0.8}), q), 1.3, (-5, 5)) == 1
    assert trace_space_dimension(AlgebraParams(P2, q), q**-2, (-6, 6)) == 2
    with pytest.raises(ConfigurationError):
        trace_space_dimension(AlgebraParams(P2, q), 1.3, (0, 3))


def test_default_window():
    assert default_window_start(1) == 0
    assert default_window_start(2) == -1
    assert default_window_start(3) == -1
    assert default_window_start(4, positive_part=True) == 0


def test_gram_level_zero_and_blocks(rng):
    spec = _random_spec(rng, 2)
    assert gram_matrix(spec, 0).matrix == pytest.approx(np.array([[trace_of_poly(spec, LaurentPoly.constant(1))]]))
    rep = gram_matrix(spec, 6)
    basis = filtered_basis(6, 2)
    deg = [next(iter(b.components)) for b in basis]
    for i, di in enumerate(deg):
        for j, dj in enumerate(deg):
            if di + dj != 0:
                assert rep.matrix[i, j] == 0
    assert rep.matrix.shape == (len(basis), len(basis))


def test_gram_of_explicit_trace_against_weight_integrals():
    p = ExplicitWeightParams(0.4, 0.5)
    spec = explicit_trace_spec(p)
    rep = gram_matrix(spec, 4)
    basis = filtered_basis(4, 2)
    # independent oracle: contour integral of the degree-0 part against the series weight
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            A = multiply(a, b, spec.params).component(0)
            if A.is_zero():
                continue
            f = lambda x, A=A: (A(np.exp(2j * math.pi * x)) * mittag_leffler_w(p, np.exp(2j * math.pi * x))
                                * np.exp(2j * math.pi * x))
            want = 2j * math.pi * circle_integral(f)
            assert abs(rep.matrix[i, j] - want) <= 1e-9 * (1 + abs(want))
    assert abs(rep.det) > 0 and rep.verdict == "nondegenerate"


def _circle_real_P(sign=1):
    roots = [0.8 * cmath.exp(1j), 1.25 * cmath.exp(1j), 1.3 * cmath.exp(-2j), cmath.exp(-2j) / 1.3]
    return circle_real_from_roots(roots, sign)


def _spec_from_weight(wp, P, q, t):
    n = P.width
    w = default_window_start(n)
    return TraceSpec(AlgebraParams(P, q), t, moments_from_weight(wp, (w, w + n - 1)), window_start=w)


def test_hermitian_gram_level_zero():
    P = _circle_real_P()
    conj = ConjugationParams(0.0, P, 0.5)
    for t0, positive in ((2.0, True), (-1.0, False)):
        f = lambda R, t0=t0: t0 * R.coeff(0)
        rep = hermitian_gram_from(f, P, 0.5, 0.0, 0, 0)
        assert rep.matrix == pytest.approx(np.array([[t0]]))
        assert (rep.min_eigenvalue > 0) is positive
    assert conj.t == 1


def test_hermitian_gram_of_member_is_hermitian_and_positive():
    q, c = 0.5, 0.3
    P = _circle_real_P()
    conj = ConjugationParams(c, P, q)
    wp = member_weight(P, q, c, np.random.default_rng(5))
    spec = _spec_from_weight(wp, P, q, conj.t)
    for sector in (0, 1):
        for m in (1, 3, 6):
            rep = hermitian_gram(spec, conj, sector, m)
            M = rep.matrix
            assert np.abs(M - M.conj().T).max() <= 1e-10 * np.abs(M).max()
            assert rep.min_eigenvalue > 1e-8 * np.abs(np.linalg.eigvalsh(M)).max()


def test_hermitian_gram_of_split_pair_goes_negative():
    q, c = 0.5, 0.3
    P = _circle_real_P()
    conj = ConjugationParams(c, P, q)
    wp = member_weight(P, q, c, np.random.default_rng(5))
    x = wp.a[0].real
    # replace one conjugate pair by two real zeros with the same sum
    a = [complex(x - 0.2), complex(x + 0.2)] + list(wp.a[2:])
    bad = WeightParams(wp.lam, a, wp.beta, wp.tau, wp.c)
    spec = _spec_from_weight(bad, P, q, conj.t)
    worst = min(hermitian_gram(spec, conj, s, m).min_eigenvalue for s in (0, 1) for m in range(1, 7))
    assert worst < 0


def test_non_trace_input_is_flagged():
    P = _circle_real_P()
    with pytest.raises(InconsistencyError):
        hermitian_gram_from(lambda R: R.coeff(1), P, 0.5, 0.0, 0, 2)


def test_json_roundtrip(rng):
    spec = _random_spec(rng, 3)
    back = TraceSpec.from_json(spec.to_json())
    R = random_poly(rng, -4, 4)
    assert trace_of_poly(back, R) == pytest.approx(trace_of_poly(spec, R))
    with pytest.raises(ConfigurationError):
        TraceSpec.from_json({"P": spec.P.to_json()})
