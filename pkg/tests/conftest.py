import cmath
import math

import numpy as np
import pytest

from qweyl_traces.laurent import LaurentPoly


def random_poly(rng, lo, hi, scale=1.0):
    return LaurentPoly({k: complex(*rng.normal(size=2)) * scale for k in range(lo, hi + 1)})


def random_annulus_roots(rng, q, count):
    """Roots with |q| < |r| < 1/|q|, away from the boundary."""
    aq = abs(q)
    rad = np.exp(rng.uniform(0.7 * math.log(aq), -0.7 * math.log(aq), count))
    ang = rng.uniform(0, 2 * math.pi, count)
    return [complex(r * cmath.exp(1j * a)) for r, a in zip(rad, ang)]


def rewrite_word(word, P, q):
    """Normal form of a word in u, v, Z, z (= 1/Z) by string rewriting.

    Returns ``{(i, k): coeff}`` for u^i Z^k (i >= 0) and v^(-i) Z^k (i < 0).
    Independent of the component-wise product in the library.
    """
    rules_swap = {"Zu": (q**2, "uZ"), "zu": (q**-2, "uz"),
                  "Zv": (q**-2, "vZ"), "zv": (q**2, "vz")}
    pending = [(1 + 0j, word)]
    out = {}
    while pending:
        c, w = pending.pop()
        for pair in ("Zz", "zZ"):
            if pair in w:
                j = w.index(pair)
                pending.append((c, w[:j] + w[j + 2:]))
                break
        else:
            for pat, (f, rep) in rules_swap.items():
                if pat in w:
                    j = w.index(pat)
                    pending.append((c * f, w[:j] + rep + w[j + 2:]))
                    break
            else:
                for pat, s in (("uv", 1 / q), ("vu", q)):
                    if pat in w:
                        j = w.index(pat)
                        for e, pc in P.coeffs.items():
                            zs = "Z" * e if e >= 0 else "z" * (-e)
                            pending.append((c * pc * s**e, w[:j] + zs + w[j + 2:]))
                        break
                else:
                    i = w.count("u") - w.count("v")
                    k = w.count("Z") - w.count("z")
                    out[(i, k)] = out.get((i, k), 0) + c
    return out


def element_to_dict(a):
    return {(i, k): c for i, p in a.components.items() for k, c in p.coeffs.items()}


def dict_close(d1, d2, rtol=1e-9):
    keys = set(d1) | set(d2)
    scale = max([abs(v) for v in d1.values()] + [abs(v) for v in d2.values()] + [1e-300])
    return all(abs(d1.get(k, 0) - d2.get(k, 0)) <= rtol * scale for k in keys)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
