"""Command-line front end: one subcommand per evaluator, JSON in and out.

Exit status is 0 on success, 2 for invalid input and 3 for numeric
failure; on failure an object ``{"kind": ..., "detail": ...}`` is printed.
Complex numbers are written as ``[re, im]`` and floats with 17 significant
digits, keys sorted, so identical requests give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import nondegeneracy, positivity, sl2, special, trace_alg, trace_analytic
from .errors import ConfigurationError, QWeylError
from .laurent import LaurentPoly
from .qweyl import AlgebraElement, AlgebraParams, ConjugationParams, from_word


def _tolerance():
    raw = os.environ.get("QWEYL_TOL")
    if raw is None:
        return None
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigurationError(f"QWEYL_TOL={raw!r} is not a number") from None
    if not 0 < tol < 1:
        raise ConfigurationError("QWEYL_TOL must lie in (0, 1)")
    return tol


# -- serialization ----------------------------------------------------------

def _encode(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_Float(obj.real), _Float(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_encode(v) for v in obj.tolist()]
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Float(float):
    pass


def _render(obj):
    if isinstance(obj, _Float):
        if math.isnan(obj) or math.isinf(obj):
            return json.dumps(str(float(obj)))
        text = "%.17g" % obj
        if "." not in text and "e" not in text and "n" not in text:
            text += ".0"
        return text
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(k)}: {_render(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    return json.dumps(obj)


def dumps(obj):
    """Deterministic JSON text."""
    return _render(_encode(obj))


# -- payload helpers --------------------------------------------------------

def _cx(v, name="value"):
    try:
        if isinstance(v, (list, tuple)):
            re, im = v
            return complex(float(re), float(im))
        return complex(float(v))
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number or [re, im]") from None


def _need(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise ConfigurationError(f"missing field {key!r}")
    return obj[key]


def _poly(v):
    if isinstance(v, dict):
        return LaurentPoly.from_json(v)
    if isinstance(v, list):
        # dense coefficients starting at exponent 0
        return LaurentPoly.from_dense([_cx(c) for c in v])
    raise ConfigurationError("polynomial must be {'coeffs': [[k, re, im], ...]} or a list")


def _element(v, params):
    if isinstance(v, str):
        return from_word(v, params)
    return AlgebraElement.from_json(v)


# -- subcommands ------------------------------------------------------------

def cmd_theta_eval(payload):
    tol = _tolerance() or special.DEFAULT_TOL
    p = special.ThetaParams(_cx(_need(payload, "tau"), "tau"), min(tol, 1e-6))
    z = _cx(_need(payload, "z"), "z")
    out = {"value": special.theta(z, p)}
    if payload.get("product"):
        out["product"] = special.theta_triple_product(z, p)
    return out


def cmd_trace_eval(payload):
    spec = trace_alg.TraceSpec.from_json(_need(payload, "spec"))
    a = _element(_need(payload, "element"), spec.params)
    return {"value": trace_alg.trace_eval(spec, a)}


def cmd_analytic_trace(payload):
    tol = _tolerance() or trace_analytic.DEFAULT_TOL
    R = _poly(_need(payload, "R"))
    if "general" in payload:
        spec = trace_analytic.GeneralTraceSpec.from_json(payload["general"])
        return {"value": trace_analytic.general_trace_eval(spec, R, tol), "converged": True}
    wp = special.WeightParams.from_json(_need(payload, "weight"))
    value, nodes = trace_analytic.analytic_trace(wp, R, tol, full_output=True)
    return {"value": value, "nodes_used": nodes, "converged": True}


def cmd_cone_check(payload, emit_samples=None):
    P = _poly(_need(payload, "P"))
    if "general" in payload:
        spec = trace_analytic.GeneralTraceSpec.from_json(payload["general"])
        report = positivity.general_cone_check(spec, P, _cx(_need(payload, "q"), "q"))
        wp = spec.weight
    else:
        wp = special.WeightParams.from_json(_need(payload, "weight"))
        report = positivity.cone_membership_annulus(wp, P)
    if emit_samples:
        q = np.exp(1j * np.pi * wp.tau)
        x, w, shifted = positivity.sign_samples(lambda x: special.weight_w(x, wp), P, q, wp.c)
        with open(emit_samples, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["x", "w_re", "w_im", "shifted_re", "shifted_im"])
            for row in zip(x, w, shifted):
                out.writerow(["%.17g" % row[0], "%.17g" % row[1].real, "%.17g" % row[1].imag,
                              "%.17g" % row[2].real, "%.17g" % row[2].imag])
    return report


def cmd_positivity_cert(payload):
    spec = trace_alg.TraceSpec.from_json(_need(payload, "spec"))
    conj = ConjugationParams(float(_need(payload, "c")), spec.P, spec.q)
    m_max = int(payload.get("m_max", 6))
    weight = None
    if "weight" in payload:
        wp = special.WeightParams.from_json(payload["weight"])
        weight = lambda x: special.weight_w(x, wp)
    tol = _tolerance() or positivity.EIG_RTOL
    return positivity.positivity_certificate(spec, conj, m_max, weight=weight, tol=tol)


def cmd_nondeg_scan(args):
    q = _cx(json.loads(args.q), "q")
    t = _cx(json.loads(args.t), "t")
    P = _poly(json.loads(args.P))
    moments = [_cx(m, "moment") for m in json.loads(args.moments)]
    kw = {}
    if args.window is not None:
        kw["window_start"] = args.window
    if args.positive_part:
        kw["positive_part"] = True
    spec = trace_alg.TraceSpec(AlgebraParams(P, q), t, moments, **kw)
    return nondegeneracy.nondeg_scan(spec, k_max=args.kmax)


def cmd_root_shift(payload):
    return trace_analytic.root_shift(_poly(_need(payload, "P")), _cx(_need(payload, "q"), "q"))


def cmd_sl2(args):
    params = sl2.Sl2Params(args.q, args.c)
    out = {
        "P": params.P,
        "roots": list(params.roots),
        "classification": sl2.classify_roots(params.q, params.c),
        "intervals": {
            "unitarizability": list(sl2.unitarizability_interval(params.q)),
            "circle_roots": list(sl2.circle_root_interval(params.q)),
        },
        "regime": params.regime(),
    }
    lo, hi = sl2.unitarizability_interval(params.q)
    out["cone"] = sl2.sl2_cone(params) if lo < params.c < hi else None
    return out


# -- entry point ------------------------------------------------------------

def _read_payload(path):
    if path is None:
        return {}
    text = sys.stdin.read() if path == "-" else open(path).read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"input is not valid JSON: {exc}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="qweyl-traces",
                                     description="Twisted traces on generalized q-Weyl algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    def io(p, needs_input=True):
        p.add_argument("--input", default="-" if needs_input else None,
                       help="JSON request file, or - for stdin")
        p.add_argument("--output", default="-", help="result file, or - for stdout")
        return p

    io(sub.add_parser("theta-eval", help="Jacobi theta value"))
    io(sub.add_parser("trace-eval", help="moment-defined trace of an algebra element"))
    io(sub.add_parser("analytic-trace", help="weight-integral trace of a Laurent polynomial"))
    cc = io(sub.add_parser("cone-check", help="cone membership of a theta-quotient weight"))
    cc.add_argument("--emit-samples", metavar="CSV",
                    help="write sampled w(x) and shifted-line values to CSV")
    io(sub.add_parser("positivity-cert", help="Hermitian Gram certificate"))
    nd = io(sub.add_parser("nondeg-scan", help="Gram determinants over filtration levels"), False)
    nd.add_argument("--q", required=True, help="JSON number or [re, im]")
    nd.add_argument("--t", required=True, help="JSON number or [re, im]")
    nd.add_argument("--P", required=True, help="JSON polynomial")
    nd.add_argument("--moments", required=True, help="JSON list of moments")
    nd.add_argument("--kmax", type=int, default=8)
    nd.add_argument("--window", type=int, default=None)
    nd.add_argument("--positive-part", action="store_true")
    io(sub.add_parser("root-shift", help="move roots of P into the closed annulus"))
    s2 = io(sub.add_parser("sl2", help="Casimir reduction of U_q(sl2)"), False)
    s2.add_argument("--q", type=float, required=True)
    s2.add_argument("--c", type=float, required=True)
    return parser


def run(argv=None, stdout=None):
    """Run one request; returns the exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cmd = args.command
        if cmd == "nondeg-scan":
            result = cmd_nondeg_scan(args)
        elif cmd == "sl2":
            result = cmd_sl2(args)
        else:
            payload = _read_payload(args.input)
            if cmd == "cone-check":
                result = cmd_cone_check(payload, args.emit_samples)
            else:
                handler = {
                    "theta-eval": cmd_theta_eval,
                    "trace-eval": cmd_trace_eval,
                    "analytic-trace": cmd_analytic_trace,
                    "positivity-cert": cmd_positivity_cert,
                    "root-shift": cmd_root_shift,
                }[cmd]
                result = handler(payload)
        text, status = dumps(result), 0
    except QWeylError as exc:
        text, status = dumps({"kind": exc.kind, "detail": str(exc)}), exc.exit_code
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        text, status = dumps({"kind": "validation", "detail": str(exc)}), 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        text, status = dumps({"kind": "numeric", "detail": str(exc)}), 3
    if getattr(args, "output", "-") in (None, "-"):
        stdout.write(text + "\n")
    else:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
