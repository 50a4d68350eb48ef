"""Text serialization of difference operators.

JSON-based line format: shift vectors with theta-factor lists plus the
parameter bindings.  Multiprecision values are stored as exact mantissa
tuples, so ThetaExpr-backed operators round-trip exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from mpmath import mp, mpc, mpf

from .symbols import AffineForm, Poly, ThetaExpr


def _enc_frac(x):
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def _dec_frac(s):
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def _enc_mpf(x):
    sign, man, exp, bc = mpf(x)._mpf_
    return [int(sign), str(int(man)), int(exp), int(bc)]


def _dec_mpf(v):
    from mpmath.libmp import from_man_exp

    sign, man, exp, _ = v
    x = mpf(0)
    val = from_man_exp(int(man), int(exp))
    x = mpf(val)
    return -x if sign else x


def _enc_number(x):
    if isinstance(x, Fraction):
        return {"frac": _enc_frac(x)}
    if isinstance(x, int):
        return {"frac": _enc_frac(x)}
    z = mpc(x)
    return {"re": _enc_mpf(z.real), "im": _enc_mpf(z.imag)}


def _dec_number(d):
    if "frac" in d:
        return _dec_frac(d["frac"])
    return mpc(_dec_mpf(d["re"]), _dec_mpf(d["im"]))


def _enc_affine(form):
    return {
        "coeffs": {s: _enc_frac(c) for s, c in sorted(form.coeffs.items())},
        "const": _enc_frac(form.const),
    }


def _dec_affine(d):
    return AffineForm({s: _dec_frac(c) for s, c in d["coeffs"].items()}, _dec_frac(d["const"]))


def _enc_poly(p):
    return [[[list(se) for se in mono], _enc_frac(c)] for mono, c in sorted(p.terms.items())]


def _dec_poly(rows):
    return Poly({tuple((s, int(e)) for s, e in mono): _dec_frac(c) for mono, c in rows})


def _enc_expr(expr):
    return {
        "factors": [[_enc_affine(f), m] for f, m in expr.factors],
        "pref_const": _enc_number(expr.pref_const),
        "pref_exp": _enc_poly(expr.pref_exp),
        "arity": expr.arity,
    }


def _dec_expr(d):
    return ThetaExpr(
        tuple((_dec_affine(f), int(m)) for f, m in d["factors"]),
        _dec_number(d["pref_const"]),
        _dec_poly(d["pref_exp"]),
        int(d["arity"]),
    )


def operator_to_text(op):
    from .diffop import ExprCoefficient, SumCoefficient

    doc = {
        "format": "ccnops-operator/1",
        "n": op.n,
        "params": {k: _enc_number(v) for k, v in sorted(op.params.items())},
        "terms": [],
    }
    for k in op.support():
        c = op.coefficient(k)
        if isinstance(c, ExprCoefficient):
            parts = [c]
        elif isinstance(c, SumCoefficient):
            parts = c.parts
        else:
            raise ValueError("only ThetaExpr-backed coefficients serialize")
        doc["terms"].append(
            {
                "shift": [_enc_frac(x) for x in k],
                "parts": [
                    {"scale": _enc_number(p.scale), "expr": _enc_expr(p.expr)} for p in parts
                ],
            }
        )
    return json.dumps(doc, indent=1, sort_keys=True)


def operator_from_text(text):
    from .diffop import DifferenceOperator, ExprCoefficient, SumCoefficient

    doc = json.loads(text)
    if doc.get("format") != "ccnops-operator/1":
        raise ValueError("unrecognized operator format")
    params = {k: _dec_number(v) for k, v in doc["params"].items()}
    coeffs = {}
    for term in doc["terms"]:
        k = tuple(_dec_frac(s) for s in term["shift"])
        parts = [
            ExprCoefficient(_dec_expr(p["expr"]), params, _dec_number(p["scale"]))
            for p in term["parts"]
        ]
        coeffs[k] = parts[0] if len(parts) == 1 else SumCoefficient(parts)
    return DifferenceOperator(int(doc["n"]), coeffs, params)
