"""Membership conditions for the spherical families and the section solver.

Residue conditions relate coefficients at shift vectors linked by an affine
reflection; each is checked by residue cancellation at sample points taken on
several components of the divisor (offsets 0, 1 and tau), with the displayed
theta correction bracket evaluated honestly at the sample point and at two
independent u-probes.  Holomorphy along a divisor is therefore never a limit
extraction: coefficients carry explicit denominator factor lists.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpc, mpf

from .curve import CurveContext, PoleProximityError
from .diffop import DegreeVector, DifferenceOperator, ExprCoefficient, SumCoefficient
from .symbols import AffineForm, PolarizationRecord, ThetaExpr, zvar
from .weyl import (
    bruhat_interval,
    inversion_set,
    numeric_rank,
    signed_permutations,
    sp_apply,
    sp_inverse,
    weight_orbit,
)


# ---------------------------------------------------------------------------
# condition specifications


@dataclass(frozen=True)
class ConditionSpec:
    kind: str  # "residue-pair" | "x-vanish" | "t-vanish" | "polarization"
    family: str = "even"  # "even" -> eta' bracket, "odd" -> x_0 bracket with sign
    beta: tuple = ()  # ("sum", i, j) | ("diff", i, j) | ("double", i)
    level: int = 0
    k: tuple = ()
    k2: tuple = ()
    exponent: int = 0
    divisor_var: int = 0  # x-vanish / t-vanish: which z_i
    divisor_point: object = None  # x-vanish: affine form for the point


@dataclass
class ConditionRecord:
    spec_id: str
    defect: object
    passed: bool
    detail: str = ""


@dataclass
class ConditionReport:
    records: list = field(default_factory=list)
    tolerance: object = mpf("1e-25")
    seed: int = 0
    prec: int = 256

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    @property
    def max_defect(self):
        return max((mpf(abs(r.defect)) for r in self.records), default=mpf(0))

    def add(self, spec_id, defect, detail=""):
        self.records.append(
            ConditionRecord(spec_id, defect, bool(abs(defect) < self.tolerance), detail)
        )

    def to_json(self):
        import json

        return json.dumps(
            {
                "pass": self.passed,
                "tolerance": float(self.tolerance),
                "seed": self.seed,
                "prec": self.prec,
                "records": [
                    {
                        "id": r.spec_id,
                        "defect": float(abs(r.defect)),
                        "pass": r.passed,
                        "detail": r.detail,
                    }
                    for r in self.records
                ],
            },
            indent=1,
        )


def _beta_form(beta, n):
    kind = beta[0]
    v = [Fraction(0)] * n
    if kind == "sum":
        v[beta[1]] += 1
        v[beta[2]] += 1
    elif kind == "diff":
        v[beta[1]] += 1
        v[beta[2]] -= 1
    else:  # double
        v[beta[1]] += 2
    return tuple(v)


def reflect_shift(beta, m, k):
    """Image of the shift vector k under the affine reflection for beta + m q."""
    k = list(k)
    if beta[0] == "sum":
        i, j = beta[1], beta[2]
        k[i], k[j] = m - k[j], m - k[i]
    elif beta[0] == "diff":
        i, j = beta[1], beta[2]
        k[i], k[j] = k[j] + m, k[i] - m
    else:
        i = beta[1]
        k[i] = m - k[i]
    return tuple(k)


def pair_exponent(beta, m, k):
    if beta[0] == "sum":
        return int(2 * (m - k[beta[1]] - k[beta[2]]))
    if beta[0] == "diff":
        return int(2 * (m - k[beta[1]] + k[beta[2]]))
    return int(m - 2 * k[beta[1]])


def enumerate_conditions(degree, lam, params, n, family="even", lattice="coroot"):
    """Complete condition list for the Hom space of the given degree.

    degree: (DegreeVector, DegreeVector); lam: leading dominant weight.  The
    support is the orbit union over the Bruhat interval of lam; residue pairs
    are enumerated between support shifts, x-vanishing from the blowup data
    of the degree, and t-vanishing from inversion sets.
    """
    d1, d2 = degree
    interval = bruhat_interval(lam, lattice=lattice)
    support = set()
    for mu in interval:
        support |= weight_orbit(mu)
    specs = []
    # residue pairs
    betas = []
    for i in range(n):
        betas.append(("double", i))
        for j in range(i + 1, n):
            betas.append(("sum", i, j))
            betas.append(("diff", i, j))
    seen = set()
    top = max((sum(abs(x) for x in k) for k in support), default=0)
    for k in sorted(support):
        for beta in betas:
            for m in range(-2 * int(top) - 2, 2 * int(top) + 3):
                k2 = reflect_shift(beta, m, k)
                if k2 == k or k2 not in support:
                    continue
                key = (beta, m, tuple(sorted((k, k2))))
                if key in seen:
                    continue
                seen.add(key)
                specs.append(
                    ConditionSpec(
                        "residue-pair",
                        family,
                        beta,
                        m,
                        k,
                        k2,
                        pair_exponent(beta, m, k),
                    )
                )
    # x-vanishing from the blowup data
    r1 = d1.e or ()
    r2 = d2.e or ()
    nx = max(len(r1), len(r2))
    r1 = tuple(r1) + (0,) * (nx - len(r1))
    r2 = tuple(r2) + (0,) * (nx - len(r2))
    qf = AffineForm.var("q")
    for k in sorted(support):
        for i in range(n):
            for jx in range(nx):
                lo = k[i] + Fraction(d2.s - d1.s, 2) + r1[jx]
                for l in range(int(mp.ceil(float(lo))) if lo > int(lo) else int(lo), r2[jx]):
                    point = AffineForm.var("x%d" % (jx + 1)) - qf * Fraction(2 * l - d2.s + 1, 2)
                    specs.append(
                        ConditionSpec(
                            "x-vanish", family, (), l, k, (), 0, i, point
                        )
                    )
                lo = -k[i] + Fraction(d2.s - d1.s, 2) + r1[jx]
                for l in range(int(mp.ceil(float(lo))) if lo > int(lo) else int(lo), r2[jx]):
                    point = AffineForm.var("x%d" % (jx + 1)) * -1 + qf * Fraction(2 * l - d2.s + 1, 2)
                    specs.append(
                        ConditionSpec(
                            "x-vanish", family, (), l, k, (), 0, i, point
                        )
                    )
    # t-vanishing at the corner of each interval weight
    for mu in interval:
        corner = tuple(-x for x in mu)
        for root in inversion_set(mu, filter="D"):
            beta = (root.kind, root.i, root.j)
            specs.append(ConditionSpec("t-vanish", family, beta, root.level, corner, (), 0))
    return specs


# ---------------------------------------------------------------------------
# residue extraction


def _residue_of_parts(ctx, parts, zstar, svar_index, beta_coeffs, tol=mpf("1e-9")):
    """Residue of sum(scale * expr) along the divisor through zstar.

    The local coordinate is s = beta(z) + m q - lambda, traversed by varying
    z_{svar_index}; each part contributes through its unique vanishing
    denominator factor, scaled by the exact lattice derivative of theta.
    """
    total = mpc(0)
    bslope = beta_coeffs[svar_index]
    for scale, expr, params in parts:
        bind = dict(params)
        for i, w in enumerate(zstar):
            bind["z%d" % (i + 1)] = w
        vanishing = None
        for idx, (form, mexp) in enumerate(expr.factors):
            if mexp >= 0:
                continue
            val = form.eval(bind)
            z0, a, b = ctx.lattice_reduce(val)
            if abs(z0) < tol:
                if vanishing is not None:
                    raise PoleProximityError("two denominator factors vanish at the sample")
                if mexp != -1:
                    raise PoleProximityError("higher-order pole along the divisor")
                vanishing = (idx, form, a, b)
        if vanishing is None:
            continue
        idx, form, a, b = vanishing
        rest = expr.eval(ctx, bind, skip=idx)
        slope = form.coeff("z%d" % (svar_index + 1)) / bslope
        deriv = ctx.theta_deriv_at_lattice(a, b) * mpc(slope.numerator) / slope.denominator
        total += mpc(scale) * rest / deriv
    return total


def _parallel(form, beta_coeffs, n):
    """Whether the z-part of `form` is proportional to the divisor's."""
    zc = [form.coeff("z%d" % (i + 1)) for i in range(n)]
    if all(not c for c in zc):
        return False
    ratio = None
    for a, b in zip(zc, beta_coeffs):
        if not a and not b:
            continue
        if (not a) != (not b):
            return False
        r = a / b
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def _divisor_sample(ctx, rng, n, beta, m, q, component, avoid=(), tries=64):
    """A random point on the lambda-component of {beta(z) + m q = 0}.

    Denominator forms parallel to the divisor are excluded from the
    rejection test (their vanishing is the pole under examination).
    """
    lam_offsets = {"0": mpc(0), "1": mpc(1), "tau": ctx.tau, "1+tau": 1 + ctx.tau}
    lam = lam_offsets[component]
    beta_coeffs = _beta_form(beta, n)
    effective = [
        (form, bind0) for form, bind0 in avoid if not _parallel(form, beta_coeffs, n)
    ]
    for _ in range(tries):
        z = [mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.35, 0.35)) for _ in range(n)]
        if beta[0] == "sum":
            i, j = beta[1], beta[2]
            z[i] = lam - m * q - z[j]
        elif beta[0] == "diff":
            i, j = beta[1], beta[2]
            z[i] = lam - m * q + z[j]
        else:
            i = beta[1]
            z[i] = (lam - m * q) / 2
        z = tuple(z)
        ok = True
        for form, bind0 in effective:
            bind = dict(bind0)
            for ii, w in enumerate(z):
                bind["z%d" % (ii + 1)] = w
            if ctx.dist_to_lattice(form.eval(bind)) < mpf("5e-3"):
                ok = False
                break
        if ok:
            return z
    raise PoleProximityError("could not sample the divisor away from other poles")


def _bracket(ctx, spec, zstar, u, X, q, n):
    """The displayed correction factor at a point of the divisor."""
    beta_coeffs = _beta_form(spec.beta, n)
    sval = sum(
        mpc(beta_coeffs[i].numerator) / beta_coeffs[i].denominator * zstar[i] for i in range(n)
    ) + spec.level * q
    val = ctx.theta(u) * ctx.theta(X + u + sval) / (ctx.theta(u + sval) * ctx.theta(X + u))
    if spec.family == "odd" and spec.beta[0] == "double":
        val *= ctx.frak_q(zstar[spec.beta[1]] + spec.level * q / 2)
    return val


def _collect_avoid(op, keys):
    avoid = []
    for k in keys:
        c = op.coefficient(k)
        if c is None:
            continue
        parts = c.residue_parts()
        if parts is None:
            continue
        for _, expr, params in parts:
            for form in expr.denominator_forms():
                avoid.append((form, params))
    return avoid


def check_residue(ctx, op, specs, env, samples=2, seed=11, tol=mpf("1e-25"), components=("0", "1", "tau")):
    """Residue-pair conditions for an operator; returns a ConditionReport.

    env: dict with at least q, t and eta' (or x0 for the odd family).
    """
    rng = random.Random(seed)
    n = op.n
    q = mpc(env["q"])
    t = mpc(env.get("t", 0))
    x = mpc(env.get("eta_prime", env.get("x0", 0)))
    X = q + (n - 1) * t + x
    report = ConditionReport(tolerance=tol, seed=seed, prec=ctx.prec)
    for spec in specs:
        if spec.kind != "residue-pair":
            continue
        ca = op.coefficient(spec.k)
        cb = op.coefficient(spec.k2)
        parts_a = ca.residue_parts() if ca is not None else []
        parts_b = cb.residue_parts() if cb is not None else []
        if parts_a is None or parts_b is None:
            raise ValueError("residue checks need structured coefficients")
        beta_coeffs = _beta_form(spec.beta, n)
        svar = next(i for i in range(n) if beta_coeffs[i])
        avoid = _collect_avoid(op, [spec.k, spec.k2])
        for comp in components:
            for snum in range(samples):
                zstar = _divisor_sample(ctx, rng, n, spec.beta, spec.level, q, comp, avoid)
                res_a = _residue_of_parts(ctx, parts_a, zstar, svar, beta_coeffs)
                res_b = _residue_of_parts(ctx, parts_b, zstar, svar, beta_coeffs)
                u1 = mpc(rng.uniform(0.1, 0.5), rng.uniform(0.05, 0.4))
                u2 = mpc(rng.uniform(-0.5, -0.1), rng.uniform(0.05, 0.4))
                b1 = _bracket(ctx, spec, zstar, u1, X, q, n) ** spec.exponent
                b2 = _bracket(ctx, spec, zstar, u2, X, q, n) ** spec.exponent
                probe_defect = abs(b1 - b2) / max(abs(b1), abs(b2), mpf("1e-30"))
                combo = res_b + b1 * res_a
                scale = abs(res_b) + abs(b1 * res_a) + mpf("1e-30")
                report.add(
                    "residue[%s;m=%d;%s<->%s;comp=%s;#%d]"
                    % (spec.beta, spec.level, spec.k, spec.k2, comp, snum),
                    abs(combo) / scale,
                )
                report.add(
                    "residue-probe[%s;m=%d;comp=%s;#%d]" % (spec.beta, spec.level, comp, snum),
                    probe_defect,
                )
    return report


def check_vanishing(ctx, op, specs, env, samples=2, seed=13, tol=mpf("1e-25")):
    """x-vanishing and t-vanishing conditions (zeros of coefficients on divisors)."""
    rng = random.Random(seed)
    n = op.n
    q = mpc(env["q"])
    t = mpc(env.get("t", 0))
    report = ConditionReport(tolerance=tol, seed=seed, prec=ctx.prec)
    for spec in specs:
        if spec.kind not in ("x-vanish", "t-vanish"):
            continue
        c = op.coefficient(spec.k)
        if c is None:
            continue
        for snum in range(samples):
            z = [mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3)) for _ in range(n)]
            if spec.kind == "x-vanish":
                bind = dict(env)
                pt = spec.divisor_point.eval(bind)
                z[spec.divisor_var] = pt
                label = "x-vanish[k=%s;i=%d;l=%d;#%d]" % (
                    spec.k,
                    spec.divisor_var,
                    spec.level,
                    snum,
                )
            else:
                kind, i, j = spec.beta
                if kind == "sum":
                    z[i] = t + spec.level * q - z[j]
                elif kind == "diff":
                    z[i] = t + spec.level * q + z[j]
                else:
                    z[i] = (t + spec.level * q) / 2
                label = "t-vanish[k=%s;%s;m=%d;#%d]" % (spec.k, spec.beta, spec.level, snum)
            zref = tuple(
                w + mpc(rng.uniform(0.05, 0.15), rng.uniform(0.02, 0.1)) for w in z
            )
            val = c.eval(ctx, tuple(z))
            ref = abs(c.eval(ctx, zref)) + mpf("1e-30")
            report.add(label, abs(val) / ref)
    return report


def check_polarization(ctx, fn, expected, samples=2, seed=17, tol=mpf("1e-25"), params=None):
    """Measured tau-translation multipliers against the predicted (Q, w) form.

    fn: callable z -> value (or a Coefficient); expected: PolarizationRecord.
    The z-independent constant of each multiplier is free (it absorbs the
    bundle's C-constants); the z-dependent part must match e(-(Q z)_i - ...).
    """
    if hasattr(fn, "eval"):
        coeff = fn

        def fn(ctx2, z):
            return coeff.eval(ctx2, z)

    rng = random.Random(seed)
    n = len(expected.Q)
    report = ConditionReport(tolerance=tol, seed=seed, prec=ctx.prec)
    tau = ctx.tau
    for i in range(n):
        pairs = []
        for _ in range(samples + 1):
            z = tuple(mpc(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)) for _ in range(n))
            zshift = tuple(z[j] + (tau if j == i else 0) for j in range(n))
            mplier = fn(ctx, zshift) / fn(ctx, z)
            pairs.append((z, mplier))
        z0, m0 = pairs[0]
        for s, (z1, m1) in enumerate(pairs[1:]):
            dz = [z1[j] - z0[j] for j in range(n)]
            pred = ctx.e(-sum(
                mpc(expected.Q[i][j].numerator) / expected.Q[i][j].denominator * dz[j]
                for j in range(n)
            ))
            got = m1 / m0
            report.add(
                "polarization[i=%d;#%d]" % (i, s),
                abs(got - pred) / max(abs(pred), mpf("1e-30")),
            )
    return report


# ---------------------------------------------------------------------------
# theta bases for the section solver


def _univariate_basis(params, zsym, count, zero_sum, rng):
    """ThetaExpr products prod_r theta(a_r - z) with sum(a_r) = zero_sum."""
    out = []
    for b in range(count):
        syms = []
        for r in range(count - 1):
            s = "a%s_%d_%d" % (zsym, b, r)
            params[s] = mpc(rng.uniform(-0.45, 0.45), rng.uniform(-0.3, 0.3))
            syms.append(s)
        last = "a%s_%d_last" % (zsym, b)
        params[last] = mpc(zero_sum) - sum(params[s] for s in syms)
        forms = [AffineForm.var(s) - AffineForm.var(zsym) for s in syms]
        forms.append(AffineForm.var(last) - AffineForm.var(zsym))
        out.append(ThetaExpr(tuple((f, 1) for f in forms), 1, None, 1))
    return out


def _even_univariate_basis(params, zsym, degree, rng, tag):
    """Even products prod_r theta(a_r + z) theta(a_r - z); degree = #pairs*2.

    Spans the even part of the degree-`degree` space (dimension degree/2+1).
    """
    npairs = degree // 2
    dim = npairs + 1
    out = []
    for b in range(dim):
        forms = []
        for r in range(npairs):
            s = "e%s_%s_%d_%d" % (tag, zsym, b, r)
            params[s] = mpc(rng.uniform(-0.45, 0.45), rng.uniform(-0.3, 0.3))
            a = AffineForm.var(s)
            forms.append((a + AffineForm.var(zsym), 1))
            forms.append((a - AffineForm.var(zsym), 1))
        out.append(ThetaExpr(tuple(forms), 1, None, 1))
    return out


def validate_basis_rank(ctx, exprs, params, zsym, seed=23, gap=mpf("1e6")):
    """Numeric rank of a univariate expression family (sanity for the solver)."""
    rng = random.Random(seed)
    pts = [mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3)) for _ in range(len(exprs) + 3)]
    rows = []
    for e in exprs:
        row = []
        for p in pts:
            bind = dict(params)
            bind[zsym] = p
            row.append(e.eval(ctx, bind))
        rows.append(row)
    return numeric_rank(rows, gap=gap, prec=ctx.prec)


# ---------------------------------------------------------------------------
# section models


def _substitute_expr_z(expr, mapping):
    return expr.substitute(mapping)


def _orbit_operator(n, mu, corner_expr, params, scale=1):
    """Spread a corner ThetaExpr (at shift -mu) over the whole orbit by invariance."""
    corner = tuple(-x for x in mu)
    coeffs = {}
    seen = set()
    for w in signed_permutations(n):
        k = sp_apply(w, corner)
        if k in seen:
            continue
        seen.add(k)
        winv = sp_inverse(w)
        iperm, isigns = winv
        mapping = {
            "z%d" % (i + 1): AffineForm({"z%d" % (iperm[i] + 1): isigns[i]}) for i in range(n)
        }
        coeffs[k] = ExprCoefficient(corner_expr.substitute(mapping), params, scale)
    return coeffs


class SectionModel:
    """Ansatz for one Hom-space solve: per-weight corner bases plus conditions."""

    def __init__(self, ctx, n, params, env, degree, lam, family="even"):
        self.ctx = ctx
        self.n = n
        self.params = params
        self.env = env
        self.degree = degree
        self.lam = lam
        self.family = family
        self.basis_ops = []  # list of (mu, DifferenceOperator)
        self.labels = []

    def add_weight_basis(self, mu, corner_exprs):
        for b, expr in enumerate(corner_exprs):
            coeffs = _orbit_operator(self.n, mu, expr, self.params)
            op = DifferenceOperator(self.n, coeffs, self.params, self.degree)
            self.basis_ops.append((tuple(mu), op))
            self.labels.append((tuple(mu), b))

    def condition_rows(self, specs, samples=2, seed=29, components=("0", "1", "tau")):
        """Linear condition matrix over the ansatz basis."""
        rng = random.Random(seed)
        ctx, n = self.ctx, self.n
        q = mpc(self.env["q"])
        t = mpc(self.env.get("t", 0))
        x = mpc(self.env.get("eta_prime", self.env.get("x0", 0)))
        X = q + (n - 1) * t + x
        rows = []
        avoid = []
        for _, op in self.basis_ops:
            avoid.extend(_collect_avoid(op, op.support()))
        for spec in specs:
            if spec.kind == "residue-pair":
                beta_coeffs = _beta_form(spec.beta, n)
                svar = next(i for i in range(n) if beta_coeffs[i])
                for comp in components:
                    for _ in range(samples):
                        zstar = _divisor_sample(ctx, rng, n, spec.beta, spec.level, q, comp, avoid)
                        u1 = mpc(rng.uniform(0.1, 0.5), rng.uniform(0.05, 0.4))
                        b1 = _bracket(ctx, spec, zstar, u1, X, q, n) ** spec.exponent
                        row = []
                        scale = mpf(0)
                        for _, op in self.basis_ops:
                            ca = op.coefficient(spec.k)
                            cb = op.coefficient(spec.k2)
                            ra = (
                                _residue_of_parts(ctx, ca.residue_parts(), zstar, svar, beta_coeffs)
                                if ca is not None
                                else mpc(0)
                            )
                            rb = (
                                _residue_of_parts(ctx, cb.residue_parts(), zstar, svar, beta_coeffs)
                                if cb is not None
                                else mpc(0)
                            )
                            row.append(rb + b1 * ra)
                            scale = max(scale, abs(rb) + abs(b1 * ra))
                        if scale > mpf("1e-60"):
                            rows.append([v / scale for v in row])
            elif spec.kind in ("x-vanish", "t-vanish"):
                for _ in range(samples):
                    z = [mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3)) for _ in range(n)]
                    zref = None
                    if spec.kind == "x-vanish":
                        bind = dict(self.env)
                        z[spec.divisor_var] = spec.divisor_point.eval(bind)
                    else:
                        kind, i, j = spec.beta
                        if kind == "sum":
                            z[i] = t + spec.level * q - z[j]
                        elif kind == "diff":
                            z[i] = t + spec.level * q + z[j]
                        else:
                            z[i] = (t + spec.level * q) / 2
                    z = tuple(z)
                    zref = tuple(
                        w + mpc(rng.uniform(0.05, 0.15), rng.uniform(0.02, 0.1)) for w in z
                    )
                    row = []
                    scale = mpf(0)
                    for _, op in self.basis_ops:
                        c = op.coefficient(spec.k)
                        row.append(c.eval(ctx, z) if c is not None else mpc(0))
                        scale = max(scale, abs(c.eval(ctx, zref)) if c is not None else mpf(0))
                    if scale > mpf("1e-60"):
                        rows.append([v / scale for v in row])
        return rows

    def nullspace(self, specs, samples=2, seed=29, gap=mpf("1e6")):
        rows = self.condition_rows(
            specs, samples=samples, seed=seed, components=("0", "1", "tau", "1+tau")
        )
        return nullspace_basis(rows, len(self.basis_ops), gap=gap, prec=self.ctx.prec)

    def operator_from_vector(self, vec):
        total = {}
        for x, (_, op) in zip(vec, self.basis_ops):
            if abs(x) < mpf("1e-40"):
                continue
            for k, c in op.coeffs.items():
                for s0, expr, prms in c.residue_parts():
                    total.setdefault(k, []).append(
                        ExprCoefficient(expr, prms, mpc(x) * _as_mpc(s0))
                    )
        coeffs = {
            k: (parts[0] if len(parts) == 1 else SumCoefficient(parts))
            for k, parts in total.items()
        }
        return DifferenceOperator(self.n, coeffs, self.params, self.degree)


def _as_mpc(x):
    if isinstance(x, Fraction):
        return mpc(x.numerator) / x.denominator
    return mpc(x)


def nullspace_basis(rows, ncols, gap=mpf("1e6"), prec=256):
    """Nullspace of a complex matrix by SVD with singular-value gap detection."""
    import mpmath

    with mp.workprec(prec + 16):
        if not rows:
            return [[mpc(1) if i == j else mpc(0) for j in range(ncols)] for i in range(ncols)]
        while len(rows) < ncols:
            rows = rows + [[mpc(0)] * ncols]
        A = mpmath.matrix(len(rows), ncols)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                A[i, j] = v
        U, S, V = mp.svd_c(A)
        svals = [abs(S[i]) for i in range(len(S))]
        smax = max(svals) if svals else mpf(1)
        # rows are normalized to O(1) ingredients, so an absolute floor is
        # meaningful alongside the relative singular-value gap
        floor = max(smax / gap, mpf(2) ** (-(prec // 2)))
        rank = sum(1 for s in svals if s > floor)
        if 0 < rank < len(svals):
            kept = min(s for s in svals if s > floor)
            cut = max((s for s in svals if s <= floor), default=mpf(0))
            if cut > 0 and kept / cut < gap:
                raise ArithmeticError("singular value gap ambiguous: %s vs %s" % (kept, cut))
        null = []
        for j in range(rank, ncols):
            vec = [mpmath.conj(V[j, i]) for i in range(ncols)]
            null.append(vec)
        return null


# ---------------------------------------------------------------------------
# concrete solvers


def first_order_model(ctx, n, dprime, eta_prime, q, t, seed=31):
    """Ansatz for degree (0, s + d'f): single orbit of (1/2,...,1/2)."""
    rng = random.Random(seed)
    params = {"q": mpc(q), "t": mpc(t)}
    K = 2 * dprime + 2
    zero_sum = mpc(q) + mpc(eta_prime)
    uni = _univariate_basis(params, "z1", K, zero_sum, rng)
    # shared pair factor and 1/theta(-2 z_i)
    tf = AffineForm.var("t")
    shared = []
    for i in range(1, n + 1):
        shared.append((zvar(i) * -2, -1))
        for j in range(i + 1, n + 1):
            arg = zvar(i) * -1 - zvar(j)
            shared.append((tf + arg, 1))
            shared.append((arg, -1))
    shared_expr = ThetaExpr(tuple(shared), 1, None, n)
    lam = tuple(Fraction(1, 2) for _ in range(n))
    env = {"q": mpc(q), "t": mpc(t), "eta_prime": mpc(eta_prime)}
    degree = (DegreeVector(), DegreeVector(0, 1, dprime))
    model = SectionModel(ctx, n, params, env, degree, lam)
    exprs = []
    if n == 1:
        exprs = [shared_expr * b for b in uni]
    elif n == 2:
        for a in range(K):
            for b in range(a, K):
                term1 = uni[a] * _shift_var(uni[b], 2)
                if a == b:
                    exprs.append(shared_expr * term1)
                else:
                    term2 = uni[b] * _shift_var(uni[a], 2)
                    exprs.append(("sym", shared_expr, term1, term2))
    else:
        raise NotImplementedError("first-order solve implemented for n <= 2")
    _install_first_order_basis(model, exprs, params)
    return model


def _shift_var(expr, i):
    """Rename z1 -> z_i in a univariate ThetaExpr."""
    return expr.substitute({"z1": AffineForm.var("z%d" % i)})


def _install_first_order_basis(model, exprs, params):
    for b, e in enumerate(exprs):
        if isinstance(e, tuple) and e[0] == "sym":
            _, shared, t1, t2 = e
            corner_parts = [shared * t1, shared * t2]
        else:
            corner_parts = [e]
        mu = model.lam
        corner = tuple(-x for x in mu)
        coeffs = {}
        seen = set()
        for w in signed_permutations(model.n):
            k = sp_apply(w, corner)
            if k in seen:
                continue
            seen.add(k)
            winv = sp_inverse(w)
            iperm, isigns = winv
            mapping = {
                "z%d" % (i + 1): AffineForm({"z%d" % (iperm[i] + 1): isigns[i]})
                for i in range(model.n)
            }
            parts = [ExprCoefficient(p.substitute(mapping), params) for p in corner_parts]
            coeffs[k] = parts[0] if len(parts) == 1 else SumCoefficient(parts)
        op = DifferenceOperator(model.n, coeffs, params, model.degree)
        model.basis_ops.append((tuple(mu), op))
        model.labels.append((tuple(mu), b))


def section_solve_first_order(ctx, n, dprime, eta_prime, q, t, seed=31, samples=2):
    """Nullspace basis for degree (0, s+d'f); expected dimension 2d'+2."""
    model = first_order_model(ctx, n, dprime, eta_prime, q, t, seed=seed)
    specs = enumerate_conditions(model.degree, model.lam, model.params, n)
    null = model.nullspace([s for s in specs if s.kind == "residue-pair"], samples=samples, seed=seed)
    ops = [model.operator_from_vector(v) for v in null]
    return model, null, ops


# -- van Diejen model --------------------------------------------------------


def vandiejen_model(ctx, xs, q, t, n, eta_prime=None, seed=37):
    """Ansatz for degree (0, 2s+2f-e_1-...-e_8) over the coroot interval of (1^n)."""
    if n not in (1, 2):
        raise NotImplementedError("van Diejen solve implemented for n <= 2")
    rng = random.Random(seed)
    params = {"q": mpc(q), "t": mpc(t)}
    for j, xv in enumerate(xs):
        params["x%d" % (j + 1)] = mpc(xv)
    if eta_prime is None:
        eta_prime = sum(mpc(xv) for xv in xs) / 2
    env = dict(params)
    env["eta_prime"] = mpc(eta_prime)
    qf = AffineForm.var("q")
    tf = AffineForm.var("t")
    degree = (DegreeVector(), DegreeVector(0, 2, 2, (1,) * 8))
    lam = tuple([Fraction(1)] * n)
    model = SectionModel(ctx, n, params, env, degree, lam, family="even")

    def xblock(i):
        """prod_j theta(q/2 + x_j - z_i) / theta(-2 z_i, q - 2 z_i)."""
        fs = []
        for j in range(1, 9):
            fs.append((qf * Fraction(1, 2) + AffineForm.var("x%d" % j) - zvar(i), 1))
        fs.append((zvar(i) * -2, -1))
        fs.append((qf - zvar(i) * 2, -1))
        return ThetaExpr(tuple(fs), 1, None, n)

    def gblock(i):
        """1 / theta(-q-2z_i, q-2z_i)."""
        return ThetaExpr((((qf * -1) - zvar(i) * 2, -1), (qf - zvar(i) * 2, -1)), 1, None, n)

    def pair_block(i, j, qlevels=False):
        """theta(t - z_i - z_j)/theta(-z_i-z_j) [times the q-level pair if asked]."""
        arg = zvar(i) * -1 - zvar(j)
        fs = [(tf + arg, 1), (arg, -1)]
        if qlevels:
            fs.append((qf + tf + arg, 1))
            fs.append((qf + arg, -1))
        return ThetaExpr(tuple(fs), 1, None, n)

    def mixed_block(i, j):
        """theta(t - z_i +- z_j)/theta(-z_i +- z_j)."""
        fs = []
        for sz in (1, -1):
            arg = zvar(i) * -1 + zvar(j) * sz
            fs.append((tf + arg, 1))
            fs.append((arg, -1))
        return ThetaExpr(tuple(fs), 1, None, n)

    def cross_block(i, j):
        """1/[theta(z_i+z_j+q) theta(z_i+z_j-q) theta(z_i-z_j+q) theta(z_i-z_j-q)]."""
        fs = []
        for sz in (1, -1):
            arg = zvar(i) + zvar(j) * sz
            fs.append((arg + qf, -1))
            fs.append((arg - qf, -1))
        return ThetaExpr(tuple(fs), 1, None, n)

    # top weight (1^n): prescribed 1-dimensional corner
    if n == 1:
        top = xblock(1)
    else:
        top = xblock(1) * xblock(2) * pair_block(1, 2, qlevels=True)
    model.add_weight_basis(lam, [top])

    # even univariate numerators (one basis, shifted into each variable)
    v8 = _even_univariate_basis(params, "z1", 8, rng, "g8")
    if n == 1:
        model.add_weight_basis((Fraction(0),), [gblock(1) * b for b in v8])
    else:
        mid = []
        for b in v8:
            mid.append(xblock(1) * mixed_block(1, 2) * gblock(2) * _shift_var(b, 2))
        model.add_weight_basis((Fraction(1), Fraction(0)), mid)
        v12 = _even_univariate_basis(params, "z1", 12, rng, "g12")
        shared00 = gblock(1) * gblock(2) * cross_block(1, 2)
        for a in range(7):
            for b in range(a, 7):
                t1 = v12[a] * _shift_var(v12[b], 2)
                if a == b:
                    _append_raw(model, (Fraction(0), Fraction(0)), [shared00 * t1], params)
                else:
                    t2 = v12[b] * _shift_var(v12[a], 2)
                    _append_raw(model, (Fraction(0), Fraction(0)), [shared00 * t1, shared00 * t2], params)
    return model


def _append_raw(model, mu, corner_parts, params):
    corner = tuple(-x for x in mu)
    coeffs = {}
    seen = set()
    for w in signed_permutations(model.n):
        k = sp_apply(w, corner)
        if k in seen:
            continue
        seen.add(k)
        winv = sp_inverse(w)
        iperm, isigns = winv
        mapping = {
            "z%d" % (i + 1): AffineForm({"z%d" % (iperm[i] + 1): isigns[i]})
            for i in range(model.n)
        }
        parts = [ExprCoefficient(p.substitute(mapping), params) for p in corner_parts]
        coeffs[k] = parts[0] if len(parts) == 1 else SumCoefficient(parts)
    op = DifferenceOperator(model.n, coeffs, params, model.degree)
    model.basis_ops.append((tuple(mu), op))
    model.labels.append((tuple(mu), len(model.labels)))


def vandiejen_nullspace(ctx, xs, q, t, n, eta_prime=None, seed=37, samples=2, gap=mpf("1e6")):
    """(model, nullspace vectors) for the van Diejen degree."""
    model = vandiejen_model(ctx, xs, q, t, n, eta_prime=eta_prime, seed=seed)
    specs = enumerate_conditions(model.degree, model.lam, model.params, n)
    pair_specs = [s for s in specs if s.kind == "residue-pair"]
    null = model.nullspace(pair_specs, samples=samples, seed=seed, gap=gap)
    return model, null


def vandiejen_sections(ctx, xs, q, t, n, eta_prime=None, seed=37):
    """All n+1 sections from one nullspace solve, triangularized by weight.

    The member with leading weight (1^m, 0^(n-m)) is returned with its
    higher-weight columns eliminated and its leading column normalized (for
    m = n the prescribed corner has coefficient exactly 1).
    """
    from .diffop import identity_operator

    model, null = vandiejen_nullspace(ctx, xs, q, t, n, eta_prime=eta_prime, seed=seed)
    weights = sorted({mu for mu, _ in model.labels}, key=lambda mu: sum(mu))
    cols_by_weight = {
        mu: [i for i, (nu, _) in enumerate(model.labels) if nu == mu] for mu in weights
    }
    # Gauss-reduce the nullspace against the weight filtration, top down
    basis = [list(v) for v in null]
    sections = {0: identity_operator(n, model.params)}
    remaining = basis
    for mu in reversed(weights):
        if sum(mu) == 0:
            continue
        cols = cols_by_weight[mu]
        lead = None
        for v in remaining:
            mag = max(abs(v[i]) for i in cols)
            if lead is None or mag > max(abs(lead[i]) for i in cols):
                lead = v
        if lead is None or max(abs(lead[i]) for i in cols) < mpf("1e-20"):
            raise ArithmeticError("no section with leading weight %s exists" % (mu,))
        i0 = max(cols, key=lambda i: abs(lead[i]))
        others = []
        for v in remaining:
            if v is lead:
                continue
            f = v[i0] / lead[i0]
            others.append([a - f * b for a, b in zip(v, lead)])
        remaining = others
        msize = sum(1 for x in mu if x != 0)
        if msize == n:
            scale = 1 / lead[cols_by_weight[mu][0]]
            lead = [x * scale for x in lead]
        else:
            norm = max(abs(lead[i]) for i in cols)
            lead = [x / norm for x in lead]
        sections[msize] = model.operator_from_vector(lead)
    missing = [m for m in range(n + 1) if m not in sections]
    if missing:
        raise ArithmeticError("sections missing for weights %s" % missing)
    return model, [sections[m] for m in range(n + 1)]


def section_solve_vandiejen(ctx, xs, q, t, n, m, eta_prime=None, seed=37):
    """The section with leading weight (1^m, 0^(n-m)); m = 0 is the identity."""
    from .diffop import identity_operator

    if m == 0:
        return identity_operator(n, {"q": mpc(q), "t": mpc(t)})
    _, sections = vandiejen_sections(ctx, xs, q, t, n, eta_prime=eta_prime, seed=seed)
    return sections[m]


# ---------------------------------------------------------------------------
# public dispatcher


def section_solve(ctx, degree, lam, leading, params, seed=31, samples=2):
    """Numeric basis of the section space for a supported degree family.

    degree: pair of DegreeVectors.  Supported families: (0,0) (constants),
    (0, s+d'f) for n <= 2, and (0, 2s+2f-e_1-...-e_8) for n <= 2.  `leading`
    is "free" (full nullspace) or "prescribed" (van Diejen normalization).
    Returns (dimension, list of operators).
    """
    from .diffop import identity_operator

    d1, d2 = degree
    n = len(lam)
    q = params["q"]
    t = params.get("t", 0)
    if d2.s == 0 and d2.f == 0 and not any(d2.e or ()):
        return 1, [identity_operator(n, {"q": mpc(q), "t": mpc(t)})]
    if d2.s == 1 and not any(d2.e or ()):
        eta = params.get("eta_prime")
        if eta is None:
            raise ValueError("the first-order family needs eta_prime")
        model, null, ops = section_solve_first_order(
            ctx, n, d2.f, eta, q, t, seed=seed, samples=samples
        )
        return len(null), ops
    if d2.s == 2 and d2.f == 2 and tuple(d2.e or ()) == (1,) * 8:
        xs = [params["x%d" % (j + 1)] for j in range(8)]
        if leading == "prescribed":
            _, sections = vandiejen_sections(
                ctx, xs, q, t, n, eta_prime=params.get("eta_prime"), seed=seed
            )
            return len(sections), sections
        model, null = vandiejen_nullspace(
            ctx, xs, q, t, n, eta_prime=params.get("eta_prime"), seed=seed, samples=samples
        )
        return len(null), [model.operator_from_vector(v) for v in null]
    raise NotImplementedError("section solving implemented for the supported degree families")


def operator_span_contains(ctx, basis_ops, op, points, gap=mpf("1e6")):
    """Whether op lies in the numeric span of basis_ops on sampled coefficients."""
    keys = set()
    for b in basis_ops:
        keys |= set(b.support())
    keys |= set(op.support())
    cols = []
    for b in basis_ops + [op]:
        col = []
        for z in points:
            for k in sorted(keys):
                col.append(b.eval_coeff(ctx, k, z))
        cols.append(col)
    scale = max(abs(v) for v in cols[-1]) or mpf(1)
    cols = [[v / scale for v in col] for col in cols]
    rows = [[col[i] for col in cols] for i in range(len(cols[0]))]
    r_with = numeric_rank(rows, gap=gap, prec=ctx.prec)
    rows_without = [row[:-1] for row in rows]
    r_without = numeric_rank(rows_without, gap=gap, prec=ctx.prec)
    return r_with == r_without
