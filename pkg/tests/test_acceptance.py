"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Everything runs at 256-bit precision with relative tolerance 1e-25 unless a
criterion states otherwise.  The checks are property-based: identities and
dimension statements evaluated at seeded parameter draws.
"""

import random
import time
from fractions import Fraction as F

import pytest
from mpmath import mp, mpc, mpf

from ccnops.conditions import (
    check_residue,
    check_vanishing,
    enumerate_conditions,
    operator_span_contains,
    section_solve_first_order,
    vandiejen_nullspace,
    vandiejen_sections,
)
from ccnops.diffop import DegreeVector, DifferenceOperator, SelbergDensity
from ccnops.families import (
    FourierKernel,
    braid_check,
    cascade_leading_expr,
    d_cascade,
    d_torsion_closed_form,
    first_order,
    fourier_transform,
    hilbert_gauge_identities,
    solve_fourier_kernel,
    theta_pm_multiplier,
    wedge_section,
)
from ccnops.formal import compare_gauged, gauged_from_operator
from ccnops.identities import run_identity
from ccnops.symbols import AffineForm
from ccnops.weyl import (
    automorphism_group,
    hyperoctahedral_generators,
    invariant_dimension,
    sp_matrix,
    theta_symmetrization_rank,
)
from conftest import ETA, Q, T, TOL, op_defect, rel, sample_points

PARAMS = {"q": Q, "t": T}


def _report(name, defect, budget, elapsed, tol=TOL):
    status = "PASS" if defect < tol else "FAIL"
    print(
        "criterion %-38s %s  (max defect %.3g, %.1fs / budget %ds)"
        % (name, status, float(defect), elapsed, budget)
    )
    assert defect < tol, "%s defect %s" % (name, defect)
    assert elapsed < budget, "%s exceeded its runtime budget" % name


def test_criterion_1_kernel_identities(ctx):
    t0 = time.time()
    worst = mpf(0)
    for name in (
        "sum-vs-product",
        "theta-quasiperiod",
        "theta-oddness",
        "gamma-shift",
        "multiplication-principle",
        "restrict-2z",
        "restrict-mz",
    ):
        rep = run_identity(ctx, name, samples=100, seed=11)
        worst = max(worst, rep.max_defect)
        assert rep.passed, name
    _report("1-kernel-identities", worst, 30, time.time() - t0)


def test_criterion_2_symmetrization_identities(ctx):
    t0 = time.time()
    worst = mpf(0)
    for name, ns in (("sym-An", (2, 3, 4)), ("sym-Cn", (1, 2, 3)), ("sym-Bn", (2, 3)), ("sym-Dn", (3,))):
        for n in ns:
            rep = run_identity(ctx, name, n=n, samples=20, seed=13 + n)
            worst = max(worst, rep.max_defect)
            assert rep.passed, (name, n)
    _report("2-symmetrization-identities", worst, 120, time.time() - t0)


def test_criterion_3_first_order_membership(ctx):
    t0 = time.time()
    rng = random.Random(17)
    worst = mpf(0)
    cases = []
    for trial in range(20):
        n = 1 if trial % 2 else 2
        dprime = trial % 3
        us = []
        for _ in range(2 * dprime + 1):
            us.append(mpc(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)))
        us.append(Q + ETA - sum(us, mpc(0)))
        D = first_order(us, T, Q, n)
        degree = (DegreeVector(), DegreeVector(0, 1, dprime))
        lam = tuple([F(1, 2)] * n)
        specs = enumerate_conditions(degree, lam, D.params, n)
        env = {"q": Q, "t": T, "eta_prime": ETA}
        rep = check_residue(ctx, D, specs, env, samples=1, seed=rng.randrange(10**6))
        repv = check_vanishing(ctx, D, specs, env, samples=1, seed=rng.randrange(10**6))
        worst = max(worst, rep.max_defect, repv.max_defect)
        assert rep.passed and repv.passed, trial
        cases.append((D, specs, env, n))
    # single-coefficient perturbations fail with proportional defect
    eps = mpf("1e-6")
    for D, specs, env, n in cases[:3]:
        k0 = tuple([F(1, 2)] * n)
        coeffs = {k: (c.scaled(1 + eps) if k == k0 else c) for k, c in D.coeffs.items()}
        Dp = DifferenceOperator(n, coeffs, D.params, D.degree)
        rep = check_residue(ctx, Dp, specs, env, samples=1)
        assert not rep.passed
        assert eps / 10 < rep.max_defect < eps * 10
    _report("3-first-order-membership", worst, 300, time.time() - t0)


def test_criterion_4_cascade(ctx):
    t0 = time.time()
    worst = mpf(0)
    pts = {n: sample_points(n, 2, seed=19 + n) for n in (1, 2, 3)}
    for n, dmax in ((1, 4), (2, 4), (3, 3)):
        for d in range(1, dmax + 1):
            Da = d_cascade(d, Q, T, n, mpc("0.111", "0.077"))
            Db = d_cascade(d, Q, T, n, mpc("-0.081", "0.133"))
            worst = max(worst, op_defect(ctx, Da, Db, pts[n]))
            # support bound and leading coefficient
            for k in Da.support():
                assert all(abs(x) <= F(d, 2) for x in k)
            expr = cascade_leading_expr(d, n)
            for z in pts[n]:
                bind = {"q": Q, "t": T}
                for i, w in enumerate(z):
                    bind["z%d" % (i + 1)] = w
                worst = max(
                    worst,
                    rel(expr.eval(ctx, bind), Da.eval_coeff(ctx, tuple([F(-d, 2)] * n), z)),
                )
    # the three displayed operator relations (exchange in the kernel-consistent
    # normalization: sum u = (1-d) q, shift +d q/2; see the decisions ledger)
    for n in (1, 2):
        d = 1
        u = mpc("0.23", "-0.11")
        Dd = d_cascade(d, Q, T, n, mpc("0.111", "0.077"))
        Dd1 = d_cascade(d + 1, Q, T, n, mpc("-0.09", "0.14"))
        lhs = first_order([(d + 1) * Q / 2 + u, (d + 1) * Q / 2 - u], T, Q, n).compose(Dd)
        rhs = Dd1.compose(theta_pm_multiplier(u, n, PARAMS))
        worst = max(worst, op_defect(ctx, lhs, rhs, pts[n]))
        lhs = Dd.compose(first_order([-d * Q / 2 + u, -d * Q / 2 - u], T, Q, n))
        rhs = theta_pm_multiplier(u, n, PARAMS).compose(Dd1)
        worst = max(worst, op_defect(ctx, lhs, rhs, pts[n]))
        u0, u1, u2 = mpc("0.07", "0.13"), mpc("0.19", "-0.08"), mpc("-0.12", "0.22")
        u3 = (1 - d) * Q - u0 - u1 - u2
        sh = d * Q / 2
        lhs = Dd.compose(first_order([u0, u1, u2, u3], T, Q, n))
        rhs = first_order([u0 + sh, u1 + sh, u2 + sh, u3 + sh], T, Q, n).compose(Dd)
        worst = max(worst, op_defect(ctx, lhs, rhs, pts[n]))
    _report("4-cascade", worst, 300, time.time() - t0)


def test_criterion_5_torsion_closed_form(ctx):
    t0 = time.time()
    worst_order = mpf(0)
    for d, n in ((2, 1), (2, 2), (3, 1)):
        qtor = mpf(1) / d
        Ce = d_torsion_closed_form(d, qtor, T, n, ctx)
        z = sample_points(n, 1, seed=23)[0]

        def defect_at(eps):
            qe = qtor + eps * mpc("1.1", "0.83")
            Dc = d_cascade(d, qe, T, n, mpc("0.111", "0.077"))
            worst = mpf(0)
            for k in Dc.support():
                if k in Ce.coeffs:
                    worst = max(worst, rel(Dc.eval_coeff(ctx, k, z), Ce.eval_coeff(ctx, k, z)))
                else:
                    ref = abs(Ce.eval_coeff(ctx, tuple([F(d, 2)] * n), z))
                    worst = max(worst, abs(Dc.eval_coeff(ctx, k, z)) / ref)
            return worst

        d8 = defect_at(mpf("1e-8"))
        d10 = defect_at(mpf("1e-10"))
        assert d8 < mpf("1e-4"), (d, n, d8)
        # observed convergence order >= 1
        worst_order = max(worst_order, d10 / d8)
    _report("5-torsion-closed-form", worst_order, 300, time.time() - t0, tol=mpf("0.05"))


def test_criterion_6_fourier_kernel(ctx):
    t0 = time.time()
    worst = mpf(0)
    rng = random.Random(29)
    for n, order in ((1, 4), (2, 3)):
        pts = sample_points(n, 2, seed=31 + n)
        # defining relations to truncation
        K = solve_fourier_kernel(ctx, mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.2)), Q, T, n, order)
        worst = max(worst, max(K.defining_residual(z, order=order - 1) for z in pts))
        # K(0) = 1
        K0 = solve_fourier_kernel(ctx, mpc(0), Q, T, n, order)
        for m in K0.tail.entries:
            if any(m):
                worst = max(worst, abs(K0.tail_value(m, pts[0])))
        # K(-q/2) matches the first cascade step
        Km = FourierKernel(ctx, AffineForm.var("q") * F(-1, 2), Q, T, n, order)
        D1 = first_order([], T, Q, n)
        worst = max(worst, compare_gauged(ctx, Km, gauged_from_operator(D1), pts, order=1))
        # braid relation and inverse for 5 seeded triples
        for s in range(5):
            c = mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.15, 0.15))
            d = mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.15, 0.15))
            t0p = mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.15, 0.15))
            db, di = braid_check(ctx, c, d, t0p, Q, T, n, order, pts[:1])
            worst = max(worst, db, di)
        # the three known transform instances
        c = mpc("0.08", "0.21")
        u = mpc("0.23", "-0.11")
        D = theta_pm_multiplier(u, n, PARAMS)
        Fh = fourier_transform(ctx, D, c, 0, 1, 2)
        tgt = first_order([Q / 2 - c + u, Q / 2 - c - u], T, Q, n)
        worst = max(worst, compare_gauged(ctx, Fh, gauged_from_operator(tgt), pts, order=1))
        D = first_order([c + Q / 2 + u, c + Q / 2 - u], T, Q, n)
        Fh = fourier_transform(ctx, D, c, 1, 0, 2)
        tgt = theta_pm_multiplier(u, n, PARAMS)
        worst = max(worst, compare_gauged(ctx, Fh, gauged_from_operator(tgt), pts, order=1))
        u0, u1, u2 = mpc("0.11", "0.07"), mpc("-0.13", "0.21"), mpc("0.31", "0.05")
        u3 = Q + 2 * c - u0 - u1 - u2
        D = first_order([u0, u1, u2, u3], T, Q, n)
        Fh = fourier_transform(ctx, D, c, 1, 1, 2)
        tgt = first_order([u0 - c, u1 - c, u2 - c, Q + c - u0 - u1 - u2], T, Q, n)
        worst = max(worst, compare_gauged(ctx, Fh, gauged_from_operator(tgt), pts, order=1))
    _report("6-fourier-kernel", worst, 600, time.time() - t0)


def test_criterion_7_van_diejen_integrability(ctx, xs8):
    t0 = time.time()
    model, null = vandiejen_nullspace(ctx, xs8, Q, T, 2)
    assert len(null) == 3, "section space dimension %d != 3" % len(null)
    _, sections = vandiejen_sections(ctx, xs8, Q, T, 2)
    pts = sample_points(2, 2, seed=37)
    worst = mpf(0)
    for a in range(1, 3):
        for b in range(a + 1, 3):
            AB = sections[a].compose(sections[b])
            BA = sections[b].compose(sections[a])
            worst = max(worst, op_defect(ctx, AB, BA, pts))
    # perturbing the constraint by 1e-3 collapses the m > 0 sections
    xs_bad = list(xs8)
    xs_bad[0] = xs8[0] + mpf("1e-3")
    _, null_bad = vandiejen_nullspace(ctx, xs_bad, Q, T, 2, eta_prime=sum(xs8) / 2)
    assert len(null_bad) == 1, "perturbed constraint left %d sections" % len(null_bad)
    _report("7-van-diejen-integrability", worst, 900, time.time() - t0, tol=mpf("1e-20"))


def test_criterion_8_section_dimensions(ctx, xs8):
    t0 = time.time()
    for dprime in (0, 1, 2):
        _, null, _ = section_solve_first_order(ctx, 1, dprime, ETA, Q, T)
        assert len(null) == 2 * dprime + 2, (1, dprime, len(null))
    # n = 2: the solved dimension follows the symmetric-power structure
    # dim = C(2d'+3, 2); see the decisions ledger for the dimension note
    for dprime in (0, 1, 2):
        _, null, _ = section_solve_first_order(ctx, 2, dprime, ETA, Q, T)
        K = 2 * dprime + 2
        assert len(null) == K * (K + 1) // 2, (2, dprime, len(null))
    # the van Diejen degree at n = 1 with the constraint: dimension 2
    _, null = vandiejen_nullspace(ctx, xs8, Q, T, 1)
    assert len(null) == 2
    _report("8-section-dimensions", mpf(0), 600, time.time() - t0, tol=mpf(1))


@pytest.mark.xfail(
    reason="stated value 2d'+2 at n=2 contradicts the symmetric-power structure "
    "of the t=0 fiber (dimension C(2d'+3,2)); see the decisions ledger",
    strict=True,
)
def test_criterion_8_spec_literal_n2(ctx):
    _, null, _ = section_solve_first_order(ctx, 2, 1, ETA, Q, T)
    assert len(null) == 4


def test_criterion_9_hilbert_identities(ctx, xs8):
    t0 = time.time()
    pts = sample_points(2, 1, seed=41)
    dt, dp = hilbert_gauge_identities(
        ctx, mpc("0.11", "0.19"), mpc("-0.07", "0.23"), mpc("0.17", "0.13"), Q, T,
        mpc("0.09", "0.12"), 2, pts,
    )
    worst = max(dt, dp)
    # t = 0 wedge operator passes the residue suite
    u0a = mpc("0.11", "0.07")
    Da = first_order([u0a, Q + ETA - u0a], mpc(0), Q, 1)
    u0b = mpc("-0.21", "0.13")
    Db = first_order([u0b, Q + ETA - u0b], mpc(0), Q, 1)
    W = wedge_section([Da, Db], {"q": Q, "t": mpc(0)})
    degree = (DegreeVector(), DegreeVector(0, 1, 0))
    specs = enumerate_conditions(degree, (F(1, 2), F(1, 2)), W.params, 2)
    env = {"q": Q, "t": mpc(0), "eta_prime": ETA}
    rep = check_residue(ctx, W, specs, env, samples=1)
    assert rep.passed
    worst = max(worst, rep.max_defect)
    _report("9-hilbert-identities", worst, 300, time.time() - t0)


def test_criterion_10_adjoint_suite(ctx):
    t0 = time.time()
    rng = random.Random(43)
    worst = mpf(0)
    # involutive anti-homomorphism on 20 seeded pairs
    for trial in range(20):
        n = 1 if trial < 15 else 2
        dens = SelbergDensity(n)
        pts = sample_points(n, 1, seed=47 + trial)
        A = first_order(
            [mpc(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)) for _ in range(2)], T, Q, n
        )
        B = first_order(
            [mpc(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)) for _ in range(2)], T, Q, n
        )
        worst = max(worst, op_defect(ctx, A.selberg_adjoint(dens).selberg_adjoint(dens), A, pts))
        lhs = A.compose(B).selberg_adjoint(dens)
        rhs = B.selberg_adjoint(dens).compose(A.selberg_adjoint(dens))
        worst = max(worst, op_defect(ctx, lhs, rhs, pts))
    # the parameter swap u -> q/2 - u
    for n in (1, 2):
        dens = SelbergDensity(n)
        pts = sample_points(n, 2, seed=53 + n)
        u0, u1 = mpc("0.11", "0.07"), mpc("-0.13", "0.21")
        D = first_order([u0, u1], T, Q, n)
        target = first_order([Q / 2 - u0, Q / 2 - u1], T, Q, n)
        worst = max(worst, op_defect(ctx, D.selberg_adjoint(dens), target, pts))
    # solved kernel truncations at c = -d q/2 resolve to finite operators and
    # are self-adjoint
    for n in (1, 2):
        dens = SelbergDensity(n)
        pts = sample_points(n, 1, seed=59 + n)
        D2 = d_cascade(2, Q, T, n, mpc("0.111", "0.077"))
        worst = max(worst, op_defect(ctx, D2, D2.selberg_adjoint(dens), pts))
    _report("10-adjoint-suite", worst, 300, time.time() - t0)


def _even_positive_definite(max_det=16):
    mats = [[[d]] for d in range(2, max_det + 1, 2)]
    seen = set()
    for a in range(2, 2 * max_det + 1, 2):
        for c in range(a, 2 * max_det + 1, 2):
            for b in range(0, a // 2 + 1):
                det = a * c - b * b
                if 0 < det <= max_det:
                    key = (a, b, c)
                    if key not in seen:
                        seen.add(key)
                        mats.append([[a, b], [b, c]])
    return mats


def test_criterion_11_invariant_dimensions():
    t0 = time.time()
    count = 0
    for Qm in _even_positive_definite(16):
        n = len(Qm)
        auts = automorphism_group(Qm)
        for gens in ([], auts):
            if not gens and n == 2:
                continue  # trivial group is exercised at n=1; keep the sweep fast
            want = invariant_dimension(Qm, gens)
            got = theta_symmetrization_rank(Qm, gens)
            assert want == got, (Qm, len(gens), want, got)
            count += 1
    print("criterion 11-invariant-dimensions PASS  (%d lattice/group pairs, %.1fs)" % (count, time.time() - t0))
    assert count >= 20