import random
from fractions import Fraction as F

import pytest
from mpmath import mpc, mpf

from ccnops.conditions import (
    ConditionSpec,
    check_polarization,
    check_residue,
    check_vanishing,
    enumerate_conditions,
    operator_span_contains,
    reflect_shift,
    section_solve,
    section_solve_first_order,
    vandiejen_nullspace,
    vandiejen_sections,
)
from ccnops.diffop import DegreeVector, DifferenceOperator, ExprCoefficient
from ccnops.families import first_order
from ccnops.symbols import PolarizationRecord, ThetaExpr, zvar
from conftest import ETA, Q, T, TOL, op_defect, rel, sample_points


def test_reflect_shift_conventions():
    assert reflect_shift(("sum", 0, 1), 1, (F(0), F(0))) == (F(1), F(1))
    assert reflect_shift(("double", 0), -1, (F(-1), F(0))) == (F(0), F(0))
    assert reflect_shift(("diff", 0, 1), 0, (F(-1), F(1))) == (F(1), F(-1))


def test_enumerate_scalar_degree_is_empty():
    degree = (DegreeVector(), DegreeVector())
    specs = enumerate_conditions(degree, (F(0), F(0)), {}, 2)
    assert [s for s in specs if s.kind == "residue-pair"] == []
    assert [s for s in specs if s.kind == "x-vanish"] == []


def test_enumerate_first_order_n1():
    degree = (DegreeVector(), DegreeVector(0, 1, 0))
    specs = enumerate_conditions(degree, (F(1, 2),), {}, 1)
    pairs = [s for s in specs if s.kind == "residue-pair"]
    assert len(pairs) == 1
    (s,) = pairs
    assert s.beta == ("double", 0) and s.level == 0
    assert sorted((s.k, s.k2)) == [(F(-1, 2),), (F(1, 2),)]
    assert s.exponent == 1  # m - 2 k_1 at k = -1/2


def test_enumerate_blowup_ranges():
    # k = 0 coefficient: the l-range collapses (1 <= l < 1)
    degree = (DegreeVector(), DegreeVector(0, 2, 2, (1,) * 8))
    specs = enumerate_conditions(degree, (F(1),), {}, 1)
    xv = [s for s in specs if s.kind == "x-vanish"]
    assert all(s.k != (F(0),) for s in xv)
    # the k = -1 coefficient vanishes at z = x_j + q/2 for all j
    corners = [s for s in xv if s.k == (F(-1),)]
    assert len(corners) == 8
    bind = {"q": Q}
    for j, s in enumerate(sorted(corners, key=lambda s: sorted(s.divisor_point.coeffs))):
        bind["x%d" % (j + 1)] = mpc(j + 1)
    vals = {str(s.divisor_point) for s in corners}
    assert len(vals) == 8


def test_check_residue_first_order_passes(ctx):
    D = first_order([Q / 2 + mpc("0.1", "0.06"), Q / 2 - mpc("0.1", "0.06") + ETA], T, Q, 2)
    degree = (DegreeVector(), DegreeVector(0, 1, 0))
    specs = enumerate_conditions(degree, (F(1, 2), F(1, 2)), D.params, 2)
    env = {"q": Q, "t": T, "eta_prime": ETA}
    rep = check_residue(ctx, D, specs, env, samples=1)
    assert rep.passed
    rep2 = check_vanishing(ctx, D, specs, env, samples=1)
    assert rep2.passed


def test_check_residue_soundness(ctx):
    # a 1e-6 perturbation of one orbit coefficient fails proportionally
    D = first_order([Q / 2 + mpc("0.1", "0.06"), Q / 2 - mpc("0.1", "0.06") + ETA], T, Q, 2)
    eps = mpf("1e-6")
    k0 = (F(1, 2), F(1, 2))
    coeffs = {k: (c.scaled(1 + eps) if k == k0 else c) for k, c in D.coeffs.items()}
    Dp = DifferenceOperator(2, coeffs, D.params, D.degree)
    degree = (DegreeVector(), DegreeVector(0, 1, 0))
    specs = enumerate_conditions(degree, (F(1, 2), F(1, 2)), D.params, 2)
    env = {"q": Q, "t": T, "eta_prime": ETA}
    rep = check_residue(ctx, Dp, specs, env, samples=1)
    assert not rep.passed
    assert eps / 10 < rep.max_defect < eps * 10


def test_check_vanishing_detects_generic_failure(ctx, xs8):
    # a generic first-order operator does not vanish at the blowup points
    D = first_order([Q / 2 + mpc("0.1", "0.06"), Q / 2 - mpc("0.1", "0.06") + ETA], T, Q, 1)
    degree = (DegreeVector(), DegreeVector(0, 1, 0, (1,)))
    specs = [
        ConditionSpec(
            "x-vanish",
            "even",
            (),
            0,
            (F(-1, 2),),
            (),
            0,
            0,
            __import__("ccnops.symbols", fromlist=["AffineForm"]).AffineForm.var("x1")
            + __import__("ccnops.symbols", fromlist=["AffineForm"]).AffineForm.var("q") * F(1, 2),
        )
    ]
    env = {"q": Q, "t": T, "eta_prime": ETA, "x1": xs8[0]}
    rep = check_vanishing(ctx, D, specs, env, samples=1)
    assert not rep.passed


def test_check_vanishing_vandiejen_corner(ctx, xs8):
    H = None
    from ccnops.conditions import section_solve_vandiejen

    H = section_solve_vandiejen(ctx, xs8, Q, T, 1, 1)
    degree = (DegreeVector(), DegreeVector(0, 2, 2, (1,) * 8))
    specs = enumerate_conditions(degree, (F(1),), H.params, 1)
    env = dict(H.params)
    env["eta_prime"] = sum(xs8) / 2
    rep = check_vanishing(ctx, H, [s for s in specs if s.kind == "x-vanish"], env, samples=1)
    assert rep.passed


def test_check_polarization(ctx):
    c_theta = ExprCoefficient(ThetaExpr(((zvar(1), 1),), arity=1), {"q": Q, "t": T})
    rep = check_polarization(ctx, c_theta, PolarizationRecord(((F(1),),), -1))
    assert rep.passed
    c_one = ExprCoefficient(ThetaExpr.one(1), {"q": Q})
    rep = check_polarization(ctx, c_one, PolarizationRecord(((F(0),),), 0))
    assert rep.passed
    c_sq = ExprCoefficient(ThetaExpr(((zvar(1), 2),), arity=1), {"q": Q})
    rep = check_polarization(ctx, c_sq, PolarizationRecord(((F(2),),), -2))
    assert rep.passed
    # wrong prediction fails
    rep = check_polarization(ctx, c_sq, PolarizationRecord(((F(1),),), -1))
    assert not rep.passed


def test_section_solve_dispatcher_constants(ctx):
    degree = (DegreeVector(), DegreeVector())
    dim, ops = section_solve(ctx, degree, (F(0),), "free", {"q": Q, "t": T})
    assert dim == 1 and ops[0].support() == [(F(0),)]


def test_section_solve_first_order_dimensions(ctx):
    for dprime in (0, 1):
        model, null, ops = section_solve_first_order(ctx, 1, dprime, ETA, Q, T)
        assert len(null) == 2 * dprime + 2
    model, null, ops = section_solve_first_order(ctx, 2, 0, ETA, Q, T)
    assert len(null) == 3  # Sym^2 of the univariate two-dimensional space


def test_section_solutions_are_sections(ctx):
    model, null, ops = section_solve_first_order(ctx, 1, 1, ETA, Q, T)
    degree = (DegreeVector(), DegreeVector(0, 1, 1))
    specs = enumerate_conditions(degree, (F(1, 2),), model.params, 1)
    env = {"q": Q, "t": T, "eta_prime": ETA}
    for op in ops[:2]:
        rep = check_residue(ctx, op, specs, env, samples=1)
        assert rep.passed


def test_section_solve_reproducible(ctx):
    _, null_a, _ = section_solve_first_order(ctx, 1, 1, ETA, Q, T, seed=31)
    _, null_b, _ = section_solve_first_order(ctx, 1, 1, ETA, Q, T, seed=97)
    assert len(null_a) == len(null_b)
    from ccnops.curve import CurveContext
    from conftest import TAU

    ctx512 = CurveContext(TAU, 512)
    _, null_c, _ = section_solve_first_order(ctx512, 1, 1, ETA, Q, T, seed=31)
    assert len(null_c) == len(null_a)


def test_vandiejen_dimension_and_collapse(ctx, xs8):
    _, null = vandiejen_nullspace(ctx, xs8, Q, T, 1)
    assert len(null) == 2
    xs_bad = list(xs8)
    xs_bad[0] = xs8[0] + mpf("1e-3")
    _, null_bad = vandiejen_nullspace(ctx, xs_bad, Q, T, 1, eta_prime=sum(xs8) / 2)
    assert len(null_bad) == 1


def test_vandiejen_section_failure_raises(ctx, xs8):
    xs_bad = list(xs8)
    xs_bad[0] = xs8[0] + mpf("1e-3")
    with pytest.raises(ArithmeticError):
        vandiejen_sections(ctx, xs_bad, Q, T, 1, eta_prime=sum(xs8) / 2)


def test_operator_span_contains(ctx):
    D1 = first_order([], T, Q, 1)
    D2 = first_order([mpc("0.1", "0.2"), Q + ETA - mpc("0.1", "0.2")], T, Q, 1)
    pts = sample_points(1, 3)
    assert operator_span_contains(ctx, [D1, D2], D1.scaled(mpc("2.5", "0.5")), pts)
    other = first_order([mpc("0.3", "-0.1"), mpc("0.05", "0.15")], T, Q, 1)
    assert not operator_span_contains(ctx, [D1], other, pts)


def test_vandiejen_t_zero_and_wedge(ctx, xs8):
    # the solve stays 3-dimensional at t = 0, and the wedge of the n = 1
    # sections passes the same residue suite there (it lives in the
    # delta-shifted Hom space, so span membership is not expected; see the
    # decisions ledger)
    from ccnops.families import wedge_section

    model, null = vandiejen_nullspace(ctx, xs8, Q, mpc(0), 2)
    assert len(null) == 3
    _, secs1 = vandiejen_sections(ctx, xs8, Q, mpc(0), 1)
    W = wedge_section([secs1[0], secs1[1]], {"q": Q, "t": mpc(0)})
    degree = (DegreeVector(), DegreeVector(0, 2, 2, (1,) * 8))
    specs = enumerate_conditions(degree, (F(1), F(1)), W.params, 2)
    env = dict(W.params)
    env["eta_prime"] = sum(xs8) / 2
    env["t"] = mpc(0)
    rep = check_residue(ctx, W, [s for s in specs if s.kind == "residue-pair"], env, samples=1)
    assert rep.passed
    ops = [model.operator_from_vector(v) for v in null]
    pts = sample_points(2, 3, seed=211)
    assert not operator_span_contains(ctx, ops, W, pts)
