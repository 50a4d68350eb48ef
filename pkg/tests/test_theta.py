import random

import pytest
from mpmath import mp, mpc, mpf

from ccnops.curve import (
    CurveContext,
    CurvePoint,
    ModulusError,
    PoleProximityError,
    PrecisionError,
)
from conftest import TAU, TOL, rel


def test_theta_vanishes_at_zero(ctx):
    assert abs(ctx.theta(0)) == 0


def test_theta_oddness(ctx):
    rng = random.Random(2)
    for _ in range(10):
        z = mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
        assert rel(ctx.theta(-z), -ctx.theta(z)) < TOL


def test_sum_vs_product(ctx):
    rng = random.Random(3)
    for _ in range(10):
        z = mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
        assert rel(ctx.theta(z), ctx.theta_product(z)) < mpf("1e-30")


def test_sum_vs_product_random_moduli():
    # seeded sweep over (z, tau) with Im tau in [0.3, 2]
    rng = random.Random(4)
    for _ in range(60):
        tau = mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 2.0))
        c = CurveContext(tau, 256)
        z = mpc(rng.uniform(-0.45, 0.45), rng.uniform(-0.4, 0.4))
        assert rel(c.theta(z), c.theta_product(z)) < mpf("1e-30")


def test_quasi_periodicity(ctx):
    rng = random.Random(5)
    for _ in range(10):
        z = mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
        v = ctx.theta(z)
        assert rel(ctx.theta(z + 1), -v) < TOL
        assert rel(ctx.theta(z + ctx.tau), -ctx.e(-z - ctx.tau / 2) * v) < TOL


def test_pochhammer():
    ctx = CurveContext(TAU, 192)
    q = mpc("0.05", "0.41")
    z = mpc("0.17", "0.23")
    assert ctx.theta_pochhammer(z, 0, q) == 1
    want = ctx.theta(z) * ctx.theta(q + z)
    assert rel(ctx.theta_pochhammer(z, 2, q), want) < TOL
    assert rel(ctx.theta_pochhammer(z, -1, q), 1 / ctx.theta(-q + z)) < TOL


def test_pochhammer_pole_guard():
    ctx = CurveContext(TAU, 192)
    q = mpc("0.05", "0.41")
    with pytest.raises(PoleProximityError):
        ctx.theta_pochhammer(q, -1, q)  # hits theta(0)


def test_frak_q(ctx):
    assert ctx.frak_q(0) == 1
    assert ctx.frak_q(mpf(1) / 2) == -1
    assert ctx.frak_q(ctx.tau / 2) == -1
    assert ctx.frak_q((1 + ctx.tau) / 2) == -1
    with pytest.raises(ValueError):
        ctx.frak_q(mpc("0.123", "0.234"))


def test_threshold_errors():
    with pytest.raises(ModulusError):
        CurveContext(mpc("0.1", "0.1"), 128)
    with pytest.raises(PrecisionError):
        CurveContext(TAU, 32)


def test_curve_point_reduction(ctx):
    p = CurvePoint(TAU, mpc("3.7", "2.9"))
    r1 = p.reduced(ctx)
    r2 = r1.reduced(ctx)
    assert abs(r1.value - r2.value) < mpf("1e-40")
    z0, m, n = ctx.lattice_reduce(p.value)
    assert abs(p.value - (z0 + m + n * ctx.tau)) < mpf("1e-40")


def test_theta_deriv_at_lattice(ctx):
    # numeric derivative against the exact lattice multiplier
    eps = mpf("1e-30")
    for (m, n) in ((0, 0), (1, 0), (0, 1), (1, 1)):
        lam = m + n * ctx.tau
        approx = ctx.theta(lam + eps) / eps
        exact = ctx.theta_deriv_at_lattice(m, n)
        assert rel(approx, exact) < mpf("1e-20")
