import random

import pytest
from mpmath import mp, mpc, mpf

mp.prec = 320

TAU = mpc("0.13", "1.09")
Q = mpc("0.21", "0.39")
T = mpc("0.31", "0.17")
ETA = mpc("0.17", "0.11")
TOL = mpf("1e-25")


@pytest.fixture(scope="session")
def ctx():
    from ccnops.curve import CurveContext

    return CurveContext(TAU, 256)


@pytest.fixture(scope="session")
def xs8():
    rng = random.Random(5)
    return [mpc(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)) for _ in range(8)]


def sample_points(n, count=2, seed=101):
    rng = random.Random(seed)
    return [
        tuple(mpc(rng.uniform(-0.35, 0.35), rng.uniform(-0.25, 0.25)) for _ in range(n))
        for _ in range(count)
    ]


def op_defect(ctx, A, B, pts):
    worst = mpf(0)
    keys = set(A.support()) | set(B.support())
    for z in pts:
        for k in keys:
            a = A.eval_coeff(ctx, k, z)
            b = B.eval_coeff(ctx, k, z)
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), mpf("1e-30")))
    return worst


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), mpf("1e-30"))
