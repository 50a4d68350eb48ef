import random
from fractions import Fraction as F

import pytest
from mpmath import mpc

from ccnops.weyl import (
    AffineRoot,
    automorphism_group,
    bruhat_interval,
    coroot_leq,
    dominance_leq,
    hyperoctahedral_generators,
    invariant_dimension,
    inversion_set,
    inversion_set_bruteforce,
    sp_apply,
    sp_compose,
    sp_inverse,
    sp_matrix,
    signed_permutations,
    theta_symmetrization_rank,
    weight_orbit,
)


def test_dominance_examples():
    assert dominance_leq((1, 1), (2, 0))
    assert not dominance_leq((2, 0), (1, 1))
    # odd difference sum: incomparable in the root-lattice order
    assert not dominance_leq((0, 0), (1, 0))
    assert not dominance_leq((1, 0), (0, 0))


def test_dominance_partial_order():
    rng = random.Random(11)
    weights = []
    while len(weights) < 24:
        w = tuple(sorted((rng.randrange(4) for _ in range(3)), reverse=True))
        weights.append(w)
    for _ in range(200):
        a, b, c = rng.choice(weights), rng.choice(weights), rng.choice(weights)
        assert dominance_leq(a, a)
        if dominance_leq(a, b) and dominance_leq(b, a):
            assert a == b
        if dominance_leq(a, b) and dominance_leq(b, c):
            assert dominance_leq(a, c)


def test_weight_orbits():
    assert weight_orbit((0, 0)) == {(0, 0)}
    assert weight_orbit((1, 0)) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(weight_orbit((F(1, 2), F(1, 2)))) == 4


def test_bruhat_intervals():
    assert bruhat_interval((1, 1)) == [(F(0), F(0)), (F(1), F(1))]
    assert bruhat_interval((2, 0)) == [(F(0), F(0)), (F(1), F(1)), (F(2), F(0))]
    # the half-integer example needs the coroot lattice
    got = bruhat_interval((F(3, 2), F(1, 2)), lattice="coroot")
    assert got == [(F(1, 2), F(1, 2)), (F(3, 2), F(1, 2))]
    # downward closure + consistency with the corresponding order
    for lam, lattice in (((2, 2), "root"), ((2, 1), "coroot")):
        leq = dominance_leq if lattice == "root" else coroot_leq
        interval = bruhat_interval(lam, lattice=lattice)
        for mu in interval:
            assert leq(mu, tuple(F(x) for x in lam))
            sub = bruhat_interval(mu, lattice=lattice)
            for nu in sub:
                assert nu in interval


def test_inversion_sets():
    got = {(r.kind, r.i, r.j, r.level) for r in inversion_set((1, 0))}
    assert got == {("diff", 0, 1, 0), ("sum", 0, 1, 0)}
    got = {(r.kind, r.i, r.j, r.level) for r in inversion_set((1, 1))}
    assert got == {("sum", 0, 1, 0), ("sum", 0, 1, 1)}
    assert inversion_set((0, 0)) == []


def test_inversion_against_bruteforce():
    for lam in ((1, 0), (1, 1), (2, 1), (3, 1), (F(3, 2), F(1, 2))):
        a = sorted((r.kind, r.i, r.j, r.level) for r in inversion_set(lam))
        b = sorted((r.kind, r.i, r.j, r.level) for r in inversion_set_bruteforce(lam))
        assert a == b
        # cardinality = sum of positive pairings, levels within [0, pairing)
        total = 0
        for r in inversion_set(lam):
            assert 0 <= r.level < r.pairing(tuple(F(x) for x in lam))
            total += 1
        from ccnops.weyl import positive_finite_roots

        want = sum(
            max(int(r.pairing(tuple(F(x) for x in lam))), 0)
            for r in positive_finite_roots(len(lam), "D")
        )
        assert total == want


def test_group_action_structure():
    rng = random.Random(12)
    els = signed_permutations(3)
    for _ in range(30):
        w1, w2 = rng.choice(els), rng.choice(els)
        v = tuple(F(rng.randrange(-3, 4)) for _ in range(3))
        assert sp_apply(sp_compose(w1, w2), v) == sp_apply(w1, sp_apply(w2, v))
        assert sp_apply(sp_inverse(w1), sp_apply(w1, v)) == v


def test_invariant_dimension_examples():
    assert invariant_dimension([[2]], [[[-1]]]) == 2
    gens = [sp_matrix(g) for g in hyperoctahedral_generators(2)]
    assert invariant_dimension([[2, 0], [0, 2]], gens) == 3
    assert invariant_dimension([[4, 1], [1, 4]], []) == 15


def test_invariant_dimension_validates_inputs():
    with pytest.raises(ValueError):
        invariant_dimension([[2, 0], [0, 2]], [[[1, 1], [0, 1]]])  # not an isometry
    with pytest.raises(ValueError):
        invariant_dimension([[1]], [])  # odd diagonal
    with pytest.raises(ValueError):
        invariant_dimension([[-2]], [])  # not positive definite


def test_theta_rank_oracle_basic():
    assert theta_symmetrization_rank([[2]], [[[-1]]]) == 2
    gens = [sp_matrix(g) for g in hyperoctahedral_generators(2)]
    assert theta_symmetrization_rank([[2, 0], [0, 2]], gens) == 3


def test_automorphism_group_preserves():
    Q = [[2, 1], [1, 2]]
    auts = automorphism_group(Q)
    assert len(auts) == 12  # the hexagonal lattice
    assert invariant_dimension(Q, auts) == theta_symmetrization_rank(Q, auts)
