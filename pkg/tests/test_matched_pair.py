import random
from fractions import Fraction as F

import pytest

from interlevel.algebra import LaurentPoly, det, identity
from interlevel.linalg_nonarch import FiltVector, is_orthogonal
from interlevel.matched_pair import (
    FilteredMatchedPair,
    LabeledBCM,
    apply_map,
    basis_spectrum,
    check_strong_matching,
    doubly_orthogonal_basis,
    dual_pair,
    gaps,
    is_doubly_orthogonal,
    misalignment,
    planted_pair,
    random_unimodular,
    reduce_lbcm,
    replay_log,
    spectrum_records,
    standard_pair,
    triconstruct,
)
from interlevel.pn_structure import matched_pair_at_degree, multiplication_structure

from conftest import ring


def test_triconstruct_identity_pair():
    R = ring("Q")
    P = standard_pair(R, [0, 1], [3, 1])
    xs, ys, L = triconstruct(P)
    eye = identity(2, R.zero(), R.one())
    assert xs == eye and ys == eye
    assert L.is_identity(R)
    assert L.xi == [0, 1] and L.eta == [3, 1]


def test_triconstruct_scrambled_postconditions():
    R = ring("Q", 1)
    rng = random.Random(11)
    P, _ = planted_pair(R, rng)
    xs, ys, L = triconstruct(P)
    assert is_orthogonal([P.up_vector(x) for x in xs])
    assert is_orthogonal([P.down_vector(y) for y in ys])
    for i in range(L.size):
        assert L.M[i][i] == R.one()
        assert all(not L.M[i][j] for j in range(i))


def test_misalignment_examples():
    assert misalignment(LabeledBCM([[1]], [F(0)], [F(5)])) == 0
    assert misalignment(LabeledBCM([[1, 0], [0, 1]], [F(0), F(0)], [F(3), F(1)])) == 2
    assert misalignment(LabeledBCM([[1, 0], [0, 1]], [F(1), F(2)], [F(2), F(3)])) == 0


def test_reduce_identity_is_noop():
    R = ring("Q")
    P = standard_pair(R, [0, 2], [1, 1])
    xs, ys, L = triconstruct(P)
    final, e, log = reduce_lbcm(L, xs, ys, R)
    assert log == [] and e == ys


def test_log_replay_and_misalignment_monotone():
    R = ring("Q", 1)
    rng = random.Random(5)
    for _ in range(10):
        P, want = planted_pair(R, rng)
        xs, ys, L = triconstruct(P)
        final, e, log = reduce_lbcm(L, xs, ys, R)
        replayed, mis = replay_log(L, log, R)
        assert replayed.is_identity(R)
        assert all(b <= a for a, b in zip(mis, mis[1:]))
        assert sorted((R.gamma.normalize(x), y - x) for x, y in zip(final.xi, final.eta)) == want


def test_single_block_spectrum():
    R = ring("Q", 1)
    B = doubly_orthogonal_basis(standard_pair(R, [F(7, 2)], [F(1, 2)]))
    assert B.up_values == [F(7, 2)] and B.down_values == [F(1, 2)]
    assert basis_spectrum(standard_pair(R, [F(7, 2)], [F(1, 2)])) == [(F(1, 2), -3)]


def test_scrambled_sums_doubly_orthogonal():
    for lam in (None, 1):
        R = ring("Q", lam)
        rng = random.Random(2)
        for _ in range(10):
            P, _ = planted_pair(R, rng)
            B = doubly_orthogonal_basis(P)
            assert is_doubly_orthogonal(P, B.basis)
            assert is_orthogonal([FiltVector(P.up_space, apply_map(P.up, P.Phi_up, v)) for v in B.basis])
            assert is_orthogonal([FiltVector(P.down_space, apply_map(P.down, P.Phi_down, v)) for v in B.basis])


def test_spectrum_and_gaps_examples():
    R = ring("Q")
    P = standard_pair(R, [0, 1], [3, 1])
    assert basis_spectrum(P) == [(0, 3), (1, 0)]
    assert gaps(P) == [3, 0]


def test_weakdualstrict_gap():
    R = ring("Q", 1)
    alpha = LaurentPoly.from_dict(R.field, {1: 1, -1: 1})
    P = matched_pair_at_degree(multiplication_structure(R, alpha), 0)
    assert gaps(P) == [-1]


def test_dual_spectrum():
    R = ring("Q", 1)
    P = standard_pair(R, [0], [3])
    assert basis_spectrum(dual_pair(P)) == [(0, -3)]
    R0 = ring("Q")
    assert basis_spectrum(dual_pair(standard_pair(R0, [0], [3]))) == [(3, -3)]


def test_dual_gap_equality():
    R = ring("Q", 1)
    rng = random.Random(8)
    for _ in range(10):
        P, _ = planted_pair(R, rng, max_blocks=4)
        g, gd = gaps(P), gaps(dual_pair(P))
        d = len(g)
        assert all(g[i] == -gd[d - 1 - i] for i in range(d))


def test_matching_examples():
    Z = ring("Q", 1).gamma
    S = [(F(0), F(3)), (F(1, 2), F(-1))]
    assert check_strong_matching(S, S, 0, Z)[0]
    eps = F(1, 10)
    shifted = sorted((Z.normalize(a + eps), ell) for a, ell in S)
    assert check_strong_matching(S, shifted, eps, Z)[0]
    assert not check_strong_matching([(F(0), F(3))], [(F(0), F(0))], 1, Z)[0]
    assert not check_strong_matching(S, S[:1], 5, Z)[0]


def test_matching_uses_translations():
    Z = ring("Q", 1).gamma
    assert check_strong_matching([(F(0), F(1))], [(F(9, 10), F(1))], F(1, 10), Z)[0]
    trivial = ring("Q").gamma
    assert not check_strong_matching([(F(0), F(1))], [(F(9, 10), F(1))], F(1, 10), trivial)[0]


def test_seed_invariance():
    R = ring("GF5", 1)
    rng = random.Random(3)
    for _ in range(5):
        P, want = planted_pair(R, rng)
        assert basis_spectrum(P, seed=1) == basis_spectrum(P, seed=2) == want


def test_degenerate_pair_rejected():
    R = ring("Q")
    up, down = R.novikov("up"), R.novikov("down")
    from interlevel.linalg_nonarch import OrthoSpace

    with pytest.raises(ValueError, match="degenerate pair"):
        FilteredMatchedPair(R, [[1, 1], [1, 1]], OrthoSpace(up, [0, 0]), [[1, 0], [0, 1]], OrthoSpace(down, [0, 0]))


def test_spectrum_records():
    recs = spectrum_records([(F(0), F(1)), (F(0), F(1)), (F(1, 2), F(0))])
    assert recs == [
        {"a": "0/1", "ell": "1/1", "multiplicity": 2},
        {"a": "1/2", "ell": "0/1", "multiplicity": 1},
    ]


def test_random_unimodular_invertible_in_characteristic_two():
    R = ring("GF2")
    rng = random.Random(0)
    for _ in range(50):
        G = random_unimodular(R, 3, rng)
        assert det(G, R.zero(), R.one()) == R.one()


def test_truncated_and_exact_z_agree():
    R = ring("Q", 1)
    rng = random.Random(9)
    for _ in range(10):
        P, want = planted_pair(R, rng, max_blocks=4)
        xs, ys, L = triconstruct(P)
        for exact in (False, True):
            final, e, _ = reduce_lbcm(L, xs, ys, R, exact_z=exact)
            assert final.is_identity(R)
            assert sorted((R.gamma.normalize(x), y - x) for x, y in zip(final.xi, final.eta)) == want


def test_misalignment_drops_at_every_compression():
    R = ring("Q", 1)
    rng = random.Random(12)
    seen = 0
    for _ in range(15):
        P, _ = planted_pair(R, rng, max_blocks=4)
        xs, ys, L = triconstruct(P)
        _, _, log = reduce_lbcm(L, xs, ys, R)
        for i, op in enumerate(log):
            if op["op"] != "A5":
                continue
            assert [o["op"] for o in log[i:i + 4]] == ["A5", "A1", "A2", "A2"]
            before, _ = replay_log(L, log[:i], R)
            after, _ = replay_log(L, log[:i + 4], R)
            assert misalignment(after) < misalignment(before)
            seen += 1
    assert seen > 0
