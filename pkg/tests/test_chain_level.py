import itertools
import random
from fractions import Fraction as F

import pytest

from interlevel.algebra import LaurentPoly
from interlevel.chain_level import (
    BlockSummand,
    block_decomposition,
    declared_summands,
    full_barcode,
    hk_cone_direct,
    hk_dim,
    hk_rank,
    homology_fmp,
    lambda_homology,
    load_blocks,
    make_block,
    spectra,
    sum_blocks,
    torsion_dims,
)
from interlevel.pl_geometry import (
    PLFunction,
    SimplicialComplex,
    chain_level_fmp,
    fixture_path,
    interlevel_homology,
    load_fixture,
    polygon,
)

from conftest import ring
from oracles import closed_form_hk, inclusion_rank

GRID = [F(i, 3) - F(1, 7) for i in range(-4, 7)]


def circle4():
    p = load_fixture("circle")
    return p.X, p.f


def test_point_constant():
    X = SimplicialComplex([(0,)])
    CP = chain_level_fmp(X, PLFunction({0: 0}))
    assert spectra(CP) == {0: [(0, 0)]}
    assert lambda_homology(CP, 0).torsion_dim == 0


def test_pm_spectrum():
    R = ring("Q", 1)
    CP = make_block("PM", R, a=F(7, 3), b=F(1, 2), k=2)
    assert spectra(CP) == {2: [(F(1, 3), F(1, 2) - F(7, 3))]}


def test_pr_torsion():
    R = ring("Q", 1)
    x1 = LaurentPoly.from_dict(R.field, {0: -1, 1: 1})
    CP = make_block("PR", R, T=[x1], k=1)
    assert torsion_dims(CP) == {1: 1}
    assert homology_fmp(CP, 1).rank == 0
    two = make_block("PR", R, T=[x1, x1 * x1], k=1)
    assert sorted(two.dims) == [1, 2]
    D = two.boundary(2)
    assert D[0][1] == R.zero() and D[1][0] == R.zero()
    assert torsion_dims(two) == {1: 3}
    with pytest.raises(ValueError):
        make_block("PR", ring("Q"), T=[1], k=0)


def test_block_shapes():
    R = ring("Q")
    pe = make_block("PEup", R, a=0, L=1, k=0)
    assert pe.dims == {} and pe.up.values == {0: [0], 1: [1]}
    pm = make_block("PM", R, a=0, b=0, k=0)
    assert pm.phi_up[0] == [[pm.up.domain.one()]]
    assert pm.up.values[0] == [0] and pm.down.values[0] == [0]


def test_full_barcode_examples():
    X, f = circle4()
    fb = full_barcode(chain_level_fmp(X, f))
    assert sorted((b.degree, b.kind, b.a, b.b) for b in fb.bars) == [(0, "closed", 0, 1), (0, "open", 0, 1)]
    R = ring("Q", 1)
    fb = full_barcode(make_block("PEup", R, a=F(3, 2), L=F(1, 3), k=1))
    assert [(b.degree, b.kind, b.a, b.b) for b in fb.bars] == [(1, "half_up", F(1, 2), F(5, 6))]


def test_circle_identity_full_barcode():
    p = load_fixture("circle_identity")
    CP = chain_level_fmp(p.X, p.f)
    fb = full_barcode(CP)
    assert fb.torsion == {0: 1} and fb.bars == []
    for a, b in ((F(1, 7), F(5, 7)), (F(-1, 5), F(9, 5))):
        want = interlevel_homology(p.X, p.f, a, b)
        assert [hk_dim(CP, k, -a, b) for k in range(2)] == want


def test_block_decomposition_examples():
    R = ring("Q", 1)
    x1 = LaurentPoly.from_dict(R.field, {0: -1, 1: 1})
    assert block_decomposition(make_block("PR", R, T=[x1, x1 * x1], k=1)) == [BlockSummand(1, "torsion", dim=3)]
    pm = block_decomposition(make_block("PM", R, a=0, b=2, k=1))
    assert pm == [BlockSummand(0, "ess_open", 0, 2), BlockSummand(1, "ess_closed", 0, 2)]
    items = [make_block("PM", R, a=0, b=2, k=1), make_block("PEup", R, a=F(1, 2), L=1, k=0)]
    union = sorted(block_decomposition(items[0]) + block_decomposition(items[1]))
    assert block_decomposition(sum_blocks(items)) == union


def test_declared_summands_match_fixture():
    path = fixture_path("block_mixed")
    import json

    data = json.loads(path.read_text())
    CP = load_blocks(data)
    assert block_decomposition(CP) == declared_summands(data["blocks"], CP.ring)


@pytest.mark.parametrize("params", [(0, 1), (F(1, 2), -2), (2, 2), (-1, F(1, 3))])
def test_pm_cone_and_closed_form(params):
    R = ring("Q")
    a, b = params
    CP = make_block("PM", R, a=a, b=b, k=0)
    for s, t in itertools.product(GRID, GRID):
        for k in (-1, 0):
            got = hk_dim(CP, k, s, t)
            assert got == hk_cone_direct(CP, k, s, t)
            assert got == closed_form_hk("PM", (a, b), s, t, k=k)


def test_peup_pedown_closed_forms():
    for lam in (None, 1, F(3, 2)):
        R = ring("Q", lam)
        up = make_block("PEup", R, a=F(1, 3), L=F(5, 2), k=0)
        down = make_block("PEdown", R, b=F(1, 3), L=F(5, 2), k=0)
        for s, t in itertools.product(GRID, GRID):
            assert hk_dim(up, 0, s, t) == closed_form_hk("PEup", (F(1, 3), F(5, 2)), s, t, lam)
            assert hk_dim(down, 0, s, t) == closed_form_hk("PEdown", (F(1, 3), F(5, 2)), s, t, lam)


def test_cone_direct_needs_trivial_gamma():
    R = ring("Q", 1)
    with pytest.raises(NotImplementedError):
        hk_cone_direct(make_block("PM", R, a=0, b=1, k=0), 0, 0, 0)


def test_zero_length_blocks_change_nothing():
    R = ring("Q", 1)
    base = sum_blocks([make_block("PM", R, a=0, b=F(3, 2), k=0), make_block("PEup", R, a=F(1, 4), L=1, k=1)])
    padded = sum_blocks([base, make_block("PEup", R, a=F(1, 2), L=0, k=0), make_block("PEdown", R, b=1, L=0, k=1)])
    for s, t in itertools.product(GRID, GRID):
        for k in (-1, 0, 1):
            assert hk_dim(base, k, s, t) == hk_dim(padded, k, s, t)


def test_circle_height_matches_oracle():
    X, f = circle4()
    CP = chain_level_fmp(X, f)
    for s, t in itertools.product(GRID, GRID):
        if s + t <= 0:
            continue
        want = interlevel_homology(X, f, -s, t)
        assert [hk_dim(CP, k, s, t) for k in range(2)] == want
        assert [hk_cone_direct(CP, k, s, t) for k in range(2)] == want


def test_hk_rank_matches_inclusion_oracle():
    rng = random.Random(6)
    X = SimplicialComplex.from_maximal(polygon(6))
    f = PLFunction({v: F(rng.randint(0, 40), 8) for v in X.vertices})
    CP = chain_level_fmp(X, f)
    ends = [F(i, 2) + F(1, 11) for i in range(-1, 12)]
    windows = [(a, b) for a in ends for b in ends if a < b]
    rng.shuffle(windows)
    for (a, b) in windows[:15]:
        for (a2, b2) in [(a - F(1, 2), b), (a, b + 1), (a - 1, b + F(3, 2))]:
            for k in range(2):
                got = hk_rank(CP, k, (-a, b), (-a2, b2))
                assert got == inclusion_rank(X, f.theta, (a, b), (a2, b2), k)


def test_hk_rank_requires_order():
    R = ring("Q")
    with pytest.raises(ValueError):
        hk_rank(make_block("PM", R, a=0, b=1, k=0), 0, (1, 1), (0, 1))


def test_euler_consistency():
    for name in ("torus", "sphere", "genus2_nested"):
        p = load_fixture(name)
        CP = chain_level_fmp(p.X, p.f)
        for a, b in ((F(-1, 13), F(30, 13)), (F(17, 13), F(47, 13)), (F(3, 13), F(4, 13))):
            dims = interlevel_homology(p.X, p.f, a, b)
            chi = sum((-1) ** k * hk_dim(CP, k, -a, b) for k in range(3))
            assert chi == sum((-1) ** k * d for k, d in enumerate(dims))
