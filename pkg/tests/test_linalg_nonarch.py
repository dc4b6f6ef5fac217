import random
from fractions import Fraction as F

import pytest

from interlevel.algebra import INF, NEG_INF, LaurentPoly, mat_mul
from interlevel.linalg_nonarch import (
    FloerComplex,
    OrthoSpace,
    concise_barcode,
    homology_ortho,
    is_orthogonal,
    orthogonalize,
    rho,
    smith_normal_form,
    svd_floer,
)
from interlevel.matched_pair import random_unimodular

from conftest import ring


def test_rho_examples():
    up = ring("Q", 1).novikov("up")
    V = OrthoSpace(up, [0, 2])
    T3 = up(LaurentPoly.from_dict(up.field, {3: 1}))
    assert rho(V.vector([1, 1])) == 2
    assert rho(V.vector([T3, 0])) == -3
    assert rho(V.vector([0, 0])) == NEG_INF
    down = ring("Q", 1).novikov("down")
    assert rho(OrthoSpace(down, [0]).vector([0])) == INF


def test_orthogonalize_examples():
    up = ring("Q").novikov("up")
    V = OrthoSpace(up, [0, 0])
    outs, c = orthogonalize([V.vector([1, 0]), V.vector([1, 1])])
    assert is_orthogonal(outs)
    assert outs[0].coords == [1, 0] and outs[1].coords == [0, 1]
    fixed = [V.vector([1, 0]), V.vector([0, 1])]
    outs, c = orthogonalize(fixed)
    assert outs == fixed and c[1][0] == 0
    with pytest.raises(ValueError, match="not independent"):
        orthogonalize([V.vector([1, 0]), V.vector([2, 0])])


def test_orthogonalize_singleton_rank_one():
    up = ring("Q", 1).novikov("up")
    v = OrthoSpace(up, [0]).vector([1])
    outs, _ = orthogonalize([v])
    assert outs == [v]


def test_is_orthogonal_examples():
    up = ring("Q").novikov("up")
    V = OrthoSpace(up, [0, 0])
    assert is_orthogonal([V.vector([1, 0])])
    assert is_orthogonal([V.vector([1, 0]), V.vector([1, 1])])
    W = OrthoSpace(up, [1, 1])
    assert is_orthogonal([W.vector([1, 0]), W.vector([1, 1])])
    with pytest.raises(ValueError):
        is_orthogonal([W.vector([1, 0]), W.vector([1, 0])])
    # values (0, 1): (1,1) is not orthogonal to (0,1) since (1,1) − (0,1) drops to 0
    U = OrthoSpace(up, [0, 1])
    assert not is_orthogonal([U.vector([0, 1]), U.vector([1, 1])])


def _triangle_complex(values0, values1, up=True):
    dom = ring("Q").novikov("up" if up else "down")
    # edges 01, 02, 12
    d1 = [[-1, -1, 0], [1, 0, -1], [0, 1, 1]]
    return FloerComplex(dom, {0: values0, 1: values1}, {1: d1})


def test_svd_zero_differential():
    up = ring("Q").novikov("up")
    C = FloerComplex(up, {0: [0, 3], 1: [1]})
    bars = concise_barcode(svd_floer(C))
    assert [(b.degree, b.kind, b.a) for b in bars] == [(0, "inf_up", 0), (0, "inf_up", 3), (1, "inf_up", 1)]


def test_elementary_complex_bar():
    up = ring("Q", 1).novikov("up")
    C = FloerComplex(up, {0: [F(5, 2)], 1: [F(9, 2)]}, {1: [[1]]})
    svd = svd_floer(C)
    assert svd.verbose_barcode() == [(0, F(1, 2), 2)]
    bars = concise_barcode(svd)
    assert len(bars) == 1 and (bars[0].kind, bars[0].a, bars[0].b) == ("half_up", F(1, 2), F(5, 2))
    assert concise_barcode(svd_floer(FloerComplex(up, {0: [1], 1: [1]}, {1: [[1]]}))) == []


def test_triangle_boundary_constant():
    svd = svd_floer(_triangle_complex([0, 0, 0], [0, 0, 0]))
    verbose = svd.verbose_barcode()
    assert sorted((k, ell) for k, _, ell in verbose) == [(0, 0), (0, 0), (0, INF), (1, INF)]
    bars = concise_barcode(svd)
    assert [(b.degree, b.kind, b.a) for b in bars] == [(0, "inf_up", 0), (1, "inf_up", 0)]


def test_homology_ortho_circle_heights():
    # vertices 0, 1/3, 2/3; edge values are maxima
    C = _triangle_complex([0, F(1, 3), F(2, 3)], [F(1, 3), F(2, 3), F(2, 3)])
    H = homology_ortho(C)
    assert H[0].space.values == [0]
    assert H[1].space.values == [F(2, 3)]


def test_homology_ortho_trivial_cases():
    up = ring("Q").novikov("up")
    H = homology_ortho(FloerComplex(up, {0: [1, 2]}))
    assert H[0].space.values == [1, 2]
    acyclic = homology_ortho(FloerComplex(up, {0: [0], 1: [1]}, {1: [[1]]}))
    assert all(h.space.dim == 0 for h in acyclic.values())


def test_down_complex_barcode():
    down = ring("Q").novikov("down")
    C = FloerComplex(down, {0: [2], 1: [0]}, {1: [[1]]})
    bars = concise_barcode(svd_floer(C))
    assert [(b.kind, b.a, b.b) for b in bars] == [("half_down", 0, 2)]


def test_snf_examples():
    R = ring("Q", 1)
    x1 = LaurentPoly.from_dict(R.field, {0: -1, 1: 1})
    res = smith_normal_form([[x1]], R)
    assert res.torsion == [(R.normal_associate(x1)[0], 1)]
    eye = [[R.one(), R.zero()], [R.zero(), R.one()]]
    res = smith_normal_form(eye, R)
    assert res.rank == 2 and res.torsion == []


def test_snf_planted_invariant_factors():
    R = ring("Q", 1)
    x1 = LaurentPoly.from_dict(R.field, {0: -1, 1: 1})
    D = [[x1, R.zero()], [R.zero(), x1 * x1]]
    rng = random.Random(4)
    for trial in range(5):
        A = random_unimodular(R, 2, rng)
        B = random_unimodular(R, 2, rng)
        M = mat_mul(mat_mul(A, D, R.zero()), B, R.zero())
        res = smith_normal_form(M, R, seed=trial)
        assert sorted(f.span() for f, _ in res.torsion) == [1, 2]
        assert [dim for _, dim in res.torsion] == [1, 2]
        assert mat_mul(mat_mul(res.U, res.D, R.zero()), res.V, R.zero()) == M
