import json
import random
from collections import Counter
from fractions import Fraction as F

import pytest

from interlevel.algebra import TranslationGroup
from interlevel.chain_level import block_decomposition, spectra
from interlevel.corpus import all_fixtures, pl_fixtures
from interlevel.pl_geometry import (
    PLFunction,
    SimplicialComplex,
    betti_numbers,
    chain_level_fmp,
    circle_identity,
    cut_at_level,
    extended_persistence,
    fixture_path,
    grid_klein,
    grid_torus,
    interlevel_homology,
    is_regular,
    load_fixture,
    load_pl,
    materialize_window,
    surface,
    validate,
)

from oracles import betti_sympy

Z = TranslationGroup(F(1))


def test_validate_examples():
    tri = SimplicialComplex.from_maximal([(0, 1, 2)])
    wind = {(0, 1): 0, (1, 2): 0, (0, 2): 1}
    bad = validate(tri, PLFunction({0: 0, 1: 0, 2: 0}, Z, wind))
    assert not bad.valid and "cocycle" in bad.errors[0]
    hollow = SimplicialComplex.from_maximal([(0, 1), (1, 2), (0, 2)])
    assert validate(hollow, PLFunction({0: 0, 1: 0, 2: 0}, Z, wind)).valid
    assert validate(tri, PLFunction({0: 0, 1: 5, 2: 1})).valid
    assert not validate(SimplicialComplex([(0, 1)]), PLFunction({0: 0, 1: 1})).valid


def test_single_edge_pair():
    X = SimplicialComplex.from_maximal([(0, 1)])
    CP = chain_level_fmp(X, PLFunction({0: 0, 1: 1}))
    assert CP.up.values[1] == [1] and CP.down.values[1] == [0]
    assert CP.up.values[0] == [0, 1] == CP.down.values[0]


def test_circle_identity_boundary_has_one_deck_factor():
    p = circle_identity(3)
    CP = chain_level_fmp(p.X, p.f)
    exps = sorted(e.low for row in CP.boundary(1) for e in row if e)
    assert exps.count(0) == 5 and len(exps) == 6
    assert [e for e in exps if e] in ([1], [-1])


def test_disjoint_union_is_direct_sum():
    X = SimplicialComplex.from_maximal([(0, 1), (1, 2), (0, 2)])
    Y = X.disjoint_union(SimplicialComplex.from_maximal([(0, 1)]), offset=3)
    f = PLFunction({0: 0, 1: 2, 2: 1, 3: 5, 4: 4})
    sp = spectra(chain_level_fmp(Y, f))
    one = spectra(chain_level_fmp(X, PLFunction({0: 0, 1: 2, 2: 1})))
    two = spectra(chain_level_fmp(SimplicialComplex.from_maximal([(0, 1)]), PLFunction({0: 5, 1: 4})))
    assert sp[0] == sorted(one[0] + two[0]) and sp[1] == one[1]


def test_cut_examples():
    X = SimplicialComplex.from_maximal([(0, 1)])
    Y, vals = cut_at_level(X, {0: 0, 1: 1}, F(1, 2))
    assert len(Y.of_dim(1)) == 2 and vals[2] == F(1, 2)
    tri = SimplicialComplex.from_maximal([(0, 1, 2)])
    Y, vals = cut_at_level(tri, {0: 0, 1: 1, 2: 2}, F(1, 2))
    assert betti_numbers(Y) == betti_numbers(tri) == [1, 0, 0]
    assert all(all(vals[v] <= F(1, 2) for v in s) or all(vals[v] >= F(1, 2) for v in s) for s in Y.simplices)
    same, _ = cut_at_level(tri, {0: 0, 1: 1, 2: 2}, 7)
    assert set(same.simplices) == set(tri.simplices)


def test_interlevel_examples():
    p = load_fixture("circle")
    assert interlevel_homology(p.X, p.f, F(1, 4), F(3, 4)) == [2, 0]
    assert interlevel_homology(p.X, p.f, F(-1, 2), F(3, 2)) == [1, 1]
    with pytest.raises(ValueError, match="regular"):
        interlevel_homology(p.X, p.f, 0, F(1, 4))
    q = circle_identity(3)
    for a in (F(1, 7), F(-5, 11), F(13, 5)):
        assert interlevel_homology(q.X, q.f, a, a + F(4, 5)) == [1, 0]


def test_cover_shift_invariance():
    p = load_fixture("torus_circle")
    for a, b in ((F(1, 7), F(9, 7)), (F(2, 9), F(4, 9))):
        base = interlevel_homology(p.X, p.f, a, b, p.field)
        assert interlevel_homology(p.X, p.f, a + 1, b + 1, p.field) == base
        assert interlevel_homology(p.X, p.f, a - 2, b - 2, p.field) == base


def test_extended_persistence_examples():
    p = load_fixture("circle")
    ep = extended_persistence(p.X, p.f)
    assert ep.extended == [(0, 0, 1), (1, 1, 0)] and ep.ordinary == [] and ep.relative == []
    pt = extended_persistence(SimplicialComplex([(0,)]), PLFunction({0: 0}))
    assert pt.extended == [(0, 0, 0)]
    two = extended_persistence(SimplicialComplex([(0,), (1,)]), PLFunction({0: 0, 1: 1}))
    assert sorted(two.extended) == [(0, 0, 0), (0, 1, 1)]
    assert two.ordinary == two.relative == []


def test_extended_persistence_interval():
    p = load_fixture("interval")
    ep = extended_persistence(p.X, p.f)
    assert ep.ordinary == [(0, 1, 2)] and ep.relative == [(1, 2, 1)] and ep.extended == [(0, 0, 3)]


def test_surface_betti_numbers():
    for name, want in (("circle", [1, 1]), ("sphere", [1, 0, 1]), ("torus", [1, 2, 1]), ("genus2", [1, 4, 1])):
        X = surface(name)
        assert betti_numbers(X) == want
        assert [betti_sympy(X, k) for k in range(len(want))] == want
    K = SimplicialComplex.from_maximal(grid_klein(6, 3))
    assert betti_numbers(K, "GF2") == [1, 2, 1]
    assert betti_numbers(K, "Q") == [1, 1, 0]
    T = SimplicialComplex.from_maximal(grid_torus(6, 3))
    assert betti_numbers(T, "GF2") == [1, 2, 1]


def test_surfaces_are_closed_manifolds():
    for X in [surface(n) for n in ("sphere", "torus", "genus2")] + [
        SimplicialComplex.from_maximal(grid_torus(6, 3)),
        SimplicialComplex.from_maximal(grid_klein(6, 3)),
    ]:
        count = Counter(e for t in X.of_dim(2) for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])))
        assert set(count.values()) == {2} and len(count) == len(X.of_dim(1))


def test_materialize_window_values():
    p = circle_identity(3)
    Y, vals = materialize_window(p.X, p.f, F(-1, 2), F(3, 2))
    assert min(vals.values()) <= F(-1, 2) and max(vals.values()) >= F(3, 2)
    assert betti_numbers(Y) == [1, 0]


def test_is_regular_mod_lambda():
    p = circle_identity(3)
    assert not is_regular(p.f, F(4, 3))
    assert is_regular(p.f, F(1, 2))


def test_fixture_files_are_current():
    fresh = all_fixtures()
    for name, data in fresh.items():
        assert json.loads(fixture_path(name).read_text()) == json.loads(json.dumps(data)), name


def test_fixture_round_trip():
    for name, p in pl_fixtures().items():
        q = load_fixture(name)
        assert set(q.X.simplices) == set(p.X.simplices)
        assert q.f.theta == p.f.theta and q.f.windings == p.f.windings
        assert validate(q.X, q.f).valid


def test_load_pl_rejects_corrupted_winding():
    data = load_fixture("torus_circle").to_json()
    data["windings"][0][2] += 3
    p = load_pl(data)
    assert not validate(p.X, p.f).valid
    with pytest.raises(ValueError, match="invalid PL input"):
        chain_level_fmp(p.X, p.f)


def test_wavy_torus_has_finite_bars():
    p = load_fixture("torus_circle")
    kinds = Counter(b.kind for b in block_decomposition(chain_level_fmp(p.X, p.f)))
    assert kinds["fin_up"] == 2 and kinds["fin_down"] == 2 and kinds["torsion"] == 2


def test_random_functions_extended_persistence_tie_free():
    rng = random.Random(2)
    X = surface("sphere")
    for _ in range(3):
        vals = {v: F(rng.randint(0, 3)) for v in X.vertices}
        f = PLFunction(vals)
        ep = extended_persistence(X, f)
        sp = spectra(chain_level_fmp(X, f))
        assert sorted(ep.extended) == sorted((k, a, a + ell) for k, s in sp.items() for a, ell in s)
