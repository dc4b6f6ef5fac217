from fractions import Fraction as F

import pytest

from interlevel.algebra import (
    GF,
    INF,
    NEG_INF,
    Field,
    LaurentPoly,
    conjugate,
    det_ring,
    fraction_str,
    series_window,
    truncate_hat,
    valuation,
)

from conftest import ring

QQ = Field.parse("Q")


def poly(terms):
    return LaurentPoly.from_dict(QQ, terms)


@pytest.fixture
def novikov():
    R = ring("Q", 1)
    return R.novikov("up"), R.novikov("down")


def test_valuation_examples(novikov):
    up, down = novikov
    x = poly({2: 1, 5: 3})
    assert valuation(up(x)) == 2
    assert valuation(down(x)) == 5
    assert valuation(up.zero()) == INF
    assert valuation(down.zero()) == NEG_INF
    assert valuation(up.fraction(poly({0: 1}), poly({0: 1, 1: -1}))) == 0


def test_valuation_scales_with_lambda0():
    up = ring("Q", F(1, 2)).novikov("up")
    assert valuation(up(poly({3: 1}))) == F(3, 2)


def test_conjugate_examples(novikov):
    up, down = novikov
    assert conjugate(poly({3: 2, -1: -1})) == poly({-3: 2, 1: -1})
    x = up.fraction(poly({0: 1}), poly({0: 1, 1: -1}))
    y = conjugate(x)
    assert not y.up
    assert y == down.fraction(poly({0: 1}), poly({0: 1, -1: -1}))
    assert conjugate(y) == x


def test_series_window_examples(novikov):
    up, down = novikov
    geo = up.fraction(poly({0: 1}), poly({0: 1, 1: -1}))
    assert series_window(geo, 0, 3) == poly({0: 1, 1: 1, 2: 1, 3: 1})
    assert series_window(up(poly({2: 1})), 3, 5) == poly({})
    geo_down = down.fraction(poly({0: 1}), poly({0: 1, -1: -1}))
    assert series_window(geo_down, -2, 0) == poly({0: 1, -1: 1, -2: 1})


def test_truncate_hat_examples(novikov):
    up, down = novikov
    assert truncate_hat(down(poly({-2: 1, 0: 1, 1: 1})), 0) == poly({0: 1, 1: 1})
    geo = up.fraction(poly({0: 1}), poly({0: 1, 1: -1}))
    assert truncate_hat(geo, 2) == poly({0: 1, 1: 1, 2: 1})
    x = poly({-1: 2, 4: 1})
    assert truncate_hat(up(x), 10) == x
    assert truncate_hat(down(x), -10) == x


def test_gf_arithmetic():
    a, b = GF(3, 5), GF(4, 5)
    assert a + b == GF(2, 5)
    assert a * b == GF(2, 5)
    assert a / b * b == a
    assert a ** -1 * a == GF(1, 5)
    with pytest.raises(ZeroDivisionError):
        GF(0, 5) ** -1


def test_field_parse():
    assert Field.parse("GF2").p == 2
    assert Field.parse("F5").p == 5
    assert Field.parse("Q").p == 0
    with pytest.raises(ValueError):
        Field.parse("GF4")


def test_group_ring_units_and_quotients():
    R = ring("Q", 1)
    assert R.is_unit(R.monomial(3, -2))
    assert not R.is_unit(poly({0: -1, 1: 1}))
    assert R.quotient_dim(poly({0: 1, 1: -2, 2: 1})) == 2
    M = [[poly({0: 1, 1: 1}), poly({})], [poly({}), poly({0: 1})]]
    assert det_ring(M, R.zero(), R.one()) == poly({0: 1, 1: 1})


def test_count_in_half_open():
    Z = ring("Q", 1).gamma
    assert Z.count_in(F(0), F(2), True, False) == 2
    assert Z.count_in(F(0), F(2), False, True) == 2
    assert Z.count_in(F(1, 2), F(1, 2)) == 0
    trivial = ring("Q").gamma
    assert trivial.count_in(F(-1), F(0), True, True) == 1
    assert trivial.count_in(F(-1), F(0), True, False) == 0


def test_fraction_serialization():
    assert fraction_str(F(3)) == "3/1"
    assert fraction_str(F(-2, 6)) == "-1/3"
