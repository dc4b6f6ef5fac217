from fractions import Fraction

import pytest

from interlevel.algebra import Field, GroupRing, TranslationGroup


def ring(field="Q", lam=None) -> GroupRing:
    return GroupRing(Field.parse(field), TranslationGroup(None if lam is None else Fraction(lam)))


@pytest.fixture
def QZ():
    return ring("Q", 1)


@pytest.fixture
def Q0():
    return ring("Q")
