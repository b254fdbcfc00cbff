from fractions import Fraction

import pytest

from tropmarg.semiring import (
    MUL_NEUTRAL,
    NEG_INF,
    POS_INF,
    SemiringKind,
    add_neutral,
    as_scalar,
    is_finite,
    s_add,
    s_le,
    s_lt,
    s_max,
    s_min,
    s_mul,
    s_neg,
    s_sub,
)

MIN = SemiringKind.MIN_PLUS
MAX = SemiringKind.MAX_PLUS


def test_kind_duality():
    assert MIN.dual is MAX
    assert MAX.dual is MIN
    assert str(MIN) == "min-plus"
    assert str(MAX) == "max-plus"


def test_as_scalar_normalizes():
    assert as_scalar(3) == 3
    assert as_scalar(Fraction(6, 2)) == 3
    assert isinstance(as_scalar(Fraction(6, 2)), int)
    assert as_scalar(Fraction(1, 3)) == Fraction(1, 3)
    assert as_scalar(POS_INF) is POS_INF


@pytest.mark.parametrize("junk", [1.5, float("inf"), True, "3", None])
def test_as_scalar_rejects(junk):
    with pytest.raises(TypeError):
        as_scalar(junk)


def test_order_with_infinities():
    assert s_lt(NEG_INF, -(10**9))
    assert s_lt(10**9, POS_INF)
    assert not s_lt(POS_INF, POS_INF)
    assert s_le(NEG_INF, NEG_INF)
    assert s_min(POS_INF, 5) == 5
    assert s_max(NEG_INF, Fraction(-1, 2)) == Fraction(-1, 2)


def test_semiring_sum_picks_by_kind():
    assert s_add(MIN, 2, 7) == 2
    assert s_add(MAX, 2, 7) == 7
    assert s_add(MIN, POS_INF, 7) == 7
    assert s_add(MAX, NEG_INF, 7) == 7


def test_neutrals():
    assert add_neutral(MIN) is POS_INF
    assert add_neutral(MAX) is NEG_INF
    assert MUL_NEUTRAL == 0
    assert s_mul(MUL_NEUTRAL, 11) == 11


def test_mul_absorbs_infinity():
    assert s_mul(POS_INF, 4) is POS_INF
    assert s_mul(-3, NEG_INF) is NEG_INF
    assert s_mul(POS_INF, POS_INF) is POS_INF
    with pytest.raises(ArithmeticError):
        s_mul(POS_INF, NEG_INF)


def test_mul_keeps_exactness():
    x = s_mul(Fraction(1, 3), Fraction(2, 3))
    assert x == 1 and isinstance(x, int)


def test_negation_and_subtraction():
    assert s_neg(5) == -5
    assert s_neg(POS_INF) is NEG_INF
    assert s_sub(Fraction(1, 2), 2) == Fraction(-3, 2)
    with pytest.raises(ArithmeticError):
        s_sub(POS_INF, 1)
    with pytest.raises(ArithmeticError):
        s_sub(0, NEG_INF)


def test_is_finite():
    assert is_finite(0) and is_finite(Fraction(7, 3))
    assert not is_finite(POS_INF) and not is_finite(NEG_INF)
