from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtmlab.errors import ExtArithmeticError, InputError
from dtmlab.extreal import INF, NEG_INF, csv_fields, ext_sum, format_value, parse_value

finite = st.fractions(min_value=-100, max_value=100, max_denominator=12)
pos_side = st.one_of(finite, st.just(INF))


def test_parse_forms():
    assert parse_value(3) == 3
    assert parse_value("3/6") == Fraction(1, 2)
    assert parse_value("inf") is INF
    assert parse_value("-inf") is NEG_INF


@pytest.mark.parametrize("raw", [1.5, True, "abc", None, "1/0"])
def test_parse_rejects(raw):
    with pytest.raises(InputError):
        parse_value(raw)


def test_mixed_infinities_raise():
    with pytest.raises(ExtArithmeticError):
        INF + NEG_INF
    with pytest.raises(ExtArithmeticError):
        ext_sum([1, INF, NEG_INF])


def test_zero_times_infinity_is_zero():
    assert INF * 0 == 0
    assert NEG_INF * Fraction(-2) is INF


def test_format_and_csv():
    assert format_value(Fraction(4, 2)) == 2
    assert format_value(Fraction(1, 3)) == "1/3"
    assert format_value(INF) == "inf"
    assert csv_fields(NEG_INF) == (0, 1, -1)
    assert csv_fields(Fraction(-3, 4)) == (-3, 4, 0)


@given(finite)
def test_order_places_infinities_at_the_ends(x):
    assert NEG_INF < x < INF
    assert max(x, INF) is INF and min(x, NEG_INF) is NEG_INF


@given(pos_side, pos_side, pos_side)
def test_one_sided_addition_is_associative_and_commutative(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)


@given(st.one_of(finite, st.just(INF), st.just(NEG_INF)))
def test_format_parse_roundtrip(x):
    assert parse_value(format_value(x)) == x
