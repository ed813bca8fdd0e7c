"""Exact extended reals: ints/Fractions plus two infinity singletons.

Finite values stay plain ``int`` or ``Fraction`` so ordinary arithmetic is
fast; only the two infinities are custom objects.  Mixed-sign infinite sums
raise :class:`ExtArithmeticError` instead of producing NaN.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import ExtArithmeticError, InputError


class Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self) -> str:
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"

    def __hash__(self) -> int:
        return hash(("inf", self.sign))

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity) and other.sign == self.sign

    def __lt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other) -> bool:
        return self == other or self > other

    def __neg__(self) -> "Infinity":
        return NEG_INF if self.sign > 0 else INF

    def __pos__(self) -> "Infinity":
        return self

    def __abs__(self) -> "Infinity":
        return INF

    def __add__(self, other):
        if isinstance(other, Infinity) and other.sign != self.sign:
            raise ExtArithmeticError("inf + (-inf) is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Infinity):
            return INF if self.sign == other.sign else NEG_INF
        if other == 0:
            return 0
        return self if other > 0 else -self

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return True


INF = Infinity(1)
NEG_INF = Infinity(-1)

ExtValue = Union[int, Fraction, Infinity]


def is_inf(x) -> bool:
    return isinstance(x, Infinity)


def is_finite(x) -> bool:
    return not isinstance(x, Infinity)


def normalize(x) -> ExtValue:
    """Collapse integral Fractions to int; pass infinities through."""
    if isinstance(x, Infinity):
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return normalize(Fraction(x.numerator, x.denominator))
    raise InputError(f"not an exact value: {x!r}")


def ext_sum(values) -> ExtValue:
    total: ExtValue = 0
    for v in values:
        total = total + v
    return normalize(total)


def ext_max(a, b):
    return a if a >= b else b


def ext_min(a, b):
    return a if a <= b else b


def parse_value(raw) -> ExtValue:
    """Parse an int, ``"p/q"`` string, ``"inf"`` or ``"-inf"``."""
    if isinstance(raw, Infinity):
        return raw
    if isinstance(raw, bool):
        raise InputError(f"boolean is not a value: {raw!r}")
    if isinstance(raw, (int, Fraction)):
        return normalize(raw)
    if isinstance(raw, float):
        raise InputError("floats are not accepted; use an int or a 'p/q' string")
    if isinstance(raw, str):
        s = raw.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return NEG_INF
        try:
            return normalize(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse value {raw!r}") from exc
    raise InputError(f"cannot parse value {raw!r}")


def format_value(x) -> int | str:
    """JSON form: ints stay ints, fractions become ``"p/q"``, infinities ``"inf"``/``"-inf"``."""
    if isinstance(x, Infinity):
        return str(x)
    x = normalize(x)
    if isinstance(x, int):
        return x
    return f"{x.numerator}/{x.denominator}"


def csv_fields(x) -> tuple[int, int, int]:
    """(num, den, inf_flag) with inf_flag in {-1, 0, 1}; infinities carry num=0, den=1."""
    if isinstance(x, Infinity):
        return 0, 1, x.sign
    f = Fraction(x)
    return f.numerator, f.denominator, 0
