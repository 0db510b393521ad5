"""Certified arithmetic around e^2.

Every quantity derived from e^2 is carried as a high-precision ``Decimal``
plus a rational bracket built from ``E2_LO < e^2 < E2_HI``. Floors are only
reported when both ends of the bracket, widened by ``FLOOR_GUARD``, agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

E2_LO = Fraction("7.389056098930649")
E2_HI = Fraction("7.389056098930651")
FLOOR_GUARD = Fraction(1, 10**9)
DIGITS = 50


class AmbiguousFloor(ArithmeticError):
    """The certified bracket straddles (or comes within the guard of) an integer."""


@dataclass(frozen=True)
class Certified:
    value: Decimal
    lower: Fraction
    upper: Fraction

    def __float__(self):
        return float(self.value)

    def floor(self) -> int:
        return certified_floor(self.lower, self.upper)


def e_squared() -> Decimal:
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        return +(Decimal(2).exp())


def scaled_e2(num: Fraction | int, *, inverse: bool = False) -> Certified:
    """``num * e^2`` or, with ``inverse``, ``num / e^2``, certified."""
    num = Fraction(num)
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        e2 = Decimal(2).exp()
        dnum = Decimal(num.numerator) / Decimal(num.denominator)
        value = dnum / e2 if inverse else dnum * e2
        ctx.prec = DIGITS
        value = +value
    if inverse:
        ends = (num / E2_HI, num / E2_LO)
    else:
        ends = (num * E2_LO, num * E2_HI)
    return Certified(value, min(ends), max(ends))


def certified_floor(lower: Fraction, upper: Fraction) -> int:
    lo = math.floor(lower - FLOOR_GUARD)
    hi = math.floor(upper + FLOOR_GUARD)
    if lo != hi:
        raise AmbiguousFloor(
            f"floor undetermined: value in [{float(lower)!r}, {float(upper)!r}] is within "
            f"{float(FLOOR_GUARD)} of an integer"
        )
    return lo
