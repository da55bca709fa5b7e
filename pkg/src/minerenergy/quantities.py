"""Dimension-tagged decimal quantities.

Every quantity wraps a :class:`~decimal.Decimal` and only combines with
quantities of its own kind. Cross-dimension arithmetic goes through the
explicit conversion helpers at the bottom of this module (or the model
functions), never through operator overloading, so passing Eur where Btc is
expected fails loudly instead of producing a wrong number.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import ClassVar, Union

Number = Union[Decimal, int, str]

KWH_PER_TWH = Decimal(10) ** 9


class UnitError(TypeError):
    """A value of one dimension was used where another was expected."""


def to_decimal(value: object) -> Decimal:
    """Coerce a plain number to Decimal, refusing quantities and NaN/inf.

    Floats go through ``repr`` so ``0.03`` becomes ``Decimal('0.03')``
    rather than its binary expansion.
    """
    if isinstance(value, Quantity):
        raise UnitError(f"expected a plain number, got {type(value).__name__}")
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Decimal):
        d = value
    elif isinstance(value, int):
        d = Decimal(value)
    elif isinstance(value, float):
        d = Decimal(repr(value))
    elif isinstance(value, str):
        try:
            d = Decimal(value.strip())
        except InvalidOperation:
            raise ValueError(f"not a decimal number: {value!r}") from None
    else:
        raise TypeError(f"cannot interpret {type(value).__name__} as a number")
    if not d.is_finite():
        raise ValueError(f"non-finite value: {value!r}")
    return d


@dataclass(frozen=True)
class Quantity:
    value: Decimal

    unit: ClassVar[str] = ""
    # None: any finite value; otherwise the lower bound.
    minimum: ClassVar[Decimal | None] = None
    strict: ClassVar[bool] = False

    def __init__(self, value: Number) -> None:
        d = to_decimal(value)
        lo = self.minimum
        if lo is not None and (d <= lo if self.strict else d < lo):
            op = ">" if self.strict else ">="
            raise ValueError(f"{type(self).__name__} must be {op} {lo}, got {d}")
        object.__setattr__(self, "value", d)

    def _same(self, other: object, op: str) -> Decimal:
        if type(other) is not type(self):
            raise UnitError(
                f"cannot {op} {type(self).__name__} and {type(other).__name__}"
            )
        return other.value  # type: ignore[attr-defined]

    def __add__(self, other: Quantity):
        return type(self)(self.value + self._same(other, "add"))

    def __sub__(self, other: Quantity):
        return type(self)(self.value - self._same(other, "subtract"))

    def __mul__(self, k: Number):
        return type(self)(self.value * to_decimal(k))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Quantity):
            # same-dimension ratio is dimensionless
            return self.value / self._same(other, "divide")
        return type(self)(self.value / to_decimal(other))

    def __neg__(self):
        return type(self)(-self.value)

    def __lt__(self, other: Quantity) -> bool:
        return self.value < self._same(other, "compare")

    def __le__(self, other: Quantity) -> bool:
        return self.value <= self._same(other, "compare")

    def __gt__(self, other: Quantity) -> bool:
        return self.value > self._same(other, "compare")

    def __ge__(self, other: Quantity) -> bool:
        return self.value >= self._same(other, "compare")

    def __bool__(self) -> bool:
        return bool(self.value)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self.value)!r})"

    def __str__(self) -> str:
        return f"{self.value} {self.unit}"


class Btc(Quantity):
    """Bitcoin amount. Negative only in balances; inputs validate separately."""

    unit = "BTC"


class Eur(Quantity):
    unit = "EUR"


class EurPerBtc(Quantity):
    unit = "EUR/BTC"
    minimum = Decimal(0)
    strict = True


class EnergyKWh(Quantity):
    unit = "KWh"


class PowerKW(Quantity):
    unit = "KW"
    minimum = Decimal(0)
    strict = True


class EurPerKWh(Quantity):
    unit = "EUR/KWh"
    minimum = Decimal(0)


class HashRateTHs(Quantity):
    unit = "TH/s"
    minimum = Decimal(0)


class PeriodHours(Quantity):
    unit = "h"
    minimum = Decimal(0)
    strict = True

    @classmethod
    def years(cls, n: Number = 1) -> PeriodHours:
        return cls(HOURS_PER_YEAR * to_decimal(n))


HOURS_PER_YEAR = Decimal(8760)
ONE_YEAR = PeriodHours(HOURS_PER_YEAR)


def expect(value: object, kind: type[Quantity], name: str = "argument") -> None:
    if type(value) is not kind:
        raise UnitError(
            f"{name} must be {kind.__name__}, got {type(value).__name__}"
        )


def btc_to_eur(amount: Btc, rate: EurPerBtc) -> Eur:
    expect(amount, Btc, "amount")
    expect(rate, EurPerBtc, "rate")
    return Eur(amount.value * rate.value)


def eur_to_btc(amount: Eur, rate: EurPerBtc) -> Btc:
    expect(amount, Eur, "amount")
    expect(rate, EurPerBtc, "rate")
    return Btc(amount.value / rate.value)


def kwh_to_twh(e: EnergyKWh) -> Decimal:
    expect(e, EnergyKWh, "energy")
    return e.value / KWH_PER_TWH
