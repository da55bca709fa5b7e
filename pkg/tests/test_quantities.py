from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minerenergy.quantities import (
    Btc,
    EnergyKWh,
    Eur,
    EurPerBtc,
    EurPerKWh,
    HashRateTHs,
    PeriodHours,
    PowerKW,
    UnitError,
    btc_to_eur,
    eur_to_btc,
    kwh_to_twh,
)


def test_btc_to_eur_examples():
    assert btc_to_eur(Btc("6.25"), EurPerBtc(30000)) == Eur(187500)
    assert btc_to_eur(Btc(0), EurPerBtc(12345)) == Eur(0)
    assert btc_to_eur(Btc(1), EurPerBtc(1)) == Eur(1)


def test_kwh_to_twh():
    assert kwh_to_twh(EnergyKWh(10**9)) == 1
    assert kwh_to_twh(EnergyKWh(0)) == 0
    assert kwh_to_twh(EnergyKWh("198333000000")) == Decimal("198.333")


def test_satoshi_precision_is_kept():
    assert Btc("0.00000001").value == Decimal("1E-8")
    assert (Btc("21000000") + Btc("0.00000001")).value == Decimal("21000000.00000001")


@given(
    st.decimals(min_value=0, max_value=10**7, places=8),
    st.decimals(min_value=Decimal("0.01"), max_value=10**6, places=2),
)
def test_round_trip(amount, rate):
    btc, r = Btc(amount), EurPerBtc(rate)
    assert eur_to_btc(btc_to_eur(btc, r), r) == btc


@pytest.mark.parametrize(
    "call",
    [
        lambda: btc_to_eur(Eur(1), EurPerBtc(1)),
        lambda: btc_to_eur(Btc(1), EurPerKWh(1)),
        lambda: Btc(1) + Eur(1),
        lambda: EnergyKWh(1) - Eur(1),
        lambda: Btc(1) < Eur(2),
        lambda: Btc(Eur(3)),
        lambda: kwh_to_twh(Eur(10)),
        lambda: Btc(1) * Eur(2),
    ],
)
def test_unit_misuse_is_rejected(call):
    with pytest.raises(UnitError):
        call()


def test_different_dimensions_never_compare_equal():
    assert Btc(1) != Eur(1)


@pytest.mark.parametrize(
    "ctor,value",
    [
        (EurPerBtc, 0),
        (EurPerBtc, -1),
        (PowerKW, 0),
        (EurPerKWh, "-0.01"),
        (HashRateTHs, -5),
        (PeriodHours, 0),
    ],
)
def test_constructor_invariants(ctor, value):
    with pytest.raises(ValueError):
        ctor(value)


@pytest.mark.parametrize("bad", ["NaN", "Infinity", "abc", float("inf")])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError):
        Eur(bad)


def test_quantities_are_immutable_and_hashable():
    x = Btc(1)
    with pytest.raises(AttributeError):
        x.value = Decimal(2)
    assert {Btc(1), Btc("1.0")} == {Btc(1)}


def test_float_input_uses_shortest_repr():
    assert EurPerKWh(0.03).value == Decimal("0.03")


def test_same_dimension_ratio_is_plain():
    assert Eur(10) / Eur(4) == Decimal("2.5")
    assert Eur(10) / 4 == Eur("2.5")
