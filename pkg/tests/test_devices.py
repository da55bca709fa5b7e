from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minerenergy.devices import (
    JUNE_2021_NETWORK,
    DeviceCatalog,
    DeviceSpec,
    aggregate_amortization,
    amortization_factor,
    cost_per_hash,
    default_catalog,
    fleet_energy,
    load_catalog,
)
from minerenergy.errors import DuplicateName, ParseError, SchemaError, UnknownName
from minerenergy.model import energy_from_amf, hashpower_equilibrium
from minerenergy.quantities import ONE_YEAR, EnergyKWh, Eur, EurPerKWh, HashRateTHs, PeriodHours

REF = DeviceSpec.of("ref", 100, "3.25", 6000, 2)
TWO_YEARS = PeriodHours(17520)


def close(a, b, tol="1e-12"):
    a, b = Decimal(a), Decimal(b)
    return abs(a - b) <= Decimal(tol) * abs(b)


def test_amortization_factor_matches_per_period_ratio():
    amf = amortization_factor(REF)
    # oracle: amortization and energy of one device over its own horizon
    amort_t = Fraction(6000)
    energy_t = Fraction("3.25") * 17520
    assert amort_t / energy_t == Fraction(100, 949)
    assert close(amf.value, Decimal(100) / Decimal(949), "1e-25")
    assert round(amf.value, 5) == Decimal("0.10537")


def test_free_hardware_has_zero_amf():
    assert amortization_factor(DeviceSpec.of("free", 100, 3, 0)) == EurPerKWh(0)


def test_aggregate_amortization():
    total = aggregate_amortization(REF, JUNE_2021_NETWORK, ONE_YEAR)
    # 1.36316e6 devices * 3000 EUR/year
    assert total == Eur(Decimal("1363160") * 3000)
    assert aggregate_amortization(REF, HashRateTHs(0), ONE_YEAR) == Eur(0)
    assert aggregate_amortization(REF, REF.hashrate, REF.amort_period) == REF.price


def test_fleet_energy():
    e = fleet_energy(REF, JUNE_2021_NETWORK, ONE_YEAR)
    assert e == EnergyKWh(Decimal("1363160") * Decimal("3.25") * 8760)
    assert round(e.value / 10**9, 2) == Decimal("38.81")
    assert fleet_energy(REF, REF.hashrate, PeriodHours(1)) == EnergyKWh(REF.power.value)
    assert fleet_energy(REF, HashRateTHs(0), ONE_YEAR) == EnergyKWh(0)


def test_cost_per_hash():
    c = cost_per_hash(REF, EurPerKWh("0.03"))
    # oracle: EUR spent by one device in one hour, per TH/s
    one_hour = Fraction(6000, 17520) + Fraction("3.25") * Fraction("0.03")
    expected = one_hour / 100
    assert close(c, Decimal(expected.numerator) / Decimal(expected.denominator), "1e-25")
    assert round(c, 4) == Decimal("0.0044")
    free = DeviceSpec.of("free", 100, 3, 0)
    assert cost_per_hash(free, EurPerKWh(0)) == 0


devices = st.builds(
    DeviceSpec.of,
    st.just("d"),
    st.decimals(min_value=1, max_value=500, places=1),
    st.decimals(min_value="0.1", max_value=10, places=3),
    st.decimals(min_value=0, max_value=20000, places=0),
    st.decimals(min_value="0.5", max_value=5, places=1),
)


@given(devices, st.decimals(min_value=1, max_value=10**9, places=0), st.decimals(min_value=1, max_value=10**5, places=1))
def test_amf_is_period_invariant_and_equals_amort_over_energy(d, network, hours):
    net, t = HashRateTHs(network), PeriodHours(hours)
    ratio_t = aggregate_amortization(d, net, t).value / fleet_energy(d, net, t).value
    ratio_2t = aggregate_amortization(d, net, t * 2).value / fleet_energy(d, net, t * 2).value
    amf = amortization_factor(d).value
    if amf == 0:
        assert ratio_t == ratio_2t == 0
    else:
        assert close(ratio_t, amf) and close(ratio_2t, amf)


@given(
    devices,
    st.decimals(min_value=10**6, max_value=10**11, places=0),
    st.decimals(min_value="0.001", max_value="0.5", places=4),
)
def test_identity_chain(d, income, price):
    p = EurPerKWh(price)
    h = hashpower_equilibrium(Eur(income), cost_per_hash(d, p), ONE_YEAR)
    via_fleet = fleet_energy(d, h, ONE_YEAR)
    direct = energy_from_amf(Eur(income), amortization_factor(d), p)
    assert close(via_fleet.value, direct.value, "1e-9")


def test_default_catalog_has_reference_device():
    cat = default_catalog()
    assert len(cat) >= 5
    amfs = {d.name: round(amortization_factor(d).value, 2) for d in cat}
    assert amfs["antminer-s19-pro"] == Decimal("0.15")
    assert cat.get("ref-100th") == REF.__class__("ref-100th", REF.hashrate, REF.power, REF.price, REF.amort_period)
    with pytest.raises(UnknownName):
        cat.get("nope")


def test_catalog_rejects_duplicates():
    with pytest.raises(DuplicateName):
        DeviceCatalog([REF, REF])
    src = b"name,hashrate_ths,power_kw,price_eur,amort_years\na,1,1,1,2\na,2,2,2,2\n"
    with pytest.raises(DuplicateName):
        load_catalog(src)


def test_catalog_rejects_unknown_column():
    src = b"name,hashrate_ths,power_kw,price_eur,amort_years,color\na,1,1,1,2,red\n"
    with pytest.raises(SchemaError, match="color"):
        load_catalog(src)


def test_catalog_row_diagnostics():
    src = b"name,hashrate_ths,power_kw,price_eur,amort_years\na,100,-3,1,2\n"
    with pytest.raises(ParseError) as exc:
        load_catalog(src)
    assert exc.value.row == 2 and exc.value.column == "power_kw"
