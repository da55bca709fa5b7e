"""Mining device catalog and per-device economics.

The amortization factor (AmF) of a device is what its hardware costs per KWh
it burns over its amortization horizon. Because both amortization and energy
scale linearly with the evaluation period, AmF does not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from typing import Iterator, Sequence

from .errors import DuplicateName, ParseError, UnknownName
from .quantities import (
    HOURS_PER_YEAR,
    EnergyKWh,
    Eur,
    EurPerKWh,
    HashRateTHs,
    PeriodHours,
    PowerKW,
    expect,
)
from .tabular import Source, build, parse_decimal, read_rows

CATALOG_HEADER = ("name", "hashrate_ths", "power_kw", "price_eur", "amort_years")

# network hashrate on 2021-06-13 (136.316 EH/s)
JUNE_2021_NETWORK = HashRateTHs("136316000")


@dataclass(frozen=True)
class DeviceSpec:
    name: str
    hashrate: HashRateTHs
    power: PowerKW
    price: Eur
    amort_period: PeriodHours

    def __post_init__(self) -> None:
        expect(self.hashrate, HashRateTHs, "hashrate")
        expect(self.power, PowerKW, "power")
        expect(self.price, Eur, "price")
        expect(self.amort_period, PeriodHours, "amort_period")
        if self.hashrate.value <= 0:
            raise ValueError("hashrate must be > 0")
        if self.price.value < 0:
            raise ValueError("price must be >= 0")

    @classmethod
    def of(cls, name: str, hashrate_ths, power_kw, price_eur, amort_years=2) -> DeviceSpec:
        return cls(
            name,
            HashRateTHs(hashrate_ths),
            PowerKW(power_kw),
            Eur(price_eur),
            PeriodHours.years(amort_years),
        )

    @property
    def amort_years(self) -> Decimal:
        return self.amort_period.value / HOURS_PER_YEAR

    @property
    def hourly_amortization(self) -> Eur:
        return self.price / self.amort_period.value


class DeviceCatalog(Sequence[DeviceSpec]):
    def __init__(self, devices: Sequence[DeviceSpec] = ()) -> None:
        seen: set[str] = set()
        for d in devices:
            if d.name in seen:
                raise DuplicateName(f"duplicate device name {d.name!r}")
            seen.add(d.name)
        self._devices = tuple(devices)

    def __getitem__(self, i):
        return self._devices[i]

    def __len__(self) -> int:
        return len(self._devices)

    def __iter__(self) -> Iterator[DeviceSpec]:
        return iter(self._devices)

    def get(self, name: str) -> DeviceSpec:
        for d in self._devices:
            if d.name == name:
                return d
        raise UnknownName(
            f"no device named {name!r}; known: {', '.join(d.name for d in self._devices)}"
        )


def load_catalog(source: Source) -> DeviceCatalog:
    devices = []
    seen: set[str] = set()
    for row, cells in read_rows(source, CATALOG_HEADER):
        name = cells["name"]
        if not name:
            raise ParseError(row, "name", "empty device name")
        if name in seen:
            raise DuplicateName(f"row {row}: duplicate device name {name!r}")
        seen.add(name)
        num = {c: parse_decimal(cells[c], row, c) for c in CATALOG_HEADER[1:]}
        hashrate = build(row, "hashrate_ths", HashRateTHs, num["hashrate_ths"])
        if hashrate.value == 0:
            raise ParseError(row, "hashrate_ths", "hashrate must be > 0")
        price = build(row, "price_eur", Eur, num["price_eur"])
        if price.value < 0:
            raise ParseError(row, "price_eur", "price must be >= 0")
        devices.append(
            DeviceSpec(
                name,
                hashrate,
                build(row, "power_kw", PowerKW, num["power_kw"]),
                price,
                build(row, "amort_years", PeriodHours, num["amort_years"] * HOURS_PER_YEAR),
            )
        )
    return DeviceCatalog(devices)


def default_catalog() -> DeviceCatalog:
    data = resources.files("minerenergy.data").joinpath("devices.csv").read_bytes()
    return load_catalog(data)


def amortization_factor(d: DeviceSpec) -> EurPerKWh:
    """EUR of hardware amortized per KWh consumed."""
    return EurPerKWh(d.price.value / (d.power.value * d.amort_period.value))


def device_count(d: DeviceSpec, network: HashRateTHs) -> Decimal:
    expect(network, HashRateTHs, "network")
    return network.value / d.hashrate.value


def aggregate_amortization(d: DeviceSpec, network: HashRateTHs, period: PeriodHours) -> Eur:
    """Amortization of a fleet of ``d`` producing ``network`` hashrate.

    Per-device cost rate (price over amortization horizon) times the number
    of devices times the period.
    """
    expect(period, PeriodHours, "period")
    # divide last: keeps round inputs exact
    return Eur(d.price.value * device_count(d, network) * period.value / d.amort_period.value)


def fleet_energy(d: DeviceSpec, network: HashRateTHs, period: PeriodHours) -> EnergyKWh:
    expect(period, PeriodHours, "period")
    return EnergyKWh(d.power.value * device_count(d, network) * period.value)


def cost_per_hash(d: DeviceSpec, energy_price: EurPerKWh) -> Decimal:
    """EUR per (TH/s) per hour: hardware plus energy for one TH/s-hour."""
    expect(energy_price, EurPerKWh, "energy_price")
    return (amortization_factor(d).value + energy_price.value) * d.power.value / d.hashrate.value


def amort_per_year_for(d: DeviceSpec, network: HashRateTHs = JUNE_2021_NETWORK) -> Eur:
    return aggregate_amortization(d, network, PeriodHours(HOURS_PER_YEAR))
