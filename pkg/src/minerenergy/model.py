"""Closed-form miner economics.

Aggregate income over a period is ``blocks * mint + fees`` (in BTC) and does
not depend on hashpower. Costs are amortization plus energy. At the
zero-profit limit the energy that all miners together can afford is the
non-energy balance in EUR divided by the energy price; a negative balance
means no energy budget exists and is reported as not profitable rather than
as a negative energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal

from .errors import ZeroCostHash, ZeroDenominator, ZeroEnergyPrice
from .quantities import (
    HOURS_PER_YEAR,
    Btc,
    EnergyKWh,
    Eur,
    EurPerBtc,
    EurPerKWh,
    HashRateTHs,
    Number,
    PeriodHours,
    btc_to_eur,
    expect,
    to_decimal,
)

HOURS_PER_DAY = Decimal(24)


@dataclass(frozen=True)
class ProtocolConstants:
    blocks_per_hour: Decimal = Decimal(6)
    current_mint: Btc = field(default_factory=lambda: Btc("6.25"))
    halving_interval_blocks: int = 210_000
    halving_acceleration: Decimal = Decimal(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks_per_hour", to_decimal(self.blocks_per_hour))
        object.__setattr__(
            self, "halving_acceleration", to_decimal(self.halving_acceleration)
        )
        expect(self.current_mint, Btc, "current_mint")
        if self.blocks_per_hour <= 0:
            raise ValueError("blocks_per_hour must be > 0")
        if self.current_mint.value < 0:
            raise ValueError("current_mint must be >= 0")
        if self.halving_interval_blocks <= 0:
            raise ValueError("halving_interval_blocks must be > 0")
        if self.halving_acceleration < 1:
            raise ValueError("halving_acceleration must be >= 1")

    @property
    def blocks_per_day(self) -> Decimal:
        return self.blocks_per_hour * HOURS_PER_DAY


DEFAULT_CONSTANTS = ProtocolConstants()


@dataclass(frozen=True)
class ScenarioParams:
    """Exogenous inputs of one scenario: fees, exchange rate, amortization, energy price."""

    fees_per_day: Btc
    exchange_rate: EurPerBtc
    amort_per_year: Eur
    energy_price: EurPerKWh

    def __post_init__(self) -> None:
        expect(self.fees_per_day, Btc, "fees_per_day")
        expect(self.exchange_rate, EurPerBtc, "exchange_rate")
        expect(self.amort_per_year, Eur, "amort_per_year")
        expect(self.energy_price, EurPerKWh, "energy_price")
        if self.fees_per_day.value < 0:
            raise ValueError("fees_per_day must be >= 0")
        if self.amort_per_year.value < 0:
            raise ValueError("amort_per_year must be >= 0")

    @classmethod
    def of(
        cls,
        fees_per_day: Number,
        exchange_rate: Number,
        amort_per_year: Number,
        energy_price: Number,
    ) -> ScenarioParams:
        return cls(
            Btc(fees_per_day),
            EurPerBtc(exchange_rate),
            Eur(amort_per_year),
            EurPerKWh(energy_price),
        )

    def fees_over(self, period: PeriodHours) -> Btc:
        return self.fees_per_day * (period.value / HOURS_PER_DAY)

    def amort_over(self, period: PeriodHours) -> Eur:
        # yearly figure scaled linearly to the period
        return self.amort_per_year * (period.value / HOURS_PER_YEAR)


@dataclass(frozen=True)
class EnergyOutcome:
    """Maximum energy for a period, or a not-profitable marker.

    ``raw_kwh`` always holds the unclipped bound so negative regions can be
    plotted; ``max_energy`` is only available when the bound is non-negative.
    """

    raw_kwh: Decimal

    @property
    def profitable(self) -> bool:
        return self.raw_kwh >= 0

    @property
    def max_energy(self) -> EnergyKWh | None:
        return EnergyKWh(self.raw_kwh) if self.profitable else None

    @property
    def raw_twh(self) -> Decimal:
        return self.raw_kwh / Decimal(10) ** 9


BalanceEur = Eur


def blocks_in(period: PeriodHours, k: ProtocolConstants = DEFAULT_CONSTANTS) -> Decimal:
    expect(period, PeriodHours, "period")
    return period.value * k.blocks_per_hour


def income_btc(
    period: PeriodHours, k: ProtocolConstants = DEFAULT_CONSTANTS, fees: Btc = Btc(0)
) -> Btc:
    """Total miner income over ``period``. Hashpower is deliberately absent."""
    expect(fees, Btc, "fees")
    if fees.value < 0:
        raise ValueError("fees must be >= 0")
    return k.current_mint * blocks_in(period, k) + fees


def income_eur(
    period: PeriodHours, k: ProtocolConstants, s: ScenarioParams
) -> Eur:
    return btc_to_eur(income_btc(period, k, s.fees_over(period)), s.exchange_rate)


def costs_btc(amort: Btc, energy: EnergyKWh, energy_price_btc: Number) -> Btc:
    expect(amort, Btc, "amort")
    expect(energy, EnergyKWh, "energy")
    price = to_decimal(energy_price_btc)
    if amort.value < 0 or energy.value < 0 or price < 0:
        raise ValueError("costs inputs must be non-negative")
    return amort + Btc(energy.value * price)


def non_energy_balance_eur(
    period: PeriodHours, k: ProtocolConstants, s: ScenarioParams
) -> BalanceEur:
    rate = s.exchange_rate
    minted = btc_to_eur(k.current_mint * blocks_in(period, k), rate)
    fees = btc_to_eur(s.fees_over(period), rate)
    return minted + fees - s.amort_over(period)


def energy_max(
    period: PeriodHours, k: ProtocolConstants, s: ScenarioParams
) -> EnergyOutcome:
    price = s.energy_price.value
    if price == 0:
        raise ZeroEnergyPrice("energy price is zero; maximum energy is undefined")
    return EnergyOutcome(non_energy_balance_eur(period, k, s).value / price)


def energy_max_factors(
    period: PeriodHours, k: ProtocolConstants, s: ScenarioParams
) -> Decimal:
    """Raw bound as three separate addends: minting, fees, amortization.

    Kept independent of :func:`non_energy_balance_eur` so the two routes can
    be checked against each other.
    """
    price = s.energy_price.value
    if price == 0:
        raise ZeroEnergyPrice("energy price is zero; maximum energy is undefined")
    rate = s.exchange_rate.value
    blocks = period.value * k.blocks_per_hour
    minting = blocks * k.current_mint.value * rate / price
    fees = s.fees_per_day.value * period.value / HOURS_PER_DAY * rate / price
    amort = s.amort_per_year.value * period.value / HOURS_PER_YEAR / price
    return minting + fees - amort


def exchange_rate_slope(
    period: PeriodHours, k: ProtocolConstants, fees: Btc, energy_price: EurPerKWh
) -> Decimal:
    """d(energy_max)/d(rate), in KWh per EUR/BTC.

    This is the BTC income divided by the energy price. It is kept distinct
    from the BTC income itself.
    """
    expect(energy_price, EurPerKWh, "energy_price")
    if energy_price.value == 0:
        raise ZeroEnergyPrice("energy price is zero")
    return income_btc(period, k, fees).value / energy_price.value


def energy_from_amf(income_eur: Eur, amf: EurPerKWh, energy_price: EurPerKWh) -> EnergyKWh:
    expect(income_eur, Eur, "income_eur")
    expect(amf, EurPerKWh, "amf")
    expect(energy_price, EurPerKWh, "energy_price")
    if income_eur.value < 0:
        raise ValueError("income_eur must be >= 0")
    denom = amf.value + energy_price.value
    if denom == 0:
        raise ZeroDenominator("amortization factor plus energy price is zero")
    return EnergyKWh(income_eur.value / denom)


def hashpower_equilibrium(
    income_eur: Eur, cost_hash: Number, period: PeriodHours
) -> HashRateTHs:
    """Hashpower the fleet settles at when spending equals income.

    ``cost_hash`` is EUR per (TH/s) per hour, i.e. what keeping one TH/s
    running for an hour costs in energy plus amortization.
    """
    expect(income_eur, Eur, "income_eur")
    expect(period, PeriodHours, "period")
    c = to_decimal(cost_hash)
    if c <= 0:
        raise ZeroCostHash(f"cost per hash must be > 0, got {c}")
    return HashRateTHs(income_eur.value / (c * period.value))


def hashpower_from_factors(
    period: PeriodHours,
    k: ProtocolConstants,
    fees: Btc,
    cost_hash: Number,
    rate: EurPerBtc,
) -> HashRateTHs:
    return hashpower_equilibrium(
        btc_to_eur(income_btc(period, k, fees), rate), cost_hash, period
    )


def halvings_at(block_height: int, k: ProtocolConstants = DEFAULT_CONSTANTS) -> int:
    if block_height < 0:
        raise ValueError("block_height must be >= 0")
    epochs = Decimal(block_height) * k.halving_acceleration / k.halving_interval_blocks
    return int(epochs.to_integral_value(rounding=ROUND_FLOOR))


def mint_at(
    block_height: int,
    k: ProtocolConstants = DEFAULT_CONSTANTS,
    initial_mint: Btc = Btc(50),
) -> Btc:
    expect(initial_mint, Btc, "initial_mint")
    return Btc(initial_mint.value / (Decimal(2) ** halvings_at(block_height, k)))


def epoch_length_blocks(k: ProtocolConstants = DEFAULT_CONSTANTS) -> Decimal:
    return Decimal(k.halving_interval_blocks) / k.halving_acceleration


def projected_emission(
    epochs: int,
    k: ProtocolConstants = DEFAULT_CONSTANTS,
    initial_mint: Btc = Btc(50),
) -> Btc:
    """Total BTC minted over the first ``epochs`` halving epochs."""
    expect(initial_mint, Btc, "initial_mint")
    length = epoch_length_blocks(k)
    total = Decimal(0)
    for n in range(epochs):
        total += length * initial_mint.value / (Decimal(2) ** n)
    return Btc(total)
