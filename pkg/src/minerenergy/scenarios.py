"""Scenario catalog, evaluation, and one-factor sweeps."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from decimal import Decimal
from importlib import resources
from typing import Sequence, Union

from .errors import DuplicateName, InvalidRange, NonPositivePriceInRange, ParseError, UnknownName
from .model import (
    DEFAULT_CONSTANTS,
    EnergyOutcome,
    ProtocolConstants,
    ScenarioParams,
    energy_from_amf,
    energy_max,
    income_eur,
    non_energy_balance_eur,
)
from .quantities import (
    ONE_YEAR,
    Btc,
    Eur,
    EurPerBtc,
    EurPerKWh,
    PeriodHours,
    to_decimal,
)
from .tabular import Source, build, emit, fmt_decimal, fmt_fixed, parse_decimal, read_rows

SCENARIO_HEADER = (
    "name",
    "fees_btc_per_day",
    "eurbtc",
    "amort_meur_per_year",
    "energy_price_eur_kwh",
)
RESULT_HEADER = SCENARIO_HEADER + ("energy_max_twh", "raw_energy_twh")
SWEEP_HEADER = ("x", "energy_twh", "profitable")

MEUR = Decimal(10) ** 6
TWH_PLACES = 3


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ScenarioParams


class FactorAxis(enum.Enum):
    ENERGY_PRICE = "energy-price"
    EXCHANGE_RATE = "eurbtc"
    FEES_PER_DAY = "fees"
    AMORT_PER_YEAR = "amort"
    AMF = "amf"


@dataclass(frozen=True)
class SweepPoint:
    x: Decimal
    energy: EnergyOutcome


@dataclass(frozen=True)
class SweepCurve:
    axis: FactorAxis
    scenario_name: str
    points: tuple[SweepPoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a sweep curve needs at least 2 points")
        xs = [p.x for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("sweep x values must be strictly increasing")


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    period: PeriodHours
    energy: EnergyOutcome
    balance: Eur
    income_eur: Eur


def load_scenarios(source: Source) -> list[Scenario]:
    """Parse a scenarios CSV. Amortization is given in millions of EUR per year."""
    out: list[Scenario] = []
    seen: set[str] = set()
    for row, cells in read_rows(source, SCENARIO_HEADER):
        name = cells["name"]
        if not name:
            raise ParseError(row, "name", "empty scenario name")
        if name in seen:
            raise DuplicateName(f"row {row}: duplicate scenario name {name!r}")
        seen.add(name)
        num = {c: parse_decimal(cells[c], row, c) for c in SCENARIO_HEADER[1:]}
        if num["fees_btc_per_day"] < 0:
            raise ParseError(row, "fees_btc_per_day", "fees must be >= 0")
        if num["amort_meur_per_year"] < 0:
            raise ParseError(row, "amort_meur_per_year", "amortization must be >= 0")
        if num["energy_price_eur_kwh"] <= 0:
            raise ParseError(row, "energy_price_eur_kwh", "energy price must be > 0")
        params = ScenarioParams(
            Btc(num["fees_btc_per_day"]),
            build(row, "eurbtc", EurPerBtc, num["eurbtc"]),
            Eur(num["amort_meur_per_year"] * MEUR),
            EurPerKWh(num["energy_price_eur_kwh"]),
        )
        out.append(Scenario(name, params))
    return out


def default_scenarios() -> list[Scenario]:
    data = resources.files("minerenergy.data").joinpath("scenarios.csv").read_bytes()
    return load_scenarios(data)


def find(scenarios: Sequence[Scenario], name: str) -> Scenario:
    for s in scenarios:
        if s.name == name:
            return s
    raise UnknownName(
        f"no scenario named {name!r}; known: {', '.join(s.name for s in scenarios)}"
    )


def evaluate_scenario(
    s: Scenario, period: PeriodHours = ONE_YEAR, k: ProtocolConstants = DEFAULT_CONSTANTS
) -> ScenarioResult:
    return ScenarioResult(
        scenario=s,
        period=period,
        energy=energy_max(period, k, s.params),
        balance=non_energy_balance_eur(period, k, s.params),
        income_eur=income_eur(period, k, s.params),
    )


def grid(lo: Decimal, hi: Decimal, steps: int) -> list[Decimal]:
    """``steps`` evenly spaced values from ``lo`` to ``hi`` inclusive."""
    if steps < 2:
        raise InvalidRange(f"steps must be >= 2, got {steps}")
    if not lo < hi:
        raise InvalidRange(f"lower bound {lo} must be below upper bound {hi}")
    step = (hi - lo) / (steps - 1)
    xs = [lo + step * i for i in range(steps - 1)]
    xs.append(hi)
    return xs


def _override(params: ScenarioParams, axis: FactorAxis, x: Decimal) -> ScenarioParams:
    if axis is FactorAxis.ENERGY_PRICE:
        return replace(params, energy_price=EurPerKWh(x))
    if axis is FactorAxis.EXCHANGE_RATE:
        return replace(params, exchange_rate=EurPerBtc(x))
    if axis is FactorAxis.FEES_PER_DAY:
        return replace(params, fees_per_day=Btc(x))
    if axis is FactorAxis.AMORT_PER_YEAR:
        # axis values are MEUR per year, as in the scenario file
        return replace(params, amort_per_year=Eur(x * MEUR))
    raise AssertionError(axis)


def point_at(
    s: Scenario,
    axis: FactorAxis,
    x: Decimal,
    period: PeriodHours = ONE_YEAR,
    k: ProtocolConstants = DEFAULT_CONSTANTS,
) -> EnergyOutcome:
    if axis is FactorAxis.AMF:
        # amortization is implied by AmF here; the scenario's own figure is ignored
        income = income_eur(period, k, s.params)
        return EnergyOutcome(energy_from_amf(income, EurPerKWh(x), s.params.energy_price).value)
    return energy_max(period, k, _override(s.params, axis, x))


def sweep(
    s: Scenario,
    axis: FactorAxis,
    lo,
    hi,
    steps: int,
    period: PeriodHours = ONE_YEAR,
    k: ProtocolConstants = DEFAULT_CONSTANTS,
) -> SweepCurve:
    """Vary one factor over a uniform grid, holding the others at ``s``.

    Points that fall in an unprofitable region are kept, carrying their
    negative raw bound.
    """
    lo, hi = to_decimal(lo), to_decimal(hi)
    if lo < 0:
        raise InvalidRange(f"{axis.value} cannot be negative (from {lo})")
    if axis is FactorAxis.ENERGY_PRICE and lo <= 0:
        raise NonPositivePriceInRange("energy price range must be strictly positive")
    if axis is FactorAxis.EXCHANGE_RATE and lo <= 0:
        raise InvalidRange("exchange rate range must be strictly positive")
    xs = grid(lo, hi, steps)
    points = tuple(SweepPoint(x, point_at(s, axis, x, period, k)) for x in xs)
    return SweepCurve(axis, s.name, points)


def _twh(outcome: EnergyOutcome) -> str:
    return fmt_fixed(outcome.raw_twh, TWH_PLACES)


def scenario_row(s: Scenario) -> list[str]:
    p = s.params
    return [
        s.name,
        fmt_decimal(p.fees_per_day.value),
        fmt_decimal(p.exchange_rate.value),
        fmt_decimal(p.amort_per_year.value / MEUR),
        fmt_decimal(p.energy_price.value),
    ]


def emit_scenarios(scenarios: Sequence[Scenario], fmt: str = "csv") -> bytes:
    return emit(SCENARIO_HEADER, [scenario_row(s) for s in scenarios], fmt)


def emit_results(results: Sequence[ScenarioResult], fmt: str = "csv") -> bytes:
    if not results:
        raise ValueError("nothing to emit")
    rows = []
    for r in results:
        shown = _twh(r.energy) if r.energy.profitable else "not_profitable"
        rows.append(scenario_row(r.scenario) + [shown, _twh(r.energy)])
    return emit(RESULT_HEADER, rows, fmt)


def emit_curve(curve: SweepCurve, fmt: str = "csv") -> bytes:
    rows = [
        [fmt_decimal(p.x), _twh(p.energy), p.energy.profitable] for p in curve.points
    ]
    return emit(SWEEP_HEADER, rows, fmt)


def emit_table(
    results: Union[Sequence[ScenarioResult], SweepCurve], fmt: str = "csv"
) -> bytes:
    """Deterministic CSV/JSON rendering of scenario results or a sweep curve.

    TWh values carry exactly three fractional digits, rounded half-even.
    """
    if isinstance(results, SweepCurve):
        return emit_curve(results, fmt)
    return emit_results(results, fmt)
