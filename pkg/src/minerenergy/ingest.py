"""Daily history series (fees, hashrate, exchange rate) to scenario parameters.

Input is a CSV file; nothing here talks to the network. Missing days are
simply absent from the averages.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .devices import DeviceSpec, aggregate_amortization
from .errors import EmptySeries, EmptyWindow, NonMonotonicDates, ParseError
from .model import ScenarioParams
from .quantities import ONE_YEAR, Btc, Eur, EurPerBtc, EurPerKWh, HashRateTHs
from .tabular import Source, build, emit, fmt_decimal, parse_decimal, read_rows

HISTORY_HEADER = ("date", "fees_btc", "hashrate_ths", "eurbtc")


@dataclass(frozen=True)
class HistoryRecord:
    date: dt.date
    fees_btc: Btc
    hashrate_ths: HashRateTHs
    eurbtc: EurPerBtc


@dataclass(frozen=True)
class HistorySeries:
    records: tuple[HistoryRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise EmptySeries("history series has no records")
        for a, b in zip(self.records, self.records[1:]):
            if b.date <= a.date:
                raise NonMonotonicDates(f"{b.date} does not follow {a.date}")

    def __len__(self) -> int:
        return len(self.records)

    def window(self, start: dt.date, end: dt.date) -> list[HistoryRecord]:
        if start > end:
            raise EmptyWindow(f"window start {start} is after end {end}")
        picked = [r for r in self.records if start <= r.date <= end]
        if not picked:
            raise EmptyWindow(f"no records between {start} and {end}")
        return picked


def _parse_date(cell: str, row: int) -> dt.date:
    try:
        if len(cell) != 10:
            raise ValueError
        return dt.date.fromisoformat(cell)
    except ValueError:
        raise ParseError(row, "date", f"expected YYYY-MM-DD, got {cell!r}") from None


def parse_history(source: Source) -> HistorySeries:
    records: list[HistoryRecord] = []
    for row, cells in read_rows(source, HISTORY_HEADER):
        date = _parse_date(cells["date"], row)
        fees = parse_decimal(cells["fees_btc"], row, "fees_btc")
        if fees < 0:
            raise ParseError(row, "fees_btc", "fees must be >= 0")
        rec = HistoryRecord(
            date,
            Btc(fees),
            build(row, "hashrate_ths", HashRateTHs, parse_decimal(cells["hashrate_ths"], row, "hashrate_ths")),
            build(row, "eurbtc", EurPerBtc, parse_decimal(cells["eurbtc"], row, "eurbtc")),
        )
        if records and rec.date <= records[-1].date:
            raise NonMonotonicDates(
                f"row {row}: date {rec.date} does not follow {records[-1].date}"
            )
        records.append(rec)
    if not records:
        raise EmptySeries("line 1: header is not followed by any data rows")
    return HistorySeries(tuple(records))


def serialize_history(series: HistorySeries) -> bytes:
    rows = [
        [
            r.date.isoformat(),
            fmt_decimal(r.fees_btc.value),
            fmt_decimal(r.hashrate_ths.value),
            fmt_decimal(r.eurbtc.value),
        ]
        for r in series.records
    ]
    return emit(HISTORY_HEADER, rows, "csv")


def _mean(values: Sequence[Decimal]) -> Decimal:
    return sum(values, Decimal(0)) / len(values)


def window_estimate(
    series: HistorySeries,
    start: dt.date,
    end: dt.date,
    energy_price: EurPerKWh,
    amort_per_year: Eur,
) -> ScenarioParams:
    """Plain arithmetic means of daily fees and exchange rate over the window.

    Energy price and amortization cannot be observed in the series and are
    passed through.
    """
    recs = series.window(start, end)
    return ScenarioParams(
        Btc(_mean([r.fees_btc.value for r in recs])),
        EurPerBtc(_mean([r.eurbtc.value for r in recs])),
        amort_per_year,
        energy_price,
    )


def mean_hashrate(series: HistorySeries, start: dt.date, end: dt.date) -> HashRateTHs:
    return HashRateTHs(_mean([r.hashrate_ths.value for r in series.window(start, end)]))


def amort_estimate_from_history(
    series: HistorySeries, start: dt.date, end: dt.date, device: DeviceSpec
) -> Eur:
    """Yearly fleet amortization if the observed hashrate ran on ``device``."""
    return aggregate_amortization(device, mean_hashrate(series, start, end), ONE_YEAR)
