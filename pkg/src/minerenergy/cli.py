"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or arguments, 2 I/O failure. Data goes
to stdout (or ``--out``); diagnostics are a single line on stderr.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .devices import (
    JUNE_2021_NETWORK,
    DeviceCatalog,
    aggregate_amortization,
    amortization_factor,
    fleet_energy,
    load_catalog,
)
from .errors import ModelError, NonConvergence
from .ingest import amort_estimate_from_history, parse_history, window_estimate
from .model import ProtocolConstants, mint_at
from .quantities import Btc, Eur, EurPerKWh, HashRateTHs, PeriodHours, to_decimal
from .scenarios import (
    MEUR,
    FactorAxis,
    Scenario,
    emit_curve,
    emit_results,
    emit_scenarios,
    evaluate_scenario,
    find,
    load_scenarios,
    sweep,
)
from .sim import SimConfig, emit_trace, run_simulation
from .tabular import emit, fmt_decimal, fmt_fixed

DEVICES_HEADER = ("name", "hashrate_ths", "power_kw", "price_eur", "amort_years", "amort_meur_per_year")
AMF_HEADER = DEVICES_HEADER + ("amort_eur_t", "energy_kwh_t", "amf_eur_kwh")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _decimal(text: str) -> Decimal:
    try:
        return to_decimal(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _read(path: str | None, bundled: str) -> bytes:
    if path is None:
        return resources.files("minerenergy.data").joinpath(bundled).read_bytes()
    return Path(path).read_bytes()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")


def _add_protocol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--period-years", type=_decimal, default=Decimal(1), help="evaluation period in 365-day years (default 1)")
    p.add_argument("--mint", type=_decimal, default=Decimal("6.25"), help="BTC minted per block (default 6.25)")
    p.add_argument("--blocks-per-hour", type=_decimal, default=Decimal(6), help="block rate (default 6)")
    p.add_argument(
        "--block-height",
        type=int,
        help="derive the mint from the halving schedule at this height instead of --mint",
    )
    p.add_argument("--initial-mint", type=_decimal, default=Decimal(50), help="genesis mint for --block-height (default 50)")
    p.add_argument(
        "--halving-acceleration",
        type=_decimal,
        default=Decimal(1),
        help="multiplier on halving frequency used with --block-height (default 1)",
    )


def _scenarios_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenarios", help="scenarios CSV (default: bundled scenarios.csv)")


def _catalog_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--catalog", help="device catalog CSV (default: bundled devices.csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="minerenergy",
        description="Maximum energy consumption of Bitcoin miners from economic factors.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="maximum energy for every scenario", allow_abbrev=False)
    _scenarios_arg(p)
    _add_protocol(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="vary one factor of one scenario", allow_abbrev=False)
    _scenarios_arg(p)
    p.add_argument("--scenario", required=True, help="scenario name")
    p.add_argument(
        "--axis",
        required=True,
        choices=[a.value for a in FactorAxis],
        help="factor to vary; amort is in MEUR/year, amf and energy-price in EUR/KWh",
    )
    p.add_argument("--from", dest="lo", type=_decimal, required=True, help="first x value")
    p.add_argument("--to", dest="hi", type=_decimal, required=True, help="last x value")
    p.add_argument("--steps", type=int, default=96, help="number of grid points, endpoints included (default 96)")
    _add_protocol(p)
    _add_common(p)

    p = sub.add_parser("simulate", help="run the miner-market simulator to equilibrium", allow_abbrev=False)
    _scenarios_arg(p)
    _catalog_arg(p)
    p.add_argument("--scenario", required=True, help="scenario name")
    p.add_argument("--device", required=True, help="device name from the catalog")
    p.add_argument("--retarget-interval", type=int, default=2016, help="blocks per retarget (default 2016)")
    p.add_argument("--entry-granularity", type=_decimal, default=Decimal("0.1"), help="fleet share added per period (default 0.1)")
    p.add_argument("--max-periods", type=int, default=50, help="retarget periods before giving up (default 50)")
    p.add_argument("--tolerance", type=_decimal, default=Decimal("0.02"), help="relative convergence tolerance (default 0.02)")
    p.add_argument("--mint", type=_decimal, default=Decimal("6.25"), help="BTC minted per block (default 6.25)")
    _add_common(p)

    p = sub.add_parser("devices", help="device catalog with fleet amortization", allow_abbrev=False)
    _catalog_arg(p)
    p.add_argument("--amf", action="store_true", help="add amortization-factor columns computed over each device's amortization period")
    p.add_argument(
        "--network-ths",
        type=_decimal,
        default=JUNE_2021_NETWORK.value,
        help="network hashrate in TH/s for fleet amortization (default 136316000)",
    )
    _add_common(p)

    p = sub.add_parser("ingest", help="estimate scenario parameters from a daily history CSV", allow_abbrev=False)
    p.add_argument("--history", required=True, help="history CSV (date,fees_btc,hashrate_ths,eurbtc)")
    p.add_argument("--start", type=_date, required=True, help="first day of the window (YYYY-MM-DD)")
    p.add_argument("--end", type=_date, required=True, help="last day of the window (YYYY-MM-DD)")
    p.add_argument("--energy-price", type=_decimal, required=True, help="energy price in EUR/KWh")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--amort-meur-per-year", type=_decimal, help="fleet amortization in MEUR/year")
    group.add_argument("--device", help="estimate amortization from mean hashrate on this catalog device")
    _catalog_arg(p)
    p.add_argument("--name", default="estimated", help="scenario name for the output row (default estimated)")
    _add_common(p)
    return parser


def _constants(args) -> ProtocolConstants:
    k = ProtocolConstants(
        blocks_per_hour=args.blocks_per_hour,
        current_mint=Btc(args.mint),
        halving_acceleration=getattr(args, "halving_acceleration", Decimal(1)),
    )
    if getattr(args, "block_height", None) is not None:
        mint = mint_at(args.block_height, k, Btc(args.initial_mint))
        k = ProtocolConstants(k.blocks_per_hour, mint, k.halving_interval_blocks, k.halving_acceleration)
    return k


def _period(args) -> PeriodHours:
    return PeriodHours.years(args.period_years)


def _scenarios(args) -> list[Scenario]:
    return load_scenarios(_read(args.scenarios, "scenarios.csv"))


def _catalog(args) -> DeviceCatalog:
    return load_catalog(_read(args.catalog, "devices.csv"))


def cmd_eval(args) -> bytes:
    k, period = _constants(args), _period(args)
    results = [evaluate_scenario(s, period, k) for s in _scenarios(args)]
    if not results:
        raise ModelError("scenario file has no scenarios")
    return emit_results(results, args.format)


def cmd_sweep(args) -> bytes:
    s = find(_scenarios(args), args.scenario)
    curve = sweep(s, FactorAxis(args.axis), args.lo, args.hi, args.steps, _period(args), _constants(args))
    return emit_curve(curve, args.format)


def cmd_devices(args) -> bytes:
    network = HashRateTHs(args.network_ths)
    year = PeriodHours.years(1)
    rows = []
    for d in _catalog(args):
        row = [
            d.name,
            fmt_decimal(d.hashrate.value),
            fmt_decimal(d.power.value),
            fmt_decimal(d.price.value),
            fmt_decimal(d.amort_years),
            fmt_fixed(aggregate_amortization(d, network, year).value / MEUR, 3),
        ]
        if args.amf:
            # one device over its own amortization horizon
            horizon = d.amort_period
            amort_t = aggregate_amortization(d, d.hashrate, horizon)
            energy_t = fleet_energy(d, d.hashrate, horizon)
            row += [
                fmt_fixed(amort_t.value, 2),
                fmt_fixed(energy_t.value, 3),
                fmt_fixed(amortization_factor(d).value, 2),
            ]
        rows.append(row)
    if not rows:
        raise ModelError("device catalog is empty")
    return emit(AMF_HEADER if args.amf else DEVICES_HEADER, rows, args.format)


def cmd_ingest(args) -> bytes:
    series = parse_history(Path(args.history).read_bytes())
    if args.device is not None:
        amort = amort_estimate_from_history(series, args.start, args.end, _catalog(args).get(args.device))
    else:
        if args.amort_meur_per_year < 0:
            raise ModelError("--amort-meur-per-year must be >= 0")
        amort = Eur(args.amort_meur_per_year * MEUR)
    if args.energy_price <= 0:
        raise ModelError("--energy-price must be > 0")
    params = window_estimate(series, args.start, args.end, EurPerKWh(args.energy_price), amort)
    return emit_scenarios([Scenario(args.name, params)], args.format)


def cmd_simulate(args) -> tuple[bytes, str | None]:
    s = find(_scenarios(args), args.scenario)
    device = _catalog(args).get(args.device)
    cfg = SimConfig(
        scenario=s.params,
        device=device,
        retarget_interval_blocks=args.retarget_interval,
        entry_granularity=args.entry_granularity,
        max_retarget_periods=args.max_periods,
        convergence_tolerance=args.tolerance,
        constants=ProtocolConstants(current_mint=Btc(args.mint)),
    )
    try:
        trace = run_simulation(cfg)
    except NonConvergence as exc:
        return emit_trace(exc.trace, args.format), str(exc)
    return emit_trace(trace, args.format), None


COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "devices": cmd_devices,
    "ingest": cmd_ingest,
}


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        failure = None
        if args.command == "simulate":
            data, failure = cmd_simulate(args)
        else:
            data = COMMANDS[args.command](args)
        _write(data, args.out)
        if failure:
            print(f"error: {failure}", file=sys.stderr)
            return 1
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ModelError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {getattr(exc, 'filename', '') or ''}".rstrip(": "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
