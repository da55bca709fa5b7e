"""Deterministic mean-field miner market with difficulty retargeting.

One step covers one retarget interval. Miners first decide whether to buy
devices (full cost below income) or switch active ones off (energy alone
above income); the fleet then mines ``retarget_interval_blocks`` blocks at
the current difficulty; finally difficulty is rescaled so the next interval
runs at the target block time again.

The closed-form hashpower equilibrium is never used to drive the dynamics.
It only decides whether a run has converged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from decimal import Decimal
from typing import Sequence

from .devices import DeviceSpec, amortization_factor, cost_per_hash
from .errors import IncomparableTraces, NonConvergence, ZeroCostHash
from .model import (
    DEFAULT_CONSTANTS,
    ProtocolConstants,
    ScenarioParams,
    energy_from_amf,
    hashpower_equilibrium,
    income_eur,
)
from .quantities import (
    HOURS_PER_YEAR,
    KWH_PER_TWH,
    ONE_YEAR,
    Btc,
    EnergyKWh,
    Eur,
    HashRateTHs,
    to_decimal,
)
from .tabular import emit, fmt_fixed

SECONDS_PER_HOUR = Decimal(3600)
TRACE_HEADER = (
    "period",
    "hashpower_ths",
    "energy_twh_per_year_rate",
    "income_btc",
    "income_eur",
    "profit_eur",
)


@dataclass(frozen=True)
class Cohort:
    device: DeviceSpec
    count: Decimal
    active: bool = True

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("cohort count must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    scenario: ScenarioParams
    device: DeviceSpec
    retarget_interval_blocks: int = 2016
    target_block_time: Decimal = Decimal(600)
    entry_granularity: Decimal = Decimal("0.1")
    max_retarget_periods: int = 50
    convergence_tolerance: Decimal = Decimal("0.02")
    constants: ProtocolConstants = DEFAULT_CONSTANTS

    def __post_init__(self) -> None:
        for name in ("target_block_time", "entry_granularity", "convergence_tolerance"):
            object.__setattr__(self, name, to_decimal(getattr(self, name)))
        if self.retarget_interval_blocks <= 0 or self.max_retarget_periods <= 0:
            raise ValueError("retarget interval and period limit must be positive")
        if self.target_block_time <= 0 or self.entry_granularity <= 0:
            raise ValueError("target block time and entry granularity must be positive")
        if not 0 < self.convergence_tolerance < 1:
            raise ValueError("convergence tolerance must be in (0, 1)")
        if SECONDS_PER_HOUR / self.target_block_time != self.constants.blocks_per_hour:
            raise ValueError("target block time disagrees with blocks_per_hour")

    @property
    def fee_per_block(self) -> Decimal:
        return self.scenario.fees_per_day.value / self.constants.blocks_per_day

    @property
    def reward_per_block(self) -> Decimal:
        return self.constants.current_mint.value + self.fee_per_block

    @property
    def expected_income_eur_per_hour(self) -> Decimal:
        return (
            self.constants.blocks_per_hour
            * self.reward_per_block
            * self.scenario.exchange_rate.value
        )


@dataclass(frozen=True)
class SimState:
    height: int
    difficulty: Decimal  # expected TH per block
    cohorts: tuple[Cohort, ...]
    cumulative_energy: EnergyKWh
    cumulative_income_btc: Btc
    clock_hours: Decimal
    period: int = 0

    @classmethod
    def initial(cls, difficulty: Decimal = Decimal(1)) -> SimState:
        return cls(0, difficulty, (), EnergyKWh(0), Btc(0), Decimal(0))

    @property
    def active_count(self) -> Decimal:
        return sum((c.count for c in self.cohorts if c.active), Decimal(0))

    @property
    def total_count(self) -> Decimal:
        return sum((c.count for c in self.cohorts), Decimal(0))

    @property
    def hashpower(self) -> HashRateTHs:
        return HashRateTHs(
            sum((c.count * c.device.hashrate.value for c in self.cohorts if c.active), Decimal(0))
        )

    @property
    def power_kw(self) -> Decimal:
        return sum((c.count * c.device.power.value for c in self.cohorts if c.active), Decimal(0))

    def expected_blocks_per_hour(self) -> Decimal:
        h = self.hashpower.value
        if h == 0:
            return Decimal(0)
        return SECONDS_PER_HOUR * h / self.difficulty


@dataclass(frozen=True)
class Snapshot:
    period: int
    hashpower: HashRateTHs
    elapsed_hours: Decimal
    blocks: int
    energy: EnergyKWh
    power_kw: Decimal
    income_btc: Btc
    income_eur: Eur
    energy_cost_eur: Eur
    amort_eur: Eur

    @property
    def profit_eur(self) -> Eur:
        return self.income_eur - self.energy_cost_eur - self.amort_eur

    @property
    def energy_twh_per_year_rate(self) -> Decimal:
        return self.power_kw * HOURS_PER_YEAR / KWH_PER_TWH

    @property
    def income_eur_per_hour(self) -> Decimal:
        return self.income_eur.value / self.elapsed_hours


@dataclass(frozen=True)
class SimTrace:
    config: SimConfig
    snapshots: tuple[Snapshot, ...]
    converged: bool
    final_state: SimState = field(repr=False)

    @property
    def final_hashpower(self) -> HashRateTHs:
        return self.final_state.hashpower


def _decide(state: SimState, cfg: SimConfig) -> tuple[Cohort, ...]:
    dev = cfg.device
    income_h = cfg.expected_income_eur_per_hour
    energy_h = dev.power.value * cfg.scenario.energy_price.value
    full_h = dev.hourly_amortization.value + energy_h
    if full_h <= 0:
        raise ZeroCostHash("device costs nothing to run; no finite equilibrium")

    cohorts = list(state.cohorts)
    active = state.active_count

    # shutdown: energy alone no longer covered by income
    if energy_h > 0 and active * energy_h > income_h:
        keep = (income_h / energy_h) / active
        idle = Decimal(0)
        nxt = []
        for c in cohorts:
            if c.active:
                nxt.append(replace(c, count=c.count * keep))
                idle += c.count - c.count * keep
            else:
                idle += c.count
        cohorts = [c for c in nxt if c.count > 0]
        if idle > 0:
            cohorts.append(Cohort(dev, idle, active=False))
        return tuple(cohorts)

    # idle hardware is sunk; switch it back on while energy is covered
    idle = sum((c.count for c in cohorts if not c.active), Decimal(0))
    if idle > 0:
        room = idle if energy_h == 0 else min(idle, income_h / energy_h - active)
        if room > 0:
            cohorts = [c for c in cohorts if c.active]
            cohorts.append(Cohort(dev, room, active=True))
            if idle - room > 0:
                cohorts.append(Cohort(dev, idle - room, active=False))

    # entry: buy while full cost per device-hour is below income per device
    target = income_h / full_h
    total = sum((c.count for c in cohorts), Decimal(0))
    if total < target:
        add = min(target - total, cfg.entry_granularity * target)
        cohorts.append(Cohort(dev, add, active=True))
    return tuple(cohorts)


def _advance(state: SimState, cfg: SimConfig) -> tuple[SimState, Snapshot]:
    cohorts = _decide(state, cfg)
    was_empty = state.hashpower.value == 0
    nxt = replace(state, cohorts=cohorts)
    h = nxt.hashpower.value
    interval = cfg.retarget_interval_blocks
    nominal_s = interval * cfg.target_block_time

    difficulty = state.difficulty
    if h == 0:
        # nobody mining: the chain stalls, the clock still runs one nominal interval
        blocks = 0
        elapsed_s = nominal_s
    else:
        if was_empty:
            # first hashpower to show up sets the genesis difficulty
            difficulty = h * cfg.target_block_time
        blocks = interval
        elapsed_s = interval * difficulty / h
    elapsed_h = elapsed_s / SECONDS_PER_HOUR

    dev = cfg.device
    income = Btc(blocks * cfg.reward_per_block)
    power = nxt.power_kw
    energy = EnergyKWh(power * elapsed_h)
    energy_cost = Eur(energy.value * cfg.scenario.energy_price.value)
    # idle devices keep amortizing
    amort = Eur(nxt.total_count * dev.hourly_amortization.value * elapsed_h)

    if h > 0:
        difficulty = difficulty * nominal_s / elapsed_s

    snap = Snapshot(
        period=state.period + 1,
        hashpower=nxt.hashpower,
        elapsed_hours=elapsed_h,
        blocks=blocks,
        energy=energy,
        power_kw=power,
        income_btc=income,
        income_eur=Eur(income.value * cfg.scenario.exchange_rate.value),
        energy_cost_eur=energy_cost,
        amort_eur=amort,
    )
    new_state = replace(
        nxt,
        height=state.height + blocks,
        difficulty=difficulty,
        cumulative_energy=state.cumulative_energy + energy,
        cumulative_income_btc=state.cumulative_income_btc + income,
        clock_hours=state.clock_hours + elapsed_h,
        period=state.period + 1,
    )
    return new_state, snap


def step_period(state: SimState, cfg: SimConfig) -> SimState:
    return _advance(state, cfg)[0]


def equilibrium_hashpower(cfg: SimConfig) -> HashRateTHs:
    income = income_eur(ONE_YEAR, cfg.constants, cfg.scenario)
    return hashpower_equilibrium(
        income, cost_per_hash(cfg.device, cfg.scenario.energy_price), ONE_YEAR
    )


def equilibrium_energy_rate(cfg: SimConfig) -> EnergyKWh:
    """Yearly energy at equilibrium from the amortization-factor form."""
    income = income_eur(ONE_YEAR, cfg.constants, cfg.scenario)
    return energy_from_amf(income, amortization_factor(cfg.device), cfg.scenario.energy_price)


def _within(value: Decimal, target: Decimal, tol: Decimal) -> bool:
    if target == 0:
        return value == 0
    return abs(value - target) <= tol * abs(target)


def is_converged(state: SimState, cfg: SimConfig) -> bool:
    tol = cfg.convergence_tolerance
    rate = state.power_kw * HOURS_PER_YEAR
    return _within(state.hashpower.value, equilibrium_hashpower(cfg).value, tol) and _within(
        rate, equilibrium_energy_rate(cfg).value, tol
    )


def run_simulation(cfg: SimConfig, state: SimState | None = None) -> SimTrace:
    """Step until the fleet sits within tolerance of the closed-form equilibrium.

    Raises NonConvergence, carrying the partial trace, when
    ``max_retarget_periods`` is exhausted first.
    """
    if cost_per_hash(cfg.device, cfg.scenario.energy_price) <= 0:
        raise ZeroCostHash("cost per hash must be > 0")
    state = state or SimState.initial()
    snaps: list[Snapshot] = []
    for _ in range(cfg.max_retarget_periods):
        state, snap = _advance(state, cfg)
        snaps.append(snap)
        if is_converged(state, cfg):
            return SimTrace(cfg, tuple(snaps), True, state)
    trace = SimTrace(cfg, tuple(snaps), False, state)
    raise NonConvergence(
        f"no convergence within {cfg.max_retarget_periods} retarget periods "
        f"(hashpower {state.hashpower.value:.6E} TH/s, "
        f"equilibrium {equilibrium_hashpower(cfg).value:.6E} TH/s)",
        trace,
    )


@dataclass(frozen=True)
class IncomeInvarianceReport:
    consistent: bool
    periods_compared: int
    max_relative_deviation: Decimal
    expected_income_btc: Btc


def aggregate_income_invariance_check(
    traces: Sequence[SimTrace], rel_tol: Decimal = Decimal("1e-9")
) -> IncomeInvarianceReport:
    """Check that BTC income per period does not depend on the fleet.

    Every period of every trace is compared against ``interval * (mint +
    fee per block)``; traces must share scenario and protocol constants.
    """
    if not traces:
        raise ValueError("no traces given")
    ref = traces[0].config
    for t in traces[1:]:
        c = t.config
        if (
            c.scenario != ref.scenario
            or c.constants != ref.constants
            or c.retarget_interval_blocks != ref.retarget_interval_blocks
        ):
            raise IncomparableTraces("traces come from different scenarios or protocol settings")
    expected = ref.retarget_interval_blocks * ref.reward_per_block
    periods = min(len(t.snapshots) for t in traces)
    worst = Decimal(0)
    for t in traces:
        for snap in t.snapshots[:periods]:
            got = snap.income_btc.value
            dev = abs(got - expected) / expected if expected else abs(got)
            worst = max(worst, dev)
    return IncomeInvarianceReport(worst <= rel_tol, periods, worst, Btc(expected))


def emit_trace(trace: SimTrace, fmt: str = "csv") -> bytes:
    rows = [
        [
            str(s.period),
            fmt_fixed(s.hashpower.value, 3),
            fmt_fixed(s.energy_twh_per_year_rate, 3),
            fmt_fixed(s.income_btc.value, 8),
            fmt_fixed(s.income_eur.value, 2),
            fmt_fixed(s.profit_eur.value, 2),
        ]
        for s in trace.snapshots
    ]
    return emit(TRACE_HEADER, rows, fmt)
