"""Supply-chain and price formulas of the bundled oil-market model.

Each function here is the exact arithmetic that the network builder emits as
a deterministic-node expression, so the two routes can be cross-checked in
tests.  Units: volumes in MMBD (million barrels per day), prices in $/bbl,
tax sizes in $/gal, growth rates as fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import (
    BadCoefficients,
    BadHedgeMap,
    BadTable,
    MonotonicityViolation,
    OutOfRangeTax,
    ZeroCapacity,
)

GALLONS_PER_BARREL = 42.0

GROWTH_COMPONENTS = ("ldc", "we", "us", "japan")


@dataclass(frozen=True)
class PoliticalState:
    """Qualitative read of core-producer politics on two 5-point scales:
    intragulf 1 = harmony .. 5 = war; market_share 1 = strict quota
    compliance .. 5 = rampant cheating."""

    intragulf: int
    market_share: int

    def __post_init__(self):
        if self.intragulf not in range(1, 6) or self.market_share not in range(1, 6):
            raise ValueError("political scales take integer values 1..5")


def world_growth(ldc: float, we: float, us: float, japan: float,
                 weights: Mapping[str, float]) -> float:
    """Regression-weighted composite of regional GDP growth rates."""
    return (weights["ldc"] * ldc + weights["we"] * we
            + weights["us"] * us + weights["japan"] * japan)


def gasoline_tax_impact(passed: bool, per_gallon: float,
                        gallons_per_barrel: float = GALLONS_PER_BARREL) -> float:
    """$/bbl equivalent of a federal gasoline tax increase (0 if not passed)."""
    if not passed:
        return 0.0
    if not 0.01 <= per_gallon <= 0.50:
        raise OutOfRangeTax(f"tax size {per_gallon} $/gal outside [0.01, 0.50]")
    return gallons_per_barrel * per_gallon


@dataclass(frozen=True)
class ImportFeeParams:
    given_passed: float      # P(import fee | gasoline tax passed)
    given_not_passed: float  # P(import fee | gasoline tax not passed)

    def __post_init__(self):
        for p in (self.given_passed, self.given_not_passed):
            if not 0.0 <= p <= 1.0:
                raise MonotonicityViolation(f"probability {p} outside [0, 1]")
        # a passed gasoline tax must strictly lower the odds of an import fee
        if not self.given_passed < self.given_not_passed:
            raise MonotonicityViolation(
                f"P(fee | tax passed) = {self.given_passed} must be strictly below "
                f"P(fee | not passed) = {self.given_not_passed}")


def import_fee_prior(gas_tax_passed: bool, params: ImportFeeParams) -> float:
    return params.given_passed if gas_tax_passed else params.given_not_passed


@dataclass(frozen=True)
class FuelSwitchTable:
    """Extra oil demand from dual-fired utility plants switching to oil.

    Switching only pays below ``price_threshold`` ($15/bbl); the lower the
    price and the longer it has held, the more plants switch, up to 2 MMBD.
    ``level_edges`` are ascending price-band upper bounds ending exactly at
    the threshold; ``duration_edges`` are ascending quarter-count cutoffs
    (duration < edge[0] is column 0, >= edge[-1] is the last column);
    ``mmbd`` is the (level band x duration band) grid.
    """

    price_threshold: float
    level_edges: tuple[float, ...]
    duration_edges: tuple[float, ...]
    mmbd: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if list(self.level_edges) != sorted(self.level_edges) or \
                list(self.duration_edges) != sorted(self.duration_edges):
            raise BadTable("band edges must be ascending")
        if not self.level_edges or self.level_edges[-1] != self.price_threshold:
            raise BadTable("last level edge must equal the price threshold")
        if len(self.mmbd) != len(self.level_edges):
            raise BadTable("one value row per level band is required")
        width = len(self.duration_edges) + 1
        for row in self.mmbd:
            if len(row) != width:
                raise BadTable("one value column per duration band is required")
            for v in row:
                if not 0.0 <= v <= 2.0:
                    raise BadTable(f"switching volume {v} outside [0, 2] MMBD")
            if list(row) != sorted(row):
                raise BadTable("switching must be non-decreasing in duration")
        for col in range(width):
            column = [row[col] for row in self.mmbd]
            if column != sorted(column, reverse=True):
                raise BadTable("switching must be non-increasing in price level")


def fuel_switching(level: float, duration: float, table: FuelSwitchTable) -> float:
    """MMBD of switching demand for a quarter-start price and a streak of
    consecutive quarters already spent below the threshold."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if level >= table.price_threshold:
        return 0.0
    row = 0
    while level >= table.level_edges[row]:
        row += 1
    col = 0
    for edge in table.duration_edges:
        if duration >= edge:
            col += 1
    return table.mmbd[row][col]


def demand_quarter(seasonal_base: float, growth: float, sensitivity: float,
                   fuel_switch: float) -> float:
    """Quarterly world demand: seasonal base scaled by growth, plus switching."""
    return seasonal_base * (1.0 + sensitivity * growth) + fuel_switch


def call_on_opec(demand: float, us_prod: float, no_prod: float,
                 delta_i: float) -> float:
    """Effective demand for the cartel's oil: world demand plus inventory
    build, minus non-cartel supply."""
    return demand + delta_i - us_prod - no_prod


def core_demand(o_call: float, nc_prod: float) -> float:
    """Demand left for the core producers once the others have sold."""
    return o_call - nc_prod


def core_production(demand_on_core: float, hedge: float) -> float:
    """Core output: demand on the core plus the political hedge, floored at 0."""
    return max(demand_on_core + hedge, 0.0)


def capacity_utilization(core_prod: float, c_cap: float) -> float:
    """Fraction of core physical capacity in use -- the price-pressure signal."""
    if c_cap <= 0:
        raise ZeroCapacity(f"core capacity must be positive, got {c_cap}")
    return core_prod / c_cap


def validate_hedge_map(hedge_map: Mapping[int, Sequence[float]],
                       bound: float = 3.0) -> None:
    """Shape constraints: strict compliance means zero hedge; more cheating
    never lowers output; magnitudes stay within ``bound`` MMBD."""
    for ig in range(1, 6):
        if ig not in hedge_map or len(hedge_map[ig]) != 5:
            raise BadHedgeMap(f"hedge map needs 5 market-share entries for intragulf {ig}")
        row = list(hedge_map[ig])
        if row[0] != 0.0:
            raise BadHedgeMap("strict compliance (market share 1) must map to 0 hedge")
        if row != sorted(row):
            raise BadHedgeMap("hedge must be non-decreasing in market-share cheating")
        if any(abs(v) > bound for v in row):
            raise BadHedgeMap(f"hedge magnitude exceeds {bound} MMBD")


def political_hedge(state: PoliticalState,
                    cpt: Mapping[int, Sequence[float]],
                    hedge_map: Mapping[int, Sequence[float]]) -> float:
    """MMBD production adjustment for a political state.

    ``cpt`` gives P(market_share | intragulf) and is validated for
    normalization; ``hedge_map`` maps (intragulf, market_share) to MMBD and
    must satisfy the shape constraints above.
    """
    for ig in range(1, 6):
        row = cpt.get(ig)
        if row is None or len(row) != 5:
            raise BadHedgeMap(f"market-share table needs a 5-entry row for intragulf {ig}")
        if abs(sum(row) - 1.0) > 1e-9 or any(p < 0 for p in row):
            raise BadHedgeMap(f"market-share row for intragulf {ig} is not a distribution")
    validate_hedge_map(hedge_map)
    return float(hedge_map[state.intragulf][state.market_share - 1])


@dataclass(frozen=True)
class PricePressureParams:
    """Anchored-linear response of price to capacity utilization.

    At ``reference_utilization`` the price equals the anchor passed in;
    above it each point of utilization adds ``slope * scale`` $/bbl.
    """

    reference_utilization: float
    slope: float
    scale: float

    def __post_init__(self):
        if self.slope * self.scale <= 0:
            raise BadCoefficients("price response must be strictly increasing in utilization")


def opec_price(cap_ut: float, prior_price: float, params: PricePressureParams) -> float:
    """Marker-crude price from utilization pressure around an anchor price."""
    if not 0.0 <= cap_ut <= 1.2:
        raise ValueError(f"capacity utilization {cap_ut} outside [0, 1.2]")
    return prior_price + params.slope * (cap_ut - params.reference_utilization) * params.scale


@dataclass(frozen=True)
class SweetSourCoeffs:
    intercept: float
    time_trend: float        # $/bbl per quarter; the sweet shortage keeps widening
    sweet_supply_coeff: float  # $/bbl per MMBD of extra sweet supply

    def __post_init__(self):
        if self.time_trend < 0:
            raise BadCoefficients("time trend must be >= 0")
        if self.sweet_supply_coeff < 0:
            raise BadCoefficients("sweet supply coefficient must be >= 0")


def sweet_sour_diff(time_index: float, delta_y_sweet: float,
                    coeffs: SweetSourCoeffs) -> float:
    """Premium of light sweet crude over sour, $/bbl."""
    return (coeffs.intercept + coeffs.time_trend * time_index
            - coeffs.sweet_supply_coeff * delta_y_sweet)


def wti_price(opec: float, ss_diff: float) -> float:
    """Benchmark US sweet crude: marker price plus the sweet premium."""
    return opec + ss_diff


def wti_with_fee(wti: float, fee_passed: bool, floor: float = 18.0) -> float:
    """Domestic price under an import fee: the fee floors prices at $18, so
    the reported price is 18 exactly when the fee passes and the computed
    price is at or below 18."""
    if fee_passed and wti <= floor:
        return floor
    return wti


def period_delta(current: float, previous: float) -> float:
    """Change over k periods: v(t) - v(t-k)."""
    return current - previous


def total_supply(us: float, no: float, nc: float, core: float) -> float:
    return us + no + nc + core
