"""Parameter file for the bundled 1990 oil-market model.

Everything numeric that is not graph structure lives here: historical
actuals, capacities, regression weights, seasonal demand bases, the
price-pressure curve, political tables, tax priors, and the fuel-switching
grid.  The file is versioned JSON (see docs/parameters-format.md for the
schema and units); the reference copy ships as package data.

The 1989 history and capacity figures are plausible placeholder values for
the period, calibrated so the bundled model reproduces its published summary
statistics -- they are configuration, not measurements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from ..errors import IncompleteParameters, NetworkFormatError
from .formulas import (
    FuelSwitchTable,
    ImportFeeParams,
    PricePressureParams,
    SweetSourCoeffs,
    validate_hedge_map,
)

FORMAT_TAG = "beliefcast-params/1"

PERIODS = ("89Q1", "89Q2", "89Q3", "89Q4", "90Q1", "90Q2", "90Q3", "90Q4")
SUFFIX = {"89Q1": "d", "89Q2": "c", "89Q3": "b", "89Q4": "a",
          "90Q1": "1", "90Q2": "2", "90Q3": "3", "90Q4": "4"}
FORECAST_QUARTERS = ("90Q1", "90Q2", "90Q3", "90Q4")
HISTORY_QUARTERS = ("89Q1", "89Q2", "89Q3", "89Q4")


@dataclass(frozen=True)
class QuarterTag:
    """One of the model's eight quarters, with its node-id suffix."""

    year: int
    quarter: int

    def __post_init__(self):
        if self.label() not in PERIODS:
            raise ValueError(f"quarter {self.year}Q{self.quarter} outside the model window")

    def label(self) -> str:
        return f"{self.year % 100}Q{self.quarter}"

    def suffix(self) -> str:
        return SUFFIX[self.label()]

    def index(self) -> int:
        """Quarters since the start of the window (89Q1 = 0)."""
        return PERIODS.index(self.label())


def _get(doc: Mapping[str, Any], *path: str) -> Any:
    cur: Any = doc
    for key in path:
        if not isinstance(cur, Mapping) or key not in cur:
            raise IncompleteParameters(".".join(path))
        cur = cur[key]
    return cur


@dataclass(frozen=True)
class MarketParameters:
    version: str
    history: dict[str, dict[str, float]]          # period label -> series -> value
    non_core_capacity: float                      # MMBD
    non_core_utilization: float                   # fraction of capacity produced
    core_capacity: dict[str, float]               # country -> MMBD
    growth_weights: dict[str, float]
    growth_priors: dict[str, tuple[float, float]]  # component -> (mu, sigma)
    seasonal_base: dict[str, float]               # 1990 quarter -> MMBD
    growth_sensitivity: float
    tax_demand_response: float                    # MMBD lost per $/bbl of gas tax
    fuel_switch: FuelSwitchTable
    us_prod: dict[str, tuple[float, float]]       # quarter -> (mu, sigma)
    no_prod: dict[str, tuple[float, float]]
    delta_i: dict[str, tuple[float, float]]
    intragulf_prior: tuple[float, ...]
    market_share_cpt: dict[int, tuple[float, ...]]
    hedge_map: dict[int, tuple[float, ...]]
    gas_tax_prob: float
    gas_tax_sizes: tuple[tuple[float, float], ...]  # (size $/gal, prob)
    import_fee: ImportFeeParams
    fee_floor: float
    price: PricePressureParams
    momentum_year_weight: float
    momentum_quarter_weight: float
    imbalance_weight: float
    ss_diff: SweetSourCoeffs
    gallons_per_barrel: float
    changelog: tuple[dict[str, Any], ...]

    @property
    def total_core_capacity(self) -> float:
        return sum(self.core_capacity.values())

    def core_capacity_without(self, excluded: list[str]) -> float:
        unknown = [c for c in excluded if c not in self.core_capacity]
        if unknown:
            raise IncompleteParameters(f"capacity.core.{unknown[0]}")
        return sum(v for c, v in self.core_capacity.items() if c not in excluded)


def parameters_from_doc(doc: Mapping[str, Any]) -> MarketParameters:
    """Parse and validate a parameter document; raises IncompleteParameters
    naming the first missing field."""
    if doc.get("format") != FORMAT_TAG:
        raise NetworkFormatError(f"unsupported parameter format {doc.get('format')!r}")

    history = {}
    for period in HISTORY_QUARTERS:
        series = {}
        for key in ("wti", "opec", "us_prod", "no_prod", "core_prod", "demand"):
            series[key] = float(_get(doc, "history", period, key))
        history[period] = series
    history["89Q4"]["duration_below_threshold"] = float(
        _get(doc, "history", "89Q4", "duration_below_threshold"))

    core = {str(c): float(v) for c, v in _get(doc, "capacity", "core").items()}
    if not core or any(v <= 0 for v in core.values()):
        raise NetworkFormatError("core capacities must be positive")
    nc_cap = float(_get(doc, "capacity", "non_core"))
    if nc_cap <= 0:
        raise NetworkFormatError("non-core capacity must be positive")

    weights = {k: float(v) for k, v in _get(doc, "world_growth", "weights").items()}
    priors = {k: (float(v["mu"]), float(v["sigma"]))
              for k, v in _get(doc, "world_growth", "priors").items()}
    for comp in ("ldc", "we", "us", "japan"):
        if comp not in weights:
            raise IncompleteParameters(f"world_growth.weights.{comp}")
        if comp not in priors:
            raise IncompleteParameters(f"world_growth.priors.{comp}")

    seasonal = {q: float(_get(doc, "demand", "seasonal_base", q)) for q in FORECAST_QUARTERS}
    if any(v <= 0 for v in seasonal.values()):
        raise NetworkFormatError("seasonal demand bases must be positive")

    fs = _get(doc, "fuel_switching")
    table = FuelSwitchTable(
        price_threshold=float(_get(fs, "price_threshold")),
        level_edges=tuple(float(v) for v in _get(fs, "level_edges")),
        duration_edges=tuple(float(v) for v in _get(fs, "duration_edges")),
        mmbd=tuple(tuple(float(v) for v in row) for row in _get(fs, "mmbd")),
    )

    def _quarterly_priors(section: str) -> dict[str, tuple[float, float]]:
        out = {}
        for q in FORECAST_QUARTERS:
            entry = _get(doc, "supply", section, q)
            out[q] = (float(entry["mu"]), float(entry["sigma"]))
        return out

    intragulf = tuple(float(p) for p in _get(doc, "politics", "intragulf_prior"))
    if len(intragulf) != 5 or abs(sum(intragulf) - 1.0) > 1e-9 or any(p < 0 for p in intragulf):
        raise NetworkFormatError("intragulf prior must be a 5-state distribution")
    cpt = {int(k): tuple(float(p) for p in row)
           for k, row in _get(doc, "politics", "market_share_cpt").items()}
    hedge = {int(k): tuple(float(v) for v in row)
             for k, row in _get(doc, "politics", "hedge_map").items()}
    validate_hedge_map(hedge)
    for ig in range(1, 6):
        row = cpt.get(ig)
        if row is None or len(row) != 5 or abs(sum(row) - 1.0) > 1e-9 or any(p < 0 for p in row):
            raise NetworkFormatError(f"market-share row for intragulf {ig} is not a distribution")

    sizes = _get(doc, "tax", "gas_tax_sizes")
    size_pairs = tuple((float(v), float(p))
                       for v, p in zip(sizes["values"], sizes["probs"]))
    if abs(sum(p for _, p in size_pairs) - 1.0) > 1e-9:
        raise NetworkFormatError("gas tax size probabilities must sum to 1")
    if any(not 0.01 <= v <= 0.50 for v, _ in size_pairs):
        raise NetworkFormatError("gas tax sizes must lie in [0.01, 0.50] $/gal")

    return MarketParameters(
        version=str(_get(doc, "version")),
        history=history,
        non_core_capacity=nc_cap,
        non_core_utilization=float(_get(doc, "capacity", "non_core_utilization")),
        core_capacity=core,
        growth_weights=weights,
        growth_priors=priors,
        seasonal_base=seasonal,
        growth_sensitivity=float(_get(doc, "demand", "growth_sensitivity")),
        tax_demand_response=float(_get(doc, "demand", "tax_response")),
        fuel_switch=table,
        us_prod=_quarterly_priors("us_prod"),
        no_prod=_quarterly_priors("no_prod"),
        delta_i=_quarterly_priors("delta_i"),
        intragulf_prior=intragulf,
        market_share_cpt=cpt,
        hedge_map=hedge,
        gas_tax_prob=float(_get(doc, "tax", "gas_tax_prob")),
        gas_tax_sizes=size_pairs,
        import_fee=ImportFeeParams(
            given_passed=float(_get(doc, "tax", "import_fee", "given_passed")),
            given_not_passed=float(_get(doc, "tax", "import_fee", "given_not_passed")),
        ),
        fee_floor=float(_get(doc, "tax", "fee_floor")),
        price=PricePressureParams(
            reference_utilization=float(_get(doc, "price", "reference_utilization")),
            slope=float(_get(doc, "price", "slope")),
            scale=float(_get(doc, "price", "scale")),
        ),
        momentum_year_weight=float(_get(doc, "price", "momentum_year_weight")),
        momentum_quarter_weight=float(_get(doc, "price", "momentum_quarter_weight")),
        imbalance_weight=float(_get(doc, "price", "imbalance_weight")),
        ss_diff=SweetSourCoeffs(
            intercept=float(_get(doc, "ss_diff", "intercept")),
            time_trend=float(_get(doc, "ss_diff", "time_trend")),
            sweet_supply_coeff=float(_get(doc, "ss_diff", "sweet_supply_coeff")),
        ),
        gallons_per_barrel=float(_get(doc, "gallons_per_barrel")),
        changelog=tuple(doc.get("changelog", ())),
    )


def load_parameters(path: str | None = None) -> MarketParameters:
    """Load a parameter file, defaulting to the packaged reference file."""
    if path is None:
        text = resources.files("beliefcast.oilmarket").joinpath(
            "data/market_parameters.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parameters_from_doc(json.loads(text))


def load_reference_actuals() -> dict:
    """1990 H1 actuals document used by the constrained-capacity scenario."""
    text = resources.files("beliefcast.oilmarket").joinpath(
        "data/actuals_1990_h1.json").read_text()
    return json.loads(text)
