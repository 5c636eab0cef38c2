"""The bundled quarterly oil-market model: formulas, parameters, builder."""

from .build import build_base_case, build_base_case_document
from .formulas import (
    FuelSwitchTable,
    ImportFeeParams,
    PoliticalState,
    PricePressureParams,
    SweetSourCoeffs,
    call_on_opec,
    capacity_utilization,
    core_demand,
    core_production,
    demand_quarter,
    fuel_switching,
    gasoline_tax_impact,
    import_fee_prior,
    opec_price,
    period_delta,
    political_hedge,
    sweet_sour_diff,
    total_supply,
    world_growth,
    wti_price,
    wti_with_fee,
)
from .parameters import (
    FORECAST_QUARTERS,
    HISTORY_QUARTERS,
    PERIODS,
    SUFFIX,
    MarketParameters,
    QuarterTag,
    load_parameters,
    load_reference_actuals,
    parameters_from_doc,
)

__all__ = [
    "FuelSwitchTable", "ImportFeeParams", "PoliticalState", "PricePressureParams",
    "SweetSourCoeffs", "MarketParameters", "QuarterTag",
    "build_base_case", "build_base_case_document",
    "call_on_opec", "capacity_utilization", "core_demand", "core_production",
    "demand_quarter", "fuel_switching", "gasoline_tax_impact", "import_fee_prior",
    "opec_price", "period_delta", "political_hedge", "sweet_sour_diff",
    "total_supply", "world_growth", "wti_price", "wti_with_fee",
    "load_parameters", "load_reference_actuals", "parameters_from_doc",
    "FORECAST_QUARTERS", "HISTORY_QUARTERS", "PERIODS", "SUFFIX",
]
