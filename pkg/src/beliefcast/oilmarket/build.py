"""Builds the eight-quarter 1990 oil-market network from a parameter file.

Layout: 1989 quarters are historical constants (only series later quarters
actually reference are emitted, so the graph stays fully connected); the
four 1990 quarters wire the formula set from ``formulas.py``; annual and tax
nodes sit outside the quarter grid.  Sinks are exactly WTIp.1..WTIp.4 -- the
import-fee-adjusted benchmark price per quarter.

Lags are plain arcs to earlier-quarter nodes: the year-over-year production
deltas of 1990 quarter q reference the matching 1989 constant, the
quarter-over-quarter ones reference q-1.
"""

from __future__ import annotations

from ..errors import MissingPeriod
from ..network import Network, build_network
from .parameters import (
    FORECAST_QUARTERS,
    HISTORY_QUARTERS,
    PERIODS,
    SUFFIX,
    MarketParameters,
)

NETWORK_NAME = "oil-market-1990-base"

FIVE_POINT = [{"label": str(k), "value": float(k)} for k in range(1, 6)]


def _num(v: float) -> str:
    fv = float(v)
    if fv == int(fv) and abs(fv) < 1e15:
        return str(int(fv))
    return repr(fv)


def _year_ago(label: str) -> str:
    idx = PERIODS.index(label) - 4
    if idx < 0:
        raise MissingPeriod(f"no quarter one year before {label}")
    return PERIODS[idx]


def _prev(label: str) -> str:
    idx = PERIODS.index(label) - 1
    if idx < 0:
        raise MissingPeriod(f"no quarter before {label}")
    return PERIODS[idx]


def fuel_switch_expression(level_id: str, duration_id: str,
                           table) -> str:
    """Nested-if encoding of the switching grid; semantics match
    formulas.fuel_switching exactly."""
    def duration_leaf(row: tuple[float, ...]) -> str:
        text = _num(row[-1])
        for edge, value in zip(reversed(table.duration_edges), reversed(row[:-1])):
            text = f"if({duration_id} < {_num(edge)}, {_num(value)}, {text})"
        return text

    text = "0"
    for edge, row in zip(reversed(table.level_edges), reversed(table.mmbd)):
        text = f"if({level_id} < {_num(edge)}, {duration_leaf(row)}, {text})"
    return text


def hedge_expression(intragulf_id: str, market_share_id: str,
                     hedge_map: dict[int, tuple[float, ...]]) -> str:
    """Nested-if encoding of the (intragulf, market share) -> MMBD map."""
    def ms_leaf(row: tuple[float, ...]) -> str:
        text = _num(row[4])
        for ms in (4, 3, 2, 1):
            text = f"if({market_share_id} = {ms}, {_num(row[ms - 1])}, {text})"
        return text

    text = ms_leaf(hedge_map[5])
    for ig in (4, 3, 2, 1):
        text = f"if({intragulf_id} = {ig}, {ms_leaf(hedge_map[ig])}, {text})"
    return text


def build_base_case_document(p: MarketParameters) -> dict:
    """The network document for the base case (see build_base_case)."""
    nodes: list[dict] = []

    def add(node_id: str, category: str, period: str, **kind_fields) -> None:
        nodes.append({"id": node_id, "category": category, "period": period,
                      **kind_fields})

    def const(node_id: str, category: str, period: str, value: float) -> None:
        add(node_id, category, period, kind="constant", value=float(value))

    def normal_prior(node_id: str, category: str, period: str,
                     mu: float, sigma: float) -> None:
        add(node_id, category, period, kind="prior",
            dist={"type": "normal", "mu": mu, "sigma": sigma})

    # --- 1989 history: constants that 1990 nodes reference through lags
    for label in HISTORY_QUARTERS:
        s = SUFFIX[label]
        h = p.history[label]
        const(f"CoreProd.{s}", "historical", label, h["core_prod"])
        const(f"USProd.{s}", "historical", label, h["us_prod"])
        const(f"NOProd.{s}", "historical", label, h["no_prod"])
    const("WTI.a", "historical", "89Q4", p.history["89Q4"]["wti"])
    const("OPEC.a", "historical", "89Q4", p.history["89Q4"]["opec"])
    const("Duration.a", "historical", "89Q4",
          p.history["89Q4"]["duration_below_threshold"])

    # --- annual block
    const("NCCap", "annual", "annual", p.non_core_capacity)
    add("NCProd", "annual", "annual", kind="deterministic", parents=["NCCap"],
        expr=f"{_num(p.non_core_utilization)} * NCCap")
    const("CCap", "supply", "annual", p.total_core_capacity)
    for comp, node_id in (("ldc", "LDCGrowth"), ("we", "WEGrowth"),
                          ("us", "USGrowth"), ("japan", "JapanGrowth")):
        mu, sigma = p.growth_priors[comp]
        normal_prior(node_id, "annual", "annual", mu, sigma)
    w = p.growth_weights
    add("WorldGrowth", "annual", "annual", kind="deterministic",
        parents=["LDCGrowth", "WEGrowth", "USGrowth", "JapanGrowth"],
        expr=(f"{_num(w['ldc'])} * LDCGrowth + {_num(w['we'])} * WEGrowth"
              f" + {_num(w['us'])} * USGrowth + {_num(w['japan'])} * JapanGrowth"))

    # --- tax block
    add("GT", "tax", "annual", kind="prior",
        dist={"type": "categorical", "values": [0.0, 1.0],
              "probs": [1.0 - p.gas_tax_prob, p.gas_tax_prob],
              "labels": ["no", "yes"]})
    add("GTSize", "tax", "annual", kind="prior",
        dist={"type": "categorical",
              "values": [v for v, _ in p.gas_tax_sizes],
              "probs": [pr for _, pr in p.gas_tax_sizes]})
    add("GTImpact", "tax", "annual", kind="deterministic", parents=["GT", "GTSize"],
        expr=f"if(GT = 1, {_num(p.gallons_per_barrel)} * GTSize, 0)")
    add("OIFee", "tax", "annual", kind="table", parents=["GT"],
        states=[{"label": "no", "value": 0.0}, {"label": "yes", "value": 1.0}],
        rows=[
            {"given": ["no"],
             "probs": [1.0 - p.import_fee.given_not_passed, p.import_fee.given_not_passed]},
            {"given": ["yes"],
             "probs": [1.0 - p.import_fee.given_passed, p.import_fee.given_passed]},
        ])

    # --- 1990 quarters
    for label in FORECAST_QUARTERS:
        q = SUFFIX[label]
        prev_s = SUFFIX[_prev(label)]
        year_ago_s = SUFFIX[_year_ago(label)]

        # demand side
        add(f"Level.{q}", "demand", label, kind="deterministic",
            parents=[f"WTI.{prev_s}"], expr=f"WTI.{prev_s}")
        add(f"Duration.{q}", "demand", label, kind="deterministic",
            parents=[f"Level.{q}", f"Duration.{prev_s}"],
            expr=(f"if(Level.{q} < {_num(p.fuel_switch.price_threshold)}, "
                  f"Duration.{prev_s} + 1, 0)"))
        add(f"FuelSwitch.{q}", "demand", label, kind="deterministic",
            parents=[f"Level.{q}", f"Duration.{q}"],
            expr=fuel_switch_expression(f"Level.{q}", f"Duration.{q}", p.fuel_switch))
        add(f"Demand.{q}", "demand", label, kind="deterministic",
            parents=["WorldGrowth", f"FuelSwitch.{q}", "GTImpact"],
            expr=(f"{_num(p.seasonal_base[label])} * (1 + {_num(p.growth_sensitivity)}"
                  f" * WorldGrowth) + FuelSwitch.{q}"
                  f" - {_num(p.tax_demand_response)} * GTImpact"))

        # supply side
        mu, sigma = p.us_prod[label]
        normal_prior(f"USProd.{q}", "supply", label, mu, sigma)
        mu, sigma = p.no_prod[label]
        normal_prior(f"NOProd.{q}", "supply", label, mu, sigma)
        mu, sigma = p.delta_i[label]
        normal_prior(f"DeltaI.{q}", "supply", label, mu, sigma)
        add(f"OCall.{q}", "supply", label, kind="deterministic",
            parents=[f"Demand.{q}", f"DeltaI.{q}", f"USProd.{q}", f"NOProd.{q}"],
            expr=f"Demand.{q} + DeltaI.{q} - USProd.{q} - NOProd.{q}")
        add(f"CoreDemand.{q}", "supply", label, kind="deterministic",
            parents=[f"OCall.{q}", "NCProd"], expr=f"OCall.{q} - NCProd")

        # politics
        add(f"Intragulf.{q}", "politics", label, kind="prior",
            dist={"type": "categorical",
                  "values": [1.0, 2.0, 3.0, 4.0, 5.0],
                  "probs": list(p.intragulf_prior)})
        add(f"MarketShare.{q}", "politics", label, kind="table",
            parents=[f"Intragulf.{q}"], states=list(FIVE_POINT),
            rows=[{"given": [str(ig)], "probs": list(p.market_share_cpt[ig])}
                  for ig in range(1, 6)])
        add(f"Politics.{q}", "politics", label, kind="deterministic",
            parents=[f"Intragulf.{q}", f"MarketShare.{q}"],
            expr=hedge_expression(f"Intragulf.{q}", f"MarketShare.{q}", p.hedge_map))

        add(f"CoreProd.{q}", "supply", label, kind="deterministic",
            parents=[f"CoreDemand.{q}", f"Politics.{q}"],
            expr=f"max(CoreDemand.{q} + Politics.{q}, 0)")
        add(f"CapUt.{q}", "supply", label, kind="deterministic",
            parents=[f"CoreProd.{q}", "CCap"], expr=f"CoreProd.{q} / CCap")
        add(f"Supply.{q}", "supply", label, kind="deterministic",
            parents=[f"USProd.{q}", f"NOProd.{q}", "NCProd", f"CoreProd.{q}"],
            expr=f"USProd.{q} + NOProd.{q} + NCProd + CoreProd.{q}")
        add(f"DeltaYCoreProd.{q}", "supply", label, kind="deterministic",
            parents=[f"CoreProd.{q}", f"CoreProd.{year_ago_s}"],
            expr=f"CoreProd.{q} - CoreProd.{year_ago_s}")
        add(f"DeltaQCoreProd.{q}", "supply", label, kind="deterministic",
            parents=[f"CoreProd.{q}", f"CoreProd.{prev_s}"],
            expr=f"CoreProd.{q} - CoreProd.{prev_s}")
        add(f"DeltaYSweet.{q}", "supply", label, kind="deterministic",
            parents=[f"USProd.{q}", f"NOProd.{q}",
                     f"USProd.{year_ago_s}", f"NOProd.{year_ago_s}"],
            expr=(f"(USProd.{q} + NOProd.{q})"
                  f" - (USProd.{year_ago_s} + NOProd.{year_ago_s})"))

        # prices
        const(f"Time.{q}", "price", label, float(PERIODS.index(label)))
        add(f"OPEC.{q}", "price", label, kind="deterministic",
            parents=[f"OPEC.{prev_s}", f"CapUt.{q}", f"DeltaYCoreProd.{q}",
                     f"DeltaQCoreProd.{q}", f"Supply.{q}", f"Demand.{q}",
                     f"DeltaI.{q}"],
            expr=(f"OPEC.{prev_s}"
                  f" + {_num(p.price.slope)} * (CapUt.{q}"
                  f" - {_num(p.price.reference_utilization)}) * {_num(p.price.scale)}"
                  f" + {_num(p.momentum_year_weight)} * DeltaYCoreProd.{q}"
                  f" + {_num(p.momentum_quarter_weight)} * DeltaQCoreProd.{q}"
                  f" - {_num(p.imbalance_weight)}"
                  f" * (Supply.{q} - Demand.{q} - DeltaI.{q})"))
        add(f"SSDiff.{q}", "price", label, kind="deterministic",
            parents=[f"Time.{q}", f"DeltaYSweet.{q}"],
            expr=(f"{_num(p.ss_diff.intercept)} + {_num(p.ss_diff.time_trend)}"
                  f" * Time.{q} - {_num(p.ss_diff.sweet_supply_coeff)}"
                  f" * DeltaYSweet.{q}"))
        add(f"WTI.{q}", "price", label, kind="deterministic",
            parents=[f"OPEC.{q}", f"SSDiff.{q}"], expr=f"OPEC.{q} + SSDiff.{q}")
        add(f"WTIp.{q}", "price", label, kind="deterministic",
            parents=["OIFee", f"WTI.{q}"],
            expr=f"if(OIFee = 1, max(WTI.{q}, {_num(p.fee_floor)}), WTI.{q})")

    return {
        "format": "beliefcast-network/1",
        "name": NETWORK_NAME,
        "periods": list(PERIODS),
        "nodes": nodes,
    }


def build_base_case(params: MarketParameters) -> Network:
    """Validated base-case network; sinks are exactly WTIp.1..WTIp.4."""
    return build_network(build_base_case_document(params))
