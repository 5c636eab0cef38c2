"""Scenario overlays: ordered edit lists that turn one network into another.

An overlay never mutates its base network; applying it builds a new,
fully-revalidated network.  Edits:

  * ``Pin(node, value)``       -- replace any node with a constant.  If the
    node was discrete and the value matches one of its states, the constant
    keeps that state label and any conditional children's tables are reduced
    to the surviving rows.
  * ``ReplaceDist(node, dist)``-- swap a node for a prior with a new
    distribution (category and period preserved).
  * ``Excise(node, substitute)`` -- delete the node.  Deterministic
    dependents get the substitute folded into their expressions; conditional
    dependents are reduced to the rows selected by the substitute.  The
    substitute is explicit by design: dropping a whole analysis module is a
    modeling decision that should be visible in the overlay document.
  * ``InsertHistory(period, values)`` -- pin an entire quarter to observed
    data.  Must cover at least every stochastic node of that period; pinned
    nodes are re-categorized as historical.

The overlay document format is JSON ({name, base, edits: [...]}), described
in docs/network-format.md.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from . import network as nw
from .errors import (
    BeliefcastError,
    EditTargetMissing,
    IncompleteActuals,
    RewireTypeError,
    ValidationFailed,
)
from .oilmarket.build import build_base_case
from .oilmarket.parameters import SUFFIX, MarketParameters


# --- edits -----------------------------------------------------------------------

@dataclass(frozen=True)
class Pin:
    node: str
    value: float


@dataclass(frozen=True)
class ReplaceDist:
    node: str
    dist: nw.DistributionSpec


@dataclass(frozen=True)
class Excise:
    node: str
    substitute: float


@dataclass(frozen=True)
class InsertHistory:
    period: str
    values: tuple[tuple[str, float], ...]  # sorted (node, value) pairs

    @classmethod
    def from_mapping(cls, period: str, values: dict[str, float]) -> "InsertHistory":
        return cls(period, tuple(sorted((k, float(v)) for k, v in values.items())))


Edit = Pin | ReplaceDist | Excise | InsertHistory


@dataclass(frozen=True)
class ScenarioOverlay:
    name: str
    base: str  # name of the base network this overlay was written against
    edits: tuple[Edit, ...]


# --- edit application machinery ------------------------------------------------------

def _children_of(specs: dict[str, nw.NodeSpec], node: str) -> list[str]:
    return [i for i, s in specs.items() if node in s.parents]


def _substitute(e: ex.Expression, name: str, value: float) -> ex.Expression:
    if isinstance(e, ex.Ident):
        return ex.Num(value) if e.name == name else e
    if isinstance(e, ex.Unary):
        return ex.Unary(e.op, _substitute(e.operand, name, value))
    if isinstance(e, ex.Bin):
        return ex.Bin(e.op, _substitute(e.left, name, value),
                      _substitute(e.right, name, value))
    if isinstance(e, ex.Call):
        return ex.Call(e.fn, tuple(_substitute(a, name, value) for a in e.args))
    return e


def _state_label_for(spec: nw.NodeSpec, value: float) -> str | None:
    states = nw.discrete_states(spec)
    if states is None:
        return None
    for lbl, v in states:
        if v == value:
            return lbl
    return None


def _reduce_conditional(child, parent_idx: int, label: str, drop_parent: bool):
    """Keep only the rows selected by a parent's (now fixed) state; optionally
    remove the parent from the key entirely (excise) or keep the singleton
    component (pin)."""
    kept = []
    for key, row in child.rows:
        if key[parent_idx] != label:
            continue
        new_key = key[:parent_idx] + key[parent_idx + 1:] if drop_parent else key
        kept.append((new_key, row))
    if not kept:
        raise RewireTypeError(
            f"node {child.id!r} has no table row for parent state {label!r}")
    new_parents = (child.parents[:parent_idx] + child.parents[parent_idx + 1:]
                   if drop_parent else child.parents)
    if not new_parents:
        # table degenerates to an unconditional distribution
        ((_, payload),) = kept
        if isinstance(child, nw.ConditionalTable):
            return nw.Prior(child.id, child.category, child.period,
                            nw.Categorical(tuple(v for _, v in child.states),
                                           tuple(payload),
                                           tuple(lbl for lbl, _ in child.states)))
        return nw.Prior(child.id, child.category, child.period, payload)
    return type(child)(child.id, child.category, child.period, new_parents,
                       *((child.states, tuple(sorted(kept)))
                         if isinstance(child, nw.ConditionalTable)
                         else (tuple(sorted(kept, key=lambda kv: kv[0])),)))


def _pin(specs: dict[str, nw.NodeSpec], node: str, value: float,
         category: str | None = None) -> None:
    old = specs.get(node)
    if old is None:
        raise EditTargetMissing(node)
    label = _state_label_for(old, value)
    for child_id in _children_of(specs, node):
        child = specs[child_id]
        if isinstance(child, (nw.ConditionalTable, nw.ConditionalDistribution)):
            if label is None:
                raise RewireTypeError(
                    f"cannot pin {node!r} to {value!r}: {child_id!r} conditions on its "
                    f"states and no state has that value")
            idx = child.parents.index(node)
            specs[child_id] = _reduce_conditional(child, idx, label, drop_parent=False)
    specs[node] = nw.Constant(node, category or old.category, old.period,
                              float(value), label)


def _excise(specs: dict[str, nw.NodeSpec], node: str, substitute: float) -> None:
    old = specs.get(node)
    if old is None:
        raise EditTargetMissing(node)
    label = _state_label_for(old, substitute)
    for child_id in _children_of(specs, node):
        child = specs[child_id]
        if isinstance(child, nw.Deterministic):
            new_expr = _substitute(child.expr, node, float(substitute))
            new_parents = tuple(p for p in child.parents if p != node)
            if new_parents:
                specs[child_id] = nw.Deterministic(child.id, child.category,
                                                   child.period, new_parents, new_expr)
            else:
                # closed expression: fold the dependent into a constant
                specs[child_id] = nw.Constant(child.id, child.category, child.period,
                                              ex.eval_expression(new_expr, {}))
        else:
            if label is None:
                raise RewireTypeError(
                    f"cannot excise {node!r} with substitute {substitute!r}: "
                    f"{child_id!r} conditions on its states and no state has that value")
            idx = child.parents.index(node)
            specs[child_id] = _reduce_conditional(child, idx, label, drop_parent=True)
    del specs[node]


def _insert_history(specs: dict[str, nw.NodeSpec], edit: InsertHistory) -> None:
    covered = {node for node, _ in edit.values}
    for node, _ in edit.values:
        if node not in specs:
            raise EditTargetMissing(node)
        if specs[node].period != edit.period:
            raise ValidationFailed(
                f"insert-history for {edit.period!r} lists node {node!r} "
                f"of period {specs[node].period!r}")
    for node_id, spec in specs.items():
        if spec.period == edit.period and isinstance(spec, nw.STOCHASTIC_KINDS):
            if node_id not in covered:
                raise ValidationFailed(
                    f"insert-history for {edit.period!r} must pin stochastic "
                    f"node {node_id!r}")
    for node, value in edit.values:
        _pin(specs, node, value, category="historical")


def apply_overlay(base: nw.Network, overlay: ScenarioOverlay) -> nw.Network:
    """Apply edits in list order; returns a new validated network.

    Raises EditTargetMissing / RewireTypeError for edits that cannot apply,
    and ValidationFailed (carrying the first broken invariant) when the
    edited graph no longer validates.
    """
    specs: dict[str, nw.NodeSpec] = dict(base.nodes)
    for edit in overlay.edits:
        if isinstance(edit, Pin):
            _pin(specs, edit.node, edit.value)
        elif isinstance(edit, ReplaceDist):
            old = specs.get(edit.node)
            if old is None:
                raise EditTargetMissing(edit.node)
            edit.dist.validate(f"overlay edit for {edit.node!r}")
            specs[edit.node] = nw.Prior(edit.node, old.category, old.period, edit.dist)
        elif isinstance(edit, Excise):
            _excise(specs, edit.node, edit.substitute)
        else:
            _insert_history(specs, edit)
    try:
        return nw.replace_nodes(base, specs, name=overlay.name or None)
    except BeliefcastError as e:
        raise ValidationFailed(f"overlay {overlay.name!r} breaks validation: {e}") from e


# --- network diff ------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkDiff:
    added: tuple[str, ...]    # ids present in b only
    removed: tuple[str, ...]  # ids present in a only
    changed: tuple[str, ...]  # same id, different spec

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


def diff_networks(a: nw.Network, b: nw.Network) -> NetworkDiff:
    ids_a, ids_b = set(a.nodes), set(b.nodes)
    return NetworkDiff(
        added=tuple(sorted(ids_b - ids_a)),
        removed=tuple(sorted(ids_a - ids_b)),
        changed=tuple(sorted(i for i in ids_a & ids_b if a.nodes[i] != b.nodes[i])),
    )


# --- overlay documents ----------------------------------------------------------------------

OVERLAY_FORMAT_TAG = "beliefcast-overlay/1"


def overlay_from_doc(doc: dict) -> ScenarioOverlay:
    if doc.get("format", OVERLAY_FORMAT_TAG) != OVERLAY_FORMAT_TAG:
        raise ValidationFailed(f"unsupported overlay format {doc.get('format')!r}")
    edits: list[Edit] = []
    for e in doc.get("edits", ()):
        op = e.get("op")
        if op == "pin":
            edits.append(Pin(e["node"], float(e["value"])))
        elif op == "replace_dist":
            edits.append(ReplaceDist(e["node"], nw._dist_from_doc(e["dist"], "overlay")))
        elif op == "excise":
            edits.append(Excise(e["node"], float(e["substitute"])))
        elif op == "insert_history":
            edits.append(InsertHistory.from_mapping(e["period"], e["values"]))
        else:
            raise ValidationFailed(f"unknown overlay op {op!r}")
    return ScenarioOverlay(name=doc.get("name", ""), base=doc.get("base", ""),
                           edits=tuple(edits))


def overlay_to_doc(overlay: ScenarioOverlay) -> dict:
    edits = []
    for e in overlay.edits:
        if isinstance(e, Pin):
            edits.append({"op": "pin", "node": e.node, "value": e.value})
        elif isinstance(e, ReplaceDist):
            edits.append({"op": "replace_dist", "node": e.node,
                          "dist": nw._dist_to_doc(e.dist)})
        elif isinstance(e, Excise):
            edits.append({"op": "excise", "node": e.node, "substitute": e.substitute})
        else:
            edits.append({"op": "insert_history", "period": e.period,
                          "values": {k: v for k, v in e.values}})
    return {"format": OVERLAY_FORMAT_TAG, "name": overlay.name,
            "base": overlay.base, "edits": edits}


# --- the constrained-capacity scenario ----------------------------------------------------------

CONSTRAINED_NAME = "oil-market-1990-constrained"

_ACTUAL_SERIES = ("USProd", "NOProd", "DeltaI", "Demand", "OCall", "CoreDemand",
                  "CoreProd", "CapUt", "Supply", "DeltaYCoreProd", "DeltaQCoreProd",
                  "DeltaYSweet", "OPEC", "SSDiff", "WTI")


def constrained_overlay(params: MarketParameters, actuals: dict) -> ScenarioOverlay:
    """Edit list for the constrained-capacity case.

    Assumes an effective embargo of the producers listed in the actuals
    document and maximum output everywhere else: core production is pinned
    to the remaining core capacity and utilization to 1.0, non-core output
    rises from 90% of capacity to all of it, the political module is dropped
    (production is capacity-bound, politics cannot move it), fuel switching
    is dropped (sustained sub-threshold prices are no longer possible), the
    tax module is dropped, the first two 1990 quarters are pinned to
    observed data, and the two oldest history quarters fall away.
    """
    for q in ("90Q1", "90Q2"):
        if q not in actuals:
            raise IncompleteActuals(f"actuals document lacks {q!r}")
        for series in _ACTUAL_SERIES:
            if f"{series}.{SUFFIX[q]}" not in actuals[q]:
                raise IncompleteActuals(f"{q}: missing {series}.{SUFFIX[q]}")
    embargoed = actuals.get("embargoed")
    if not embargoed:
        raise IncompleteActuals("actuals document lacks 'embargoed'")

    available_capacity = params.core_capacity_without(list(embargoed))
    edits: list[Edit] = []

    # tax module out
    edits += [Excise(f"WTIp.{q}", 0.0) for q in "1234"]
    edits += [Excise("OIFee", 0.0), Excise("GTImpact", 0.0),
              Excise("GTSize", 0.05), Excise("GT", 0.0)]
    # fuel switching out (threshold prices unreachable), demand chain intact
    edits += [Excise(f"FuelSwitch.{q}", 0.0) for q in "1234"]
    edits += [Excise(f"Duration.{q}", 0.0) for q in "4321"]
    edits += [Excise(f"Level.{q}", 0.0) for q in "4321"]
    # political module out
    edits += [Excise(f"Politics.{q}", 0.0) for q in "1234"]
    edits += [Excise(f"MarketShare.{q}", 1.0) for q in "1234"]
    edits += [Excise(f"Intragulf.{q}", 1.0) for q in "1234"]
    # everyone else at maximum capacity
    edits.append(Pin("NCProd", params.non_core_capacity))
    # observed first half of 1990
    edits.append(InsertHistory.from_mapping("90Q1", dict(actuals["90Q1"])))
    edits.append(InsertHistory.from_mapping("90Q2", dict(actuals["90Q2"])))
    # core output capacity-bound for the forecast quarters
    for q in ("3", "4"):
        edits.append(Pin(f"CoreProd.{q}", available_capacity))
        edits.append(Pin(f"CapUt.{q}", 1.0))
        # with production pinned, the call-allocation chain is inert
        edits.append(Excise(f"CoreDemand.{q}", 0.0))
        edits.append(Excise(f"OCall.{q}", 0.0))
    # capacity constants lose all consumers once output is pinned
    edits += [Excise("CCap", 0.0), Excise("NCCap", 0.0)]
    # pinned quarters no longer reference these
    edits += [Excise("Time.1", 0.0), Excise("Time.2", 0.0)]
    for s in ("d", "c"):
        edits += [Excise(f"CoreProd.{s}", 0.0), Excise(f"USProd.{s}", 0.0),
                  Excise(f"NOProd.{s}", 0.0)]
    return ScenarioOverlay(name=CONSTRAINED_NAME, base="oil-market-1990-base",
                           edits=tuple(edits))


def build_constrained_case(params: MarketParameters, actuals: dict) -> nw.Network:
    """Base case transformed by the constrained-capacity overlay."""
    return apply_overlay(build_base_case(params), constrained_overlay(params, actuals))
