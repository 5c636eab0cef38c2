"""Typed DAG model: node specs, validation, serialization, topological order.

A `Network` is an immutable, validated directed acyclic graph.  Node kinds:

  * ``Constant``      -- fixed value (may carry a state label so discrete
                         tables can condition on it).
  * ``Prior``         -- root with an unconditional distribution.
  * ``Deterministic`` -- expression over parent values.
  * ``ConditionalTable`` -- discrete node: its own (label, value) states and
                         one probability row per combination of parent states.
  * ``ConditionalDistribution`` -- continuous node whose distribution is
                         selected by the joint state of discrete parents.

Structure (nodes and arcs) is separated from parameters (the numbers stored
inside the specs): swapping a parameter file re-derives all specs without
touching the shape of the graph; scenario work then edits specs, never the
document in place.

The document format is JSON (see docs/network-format.md); serialization is
canonical -- fixed key order, nodes sorted by id -- so that a network hash is
well-defined and round-trips are reproducible.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from . import expr as ex
from .errors import (
    ArityMismatch,
    BadProbabilityRow,
    CycleDetected,
    NetworkFormatError,
    UnknownParent,
)

FORMAT_TAG = "beliefcast-network/1"

CATEGORIES = ("historical", "annual", "tax", "demand", "supply", "politics", "price")

PROB_TOL = 1e-9


def format_value(v: float) -> str:
    """Canonical state label for a numeric value: '3' or '0.25'."""
    fv = float(v)
    if fv == int(fv) and abs(fv) < 1e15:
        return str(int(fv))
    return repr(fv)


# --- distributions -------------------------------------------------------------

@dataclass(frozen=True)
class Categorical:
    values: tuple[float, ...]
    probs: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def validate(self, where: str) -> None:
        if not self.values:
            raise NetworkFormatError(f"{where}: categorical needs at least one value")
        if len(self.values) != len(self.probs):
            raise BadProbabilityRow(where, "values and probs lengths differ")
        if any(p < 0 for p in self.probs):
            raise BadProbabilityRow(where, "negative probability")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise BadProbabilityRow(where, f"probabilities sum to {sum(self.probs)!r}, not 1")
        if len(set(self.values)) != len(self.values):
            raise NetworkFormatError(f"{where}: categorical values must be distinct")
        if self.labels is not None:
            if len(self.labels) != len(self.values):
                raise NetworkFormatError(f"{where}: labels and values lengths differ")
            if len(set(self.labels)) != len(self.labels):
                raise NetworkFormatError(f"{where}: labels must be distinct")

    def state_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(format_value(v) for v in self.values)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def validate(self, where: str) -> None:
        if not self.lo <= self.hi:
            raise NetworkFormatError(f"{where}: uniform needs lo <= hi")


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float
    trunc_lo: float | None = None
    trunc_hi: float | None = None

    def validate(self, where: str) -> None:
        if not self.sigma > 0:
            raise NetworkFormatError(f"{where}: normal needs sigma > 0")
        if (self.trunc_lo is None) != (self.trunc_hi is None):
            raise NetworkFormatError(f"{where}: truncation needs both bounds")
        if self.trunc_lo is not None and not self.trunc_lo < self.trunc_hi:
            raise NetworkFormatError(f"{where}: truncation needs trunc_lo < trunc_hi")


@dataclass(frozen=True)
class Triangular:
    lo: float
    mode: float
    hi: float

    def validate(self, where: str) -> None:
        if not (self.lo <= self.mode <= self.hi):
            raise NetworkFormatError(f"{where}: triangular needs lo <= mode <= hi")


DistributionSpec = Categorical | Uniform | Normal | Triangular


# --- node specs ------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    id: str
    category: str
    period: str
    value: float
    label: str | None = None

    @property
    def parents(self) -> tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Prior:
    id: str
    category: str
    period: str
    dist: DistributionSpec

    @property
    def parents(self) -> tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Deterministic:
    id: str
    category: str
    period: str
    parents: tuple[str, ...]
    expr: ex.Expression


@dataclass(frozen=True)
class ConditionalTable:
    id: str
    category: str
    period: str
    parents: tuple[str, ...]
    states: tuple[tuple[str, float], ...]  # (label, value), ordered
    rows: tuple[tuple[tuple[str, ...], tuple[float, ...]], ...]  # sorted by key

    def row_map(self) -> dict[tuple[str, ...], tuple[float, ...]]:
        return dict(self.rows)


@dataclass(frozen=True)
class ConditionalDistribution:
    id: str
    category: str
    period: str
    parents: tuple[str, ...]
    rows: tuple[tuple[tuple[str, ...], DistributionSpec], ...]  # sorted by key

    def row_map(self) -> dict[tuple[str, ...], DistributionSpec]:
        return dict(self.rows)


NodeSpec = Constant | Prior | Deterministic | ConditionalTable | ConditionalDistribution

STOCHASTIC_KINDS = (Prior, ConditionalTable, ConditionalDistribution)


def discrete_states(spec: NodeSpec) -> tuple[tuple[str, float], ...] | None:
    """(label, value) states when the node is finite-discrete, else None.

    Constants count as single-state discrete nodes; Priors only when
    categorical; ConditionalTable nodes carry explicit states.
    """
    if isinstance(spec, Constant):
        return ((spec.label if spec.label is not None else format_value(spec.value),
                 float(spec.value)),)
    if isinstance(spec, Prior) and isinstance(spec.dist, Categorical):
        return tuple(zip(spec.dist.state_labels(), (float(v) for v in spec.dist.values)))
    if isinstance(spec, ConditionalTable):
        return spec.states
    return None


# --- network -----------------------------------------------------------------------

@dataclass(frozen=True)
class Network:
    name: str
    periods: tuple[str, ...]
    nodes: Mapping[str, NodeSpec]
    _children: Mapping[str, tuple[str, ...]] = field(repr=False, compare=False)
    _order: tuple[str, ...] = field(repr=False, compare=False)

    def children(self, node_id: str) -> tuple[str, ...]:
        return self._children.get(node_id, ())

    def roots(self) -> tuple[str, ...]:
        return tuple(i for i, s in self.nodes.items() if not s.parents)

    def sinks(self) -> tuple[str, ...]:
        return tuple(sorted(i for i in self.nodes if not self._children.get(i)))

    def ancestors(self, node_id: str) -> set[str]:
        """Strict ancestor closure of one node."""
        seen: set[str] = set()
        stack = list(self.nodes[node_id].parents)
        while stack:
            p = stack.pop()
            if p not in seen:
                seen.add(p)
                stack.extend(self.nodes[p].parents)
        return seen

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)


def topological_order(net: Network) -> list[str]:
    """Every parent precedes every child; ties broken lexicographically.

    Deterministic by construction (Kahn's algorithm with a heap frontier), so
    the sampling order of a given network never depends on dict ordering.
    """
    return list(net._order)


def _compute_order(nodes: Mapping[str, NodeSpec]) -> tuple[str, ...]:
    indeg = {i: len(s.parents) for i, s in nodes.items()}
    children: dict[str, list[str]] = {i: [] for i in nodes}
    for i, s in nodes.items():
        for p in s.parents:
            children[p].append(i)
    frontier = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(frontier)
    order: list[str] = []
    while frontier:
        i = heapq.heappop(frontier)
        order.append(i)
        for c in children[i]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(frontier, c)
    return tuple(order)


def _find_cycle(nodes: Mapping[str, NodeSpec]) -> list[str] | None:
    """Returns a witness path [a, ..., a] if a cycle exists."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {i: WHITE for i in nodes}
    parent_edge: dict[str, str] = {}

    for start in sorted(nodes):
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(start, iter(sorted(nodes[start].parents)))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in nodes:
                    continue  # unknown parents are reported separately
                if color[nxt] == GREY:
                    # walk back up the grey stack to materialize the cycle
                    path = [nxt]
                    for n, _ in reversed(stack):
                        path.append(n)
                        if n == nxt:
                            break
                    path.reverse()
                    return path
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent_edge[nxt] = node
                    stack.append((nxt, iter(sorted(nodes[nxt].parents))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return None


def _validate(nodes: dict[str, NodeSpec], periods: tuple[str, ...]) -> None:
    valid_periods = set(periods) | {"annual"}
    for i, s in nodes.items():
        if s.category not in CATEGORIES:
            raise NetworkFormatError(f"node {i!r}: unknown category {s.category!r}")
        if s.period not in valid_periods:
            raise NetworkFormatError(f"node {i!r}: unknown period {s.period!r}")
        for p in s.parents:
            if p not in nodes:
                raise UnknownParent(i, p)
        if len(set(s.parents)) != len(s.parents):
            raise ArityMismatch(i, "duplicate parent declaration")

    cycle = _find_cycle(nodes)
    if cycle is not None:
        raise CycleDetected(cycle)

    roots = [i for i, s in nodes.items() if not s.parents]
    if not roots:
        raise NetworkFormatError("network has no root node")
    for i in roots:
        if not isinstance(nodes[i], (Constant, Prior)):
            raise NetworkFormatError(f"root node {i!r} must be a constant or a prior")

    for i, s in nodes.items():
        if isinstance(s, Prior):
            s.dist.validate(f"node {i!r}")
        elif isinstance(s, Deterministic):
            ex.check_limits(s.expr)
            used = ex.identifiers(s.expr)
            declared = set(s.parents)
            if used - declared:
                raise ArityMismatch(
                    i, f"expression uses undeclared identifier(s) {sorted(used - declared)}")
            if declared - used:
                raise ArityMismatch(
                    i, f"declared parent(s) {sorted(declared - used)} unused in expression")
        elif isinstance(s, (ConditionalTable, ConditionalDistribution)):
            _validate_table(nodes, i, s)


def _validate_table(nodes: Mapping[str, NodeSpec], node_id: str,
                    s: ConditionalTable | ConditionalDistribution) -> None:
    if not s.parents:
        raise NetworkFormatError(f"node {node_id!r}: conditional node needs parents")
    parent_states: list[tuple[str, ...]] = []
    for p in s.parents:
        ps = discrete_states(nodes[p])
        if ps is None:
            raise NetworkFormatError(
                f"node {node_id!r}: parent {p!r} is not discrete-valued")
        parent_states.append(tuple(lbl for lbl, _ in ps))

    expected = {()}
    for labels in parent_states:
        expected = {key + (lbl,) for key in expected for lbl in labels}

    seen = set()
    for key, row in s.rows:
        if key in seen:
            raise BadProbabilityRow(node_id, f"duplicate row for {key!r}")
        seen.add(key)
        if key not in expected:
            raise BadProbabilityRow(node_id, f"row key {key!r} matches no parent state combination")
        if isinstance(s, ConditionalTable):
            if len(row) != len(s.states):
                raise BadProbabilityRow(node_id, f"row {key!r} has wrong width")
            if any(p < 0 for p in row):
                raise BadProbabilityRow(node_id, f"row {key!r} has a negative entry")
            if abs(sum(row) - 1.0) > PROB_TOL:
                raise BadProbabilityRow(node_id, f"row {key!r} sums to {sum(row)!r}, not 1")
        else:
            row.validate(f"node {node_id!r} row {key!r}")
    missing = expected - seen
    if missing:
        raise BadProbabilityRow(node_id, f"missing row for {sorted(missing)[0]!r}")

    if isinstance(s, ConditionalTable):
        if not s.states:
            raise NetworkFormatError(f"node {node_id!r}: needs at least one state")
        labels = [lbl for lbl, _ in s.states]
        values = [v for _, v in s.states]
        if len(set(labels)) != len(labels) or len(set(values)) != len(values):
            raise NetworkFormatError(f"node {node_id!r}: state labels and values must be distinct")


def _network_from_specs(name: str, periods: tuple[str, ...],
                        specs: dict[str, NodeSpec]) -> Network:
    _validate(specs, periods)
    children: dict[str, list[str]] = {i: [] for i in specs}
    for i, s in specs.items():
        for p in s.parents:
            children[p].append(i)
    return Network(
        name=name,
        periods=periods,
        nodes=dict(sorted(specs.items())),
        _children={i: tuple(sorted(c)) for i, c in children.items()},
        _order=_compute_order(specs),
    )


def replace_nodes(net: Network, specs: dict[str, NodeSpec],
                  name: str | None = None) -> Network:
    """Build a new validated network from an edited spec map (same metadata)."""
    return _network_from_specs(name if name is not None else net.name,
                               net.periods, specs)


# --- document parsing -----------------------------------------------------------------

def _dist_from_doc(d: dict, where: str) -> DistributionSpec:
    if not isinstance(d, dict) or "type" not in d:
        raise NetworkFormatError(f"{where}: distribution must be an object with a 'type'")
    t = d["type"]
    try:
        if t == "categorical":
            labels = d.get("labels")
            return Categorical(tuple(float(v) for v in d["values"]),
                               tuple(float(p) for p in d["probs"]),
                               tuple(labels) if labels is not None else None)
        if t == "uniform":
            return Uniform(float(d["lo"]), float(d["hi"]))
        if t == "normal":
            lo = d.get("trunc_lo")
            hi = d.get("trunc_hi")
            return Normal(float(d["mu"]), float(d["sigma"]),
                          None if lo is None else float(lo),
                          None if hi is None else float(hi))
        if t == "triangular":
            return Triangular(float(d["lo"]), float(d["mode"]), float(d["hi"]))
    except KeyError as k:
        raise NetworkFormatError(f"{where}: distribution missing field {k}") from None
    raise NetworkFormatError(f"{where}: unknown distribution type {t!r}")


def _dist_to_doc(dist: DistributionSpec) -> dict:
    if isinstance(dist, Categorical):
        out = {"type": "categorical", "values": list(dist.values), "probs": list(dist.probs)}
        if dist.labels is not None:
            out["labels"] = list(dist.labels)
        return out
    if isinstance(dist, Uniform):
        return {"type": "uniform", "lo": dist.lo, "hi": dist.hi}
    if isinstance(dist, Normal):
        out = {"type": "normal", "mu": dist.mu, "sigma": dist.sigma}
        if dist.trunc_lo is not None:
            out["trunc_lo"] = dist.trunc_lo
            out["trunc_hi"] = dist.trunc_hi
        return out
    return {"type": "triangular", "lo": dist.lo, "mode": dist.mode, "hi": dist.hi}


def _node_from_doc(nd: dict) -> NodeSpec:
    try:
        node_id = nd["id"]
        category = nd["category"]
        period = nd["period"]
        kind = nd["kind"]
    except KeyError as k:
        raise NetworkFormatError(f"node entry missing field {k}: {nd!r}") from None
    if not isinstance(node_id, str) or not node_id:
        raise NetworkFormatError(f"bad node id {node_id!r}")
    where = f"node {node_id!r}"
    if kind == "constant":
        return Constant(node_id, category, period, float(nd["value"]), nd.get("label"))
    if kind == "prior":
        return Prior(node_id, category, period, _dist_from_doc(nd.get("dist"), where))
    if kind == "deterministic":
        parents = tuple(nd.get("parents", ()))
        text = nd.get("expr")
        if not isinstance(text, str):
            raise NetworkFormatError(f"{where}: deterministic node needs an 'expr' string")
        return Deterministic(node_id, category, period, parents, ex.parse_expression(text))
    if kind == "table":
        states = tuple((str(s["label"]), float(s["value"])) for s in nd.get("states", ()))
        rows = tuple(sorted(
            (tuple(str(g) for g in r["given"]), tuple(float(p) for p in r["probs"]))
            for r in nd.get("rows", ())))
        return ConditionalTable(node_id, category, period, tuple(nd.get("parents", ())),
                                states, rows)
    if kind == "conditional":
        rows = tuple(sorted(
            ((tuple(str(g) for g in r["given"]),
              _dist_from_doc(r.get("dist"), where)) for r in nd.get("rows", ())),
            key=lambda kv: kv[0]))
        return ConditionalDistribution(node_id, category, period,
                                       tuple(nd.get("parents", ())), rows)
    raise NetworkFormatError(f"{where}: unknown kind {kind!r}")


def _node_to_doc(s: NodeSpec) -> dict:
    base = {"id": s.id, "category": s.category, "period": s.period}
    if isinstance(s, Constant):
        base["kind"] = "constant"
        base["value"] = s.value
        if s.label is not None:
            base["label"] = s.label
    elif isinstance(s, Prior):
        base["kind"] = "prior"
        base["dist"] = _dist_to_doc(s.dist)
    elif isinstance(s, Deterministic):
        base["kind"] = "deterministic"
        base["parents"] = list(s.parents)
        base["expr"] = ex.print_expression(s.expr)
    elif isinstance(s, ConditionalTable):
        base["kind"] = "table"
        base["parents"] = list(s.parents)
        base["states"] = [{"label": lbl, "value": v} for lbl, v in s.states]
        base["rows"] = [{"given": list(k), "probs": list(r)} for k, r in s.rows]
    else:
        base["kind"] = "conditional"
        base["parents"] = list(s.parents)
        base["rows"] = [{"given": list(k), "dist": _dist_to_doc(d)} for k, d in s.rows]
    return base


def build_network(document: dict | str) -> Network:
    """Parse and fully validate a network document (dict or JSON text).

    Raises CycleDetected (with a witness path), UnknownParent, ArityMismatch,
    BadProbabilityRow, or NetworkFormatError.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise NetworkFormatError(f"not valid JSON: {e}") from None
    if not isinstance(document, dict):
        raise NetworkFormatError("network document must be a JSON object")
    if document.get("format", FORMAT_TAG) != FORMAT_TAG:
        raise NetworkFormatError(f"unsupported format tag {document.get('format')!r}")
    name = document.get("name", "")
    periods = tuple(document.get("periods", ()))
    node_docs = document.get("nodes")
    if not isinstance(node_docs, list) or not node_docs:
        raise NetworkFormatError("network document needs a non-empty 'nodes' list")
    specs: dict[str, NodeSpec] = {}
    for nd in node_docs:
        spec = _node_from_doc(nd)
        if spec.id in specs:
            raise NetworkFormatError(f"duplicate node id {spec.id!r}")
        specs[spec.id] = spec
    return _network_from_specs(name, periods, specs)


def serialize_network(net: Network) -> dict:
    """Canonical document: fixed key order, nodes sorted by id."""
    return {
        "format": FORMAT_TAG,
        "name": net.name,
        "periods": list(net.periods),
        "nodes": [_node_to_doc(net.nodes[i]) for i in sorted(net.nodes)],
    }


def network_to_json(net: Network) -> str:
    """Canonical JSON text; stable bytes for hashing and storage."""
    return json.dumps(serialize_network(net), indent=2) + "\n"


# --- parameter lints ------------------------------------------------------------------

@dataclass(frozen=True)
class Warning:
    code: str
    node: str
    message: str


def validate_parameters(net: Network) -> list[Warning]:
    """Non-fatal lints on an already-valid network.

    * ``unreachable``: a node with neither parents nor children (disconnected
      from every data flow) in a multi-node network.  Historical nodes are
      exempt: observed data rows legitimately stand alone once the quarters
      that referenced them are pinned.
    * ``zero-probability-state``: a categorical prior or table row carries an
      exactly-zero probability (the state can never occur).
    * ``constant-shadows-prior``: a constant and a prior share the same id
      base (text before the final dot) and period -- usually a leftover from
      pinning.
    """
    warnings: list[Warning] = []
    if len(net.nodes) > 1:
        for i, s in net.nodes.items():
            if not s.parents and not net.children(i) and s.category != "historical":
                warnings.append(Warning("unreachable", i, "node has no parents and no children"))
    for i, s in net.nodes.items():
        if isinstance(s, Prior) and isinstance(s.dist, Categorical):
            if any(p == 0.0 for p in s.dist.probs):
                warnings.append(Warning("zero-probability-state", i,
                                        "categorical prior has a zero-probability state"))
        elif isinstance(s, ConditionalTable):
            if any(p == 0.0 for _, row in s.rows for p in row):
                warnings.append(Warning("zero-probability-state", i,
                                        "a table row has a zero-probability state"))
    by_base: dict[tuple[str, str], list[NodeSpec]] = {}
    for i, s in net.nodes.items():
        base = i.rsplit(".", 1)[0]
        by_base.setdefault((base, s.period), []).append(s)
    for (base, _), group in sorted(by_base.items()):
        kinds = {type(s) for s in group}
        if Constant in kinds and Prior in kinds:
            const_id = next(s.id for s in group if isinstance(s, Constant))
            warnings.append(Warning("constant-shadows-prior", const_id,
                                    f"constant shadows a prior with id base {base!r}"))
    return warnings
