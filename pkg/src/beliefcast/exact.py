"""Brute-force exact marginal of one target node by joint enumeration.

This is a test oracle, deliberately independent of the Monte Carlo path: it
never touches the RNG, walking instead over every joint assignment of the
finite-discrete stochastic ancestors of the target and accumulating
probability mass products.  Works only when every stochastic node in the
target's ancestor closure is finite-discrete and the joint state count is
small (<= STATE_SPACE_CAP).
"""

from __future__ import annotations

from . import network as nw
from .errors import NotFinitelyEnumerable, StateSpaceTooLarge, UnknownTarget
from .expr import eval_expression

STATE_SPACE_CAP = 1_000_000


def enumerate_exact(net: nw.Network, target: str) -> dict[float, float]:
    """Exact marginal distribution {value: probability} of ``target``.

    Raises NotFinitelyEnumerable when a stochastic ancestor is continuous,
    StateSpaceTooLarge when the joint discrete state count exceeds the cap.
    """
    if target not in net.nodes:
        raise UnknownTarget(target)
    relevant = net.ancestors(target) | {target}
    order = [i for i in nw.topological_order(net) if i in relevant]

    # Reject non-finite stochastic ancestors and bound the joint state count.
    joint = 1
    for node_id in order:
        spec = net.nodes[node_id]
        if isinstance(spec, nw.Prior):
            if not isinstance(spec.dist, nw.Categorical):
                raise NotFinitelyEnumerable(
                    f"node {node_id!r} has a continuous prior")
            joint *= len(spec.dist.values)
        elif isinstance(spec, nw.ConditionalTable):
            joint *= len(spec.states)
        elif isinstance(spec, nw.ConditionalDistribution):
            widths = []
            for _, dist in spec.rows:
                if not isinstance(dist, nw.Categorical):
                    raise NotFinitelyEnumerable(
                        f"node {node_id!r} has a continuous conditional distribution")
                widths.append(len(dist.values))
            joint *= max(widths)
        if joint > STATE_SPACE_CAP:
            raise StateSpaceTooLarge(
                f"joint state count exceeds {STATE_SPACE_CAP}")

    label_of = {
        node_id: {v: lbl for lbl, v in (nw.discrete_states(net.nodes[node_id]) or ())}
        for node_id in relevant
    }

    marginal: dict[float, float] = {}

    def recurse(pos: int, env: dict[str, float], weight: float) -> None:
        if pos == len(order):
            v = env[target]
            marginal[v] = marginal.get(v, 0.0) + weight
            return
        node_id = order[pos]
        spec = net.nodes[node_id]
        if isinstance(spec, nw.Constant):
            env[node_id] = float(spec.value)
            recurse(pos + 1, env, weight)
        elif isinstance(spec, nw.Deterministic):
            env[node_id] = eval_expression(spec.expr, env)
            recurse(pos + 1, env, weight)
        elif isinstance(spec, nw.Prior):
            for v, p in zip(spec.dist.values, spec.dist.probs):
                env[node_id] = float(v)
                recurse(pos + 1, env, weight * p)
        elif isinstance(spec, nw.ConditionalTable):
            key = tuple(label_of[p][env[p]] for p in spec.parents)
            row = spec.row_map()[key]
            for (lbl, v), p in zip(spec.states, row):
                env[node_id] = float(v)
                recurse(pos + 1, env, weight * p)
        else:  # ConditionalDistribution with categorical rows
            key = tuple(label_of[p][env[p]] for p in spec.parents)
            dist = spec.row_map()[key]
            for v, p in zip(dist.values, dist.probs):
                env[node_id] = float(v)
                recurse(pos + 1, env, weight * p)
        env.pop(node_id, None)

    recurse(0, {}, 1.0)
    return dict(sorted(marginal.items()))


def exact_mean(dist: dict[float, float]) -> float:
    return sum(v * p for v, p in dist.items())


def exact_stddev(dist: dict[float, float]) -> float:
    m = exact_mean(dist)
    return sum((v - m) ** 2 * p for v, p in dist.items()) ** 0.5
