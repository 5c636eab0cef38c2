"""Property-based invariants (hypothesis)."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beliefcast.errors import CycleDetected
from beliefcast.expr import (
    Bin,
    Call,
    Ident,
    Num,
    Unary,
    eval_expression,
    parse_expression,
    print_expression,
)
from beliefcast.network import build_network, serialize_network, topological_order
from beliefcast.rng import RngState
from beliefcast.sampling import instantiate_world, instantiate_worlds_vec, run_monte_carlo
from tests.test_network import det, doc, prior


# --- random DAG documents -----------------------------------------------------

@st.composite
def dag_documents(draw):
    n = draw(st.integers(min_value=2, max_value=10))
    ids = [f"n{i:02d}" for i in range(n)]
    nodes = []
    for i, node_id in enumerate(ids):
        parents = [ids[j] for j in range(i)
                   if draw(st.booleans()) and draw(st.integers(0, 2)) == 0]
        if not parents:
            if draw(st.booleans()):
                nodes.append({"id": node_id, "category": "supply", "period": "Q1",
                              "kind": "constant", "value": draw(st.integers(-5, 5))})
            else:
                weights = draw(st.lists(st.integers(1, 7), min_size=2, max_size=4))
                total = sum(weights)
                nodes.append(prior(node_id, {
                    "type": "categorical",
                    "values": list(range(len(weights))),
                    "probs": [w / total for w in weights]}))
        else:
            nodes.append(det(node_id, parents, " + ".join(parents)))
    return doc(nodes)


@settings(max_examples=60)
@given(dag_documents())
def test_topological_order_is_edge_respecting_permutation(document):
    net = build_network(document)
    order = topological_order(net)
    assert sorted(order) == sorted(net.nodes)
    position = {node_id: i for i, node_id in enumerate(order)}
    for node_id, spec in net.nodes.items():
        for parent in spec.parents:
            assert position[parent] < position[node_id]


@settings(max_examples=40)
@given(dag_documents())
def test_serialize_round_trip(document):
    net = build_network(document)
    assert build_network(serialize_network(net)) == net


@settings(max_examples=25)
@given(st.integers(min_value=1, max_value=8), st.integers(0, 1000))
def test_any_cycle_is_rejected(length, salt):
    ids = [f"c{i}" for i in range(length)]
    nodes = [det(ids[i], [ids[(i + 1) % length]], f"{ids[(i + 1) % length]} + {salt}")
             for i in range(length)]
    nodes.append({"id": "root", "category": "supply", "period": "Q1",
                  "kind": "constant", "value": 1.0})
    with pytest.raises(CycleDetected) as e:
        build_network(doc(nodes))
    witness = e.value.witness
    assert witness[0] == witness[-1]
    assert len(witness) >= 2


# --- expressions -----------------------------------------------------------------

_IDENTS = ("alpha", "b.2", "gamma_3")


def expressions():
    leaves = st.one_of(
        st.floats(min_value=0, max_value=1e6, allow_nan=False).map(Num),
        st.sampled_from(_IDENTS).map(Ident),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*"), children, children).map(
                lambda t: Bin(t[0], t[1], t[2])),
            st.tuples(st.sampled_from(("<", "<=", ">", ">=", "=", "and", "or")),
                      children, children).map(lambda t: Bin(t[0], t[1], t[2])),
            children.map(lambda e: Unary("-", e)),
            children.map(lambda e: Unary("not", e)),
            st.tuples(children, children).map(lambda t: Call("min", t)),
            st.tuples(children, children).map(lambda t: Call("max", t)),
            children.map(lambda e: Call("abs", (e,))),
            st.tuples(children, children, children).map(lambda t: Call("if", t)),
        )

    return st.recursive(leaves, extend, max_leaves=25)


@settings(max_examples=150)
@given(expressions())
def test_printer_parser_round_trip(expr):
    assert parse_expression(print_expression(expr)) == expr


@settings(max_examples=100)
@given(expressions(),
       st.floats(-100, 100, allow_nan=False),
       st.floats(-100, 100, allow_nan=False),
       st.floats(-100, 100, allow_nan=False))
def test_eval_is_pure(expr, a, b, c):
    env = dict(zip(_IDENTS, (a, b, c)))
    first = eval_expression(expr, env)
    again = eval_expression(expr, env)
    assert (first == again) or (np.isnan(first) and np.isnan(again))


# --- sampler invariants ----------------------------------------------------------

def small_stochastic_net():
    nodes = [
        prior("a", {"type": "categorical", "values": [0, 1, 2],
                    "probs": [0.25, 0.5, 0.25]}),
        prior("u", {"type": "uniform", "lo": -1, "hi": 1}),
        prior("g", {"type": "normal", "mu": 0, "sigma": 2}),
        det("s", ["a", "u", "g"], "a * 10 + u + g"),
    ]
    return build_network(doc(nodes))


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**63 - 1),
       st.integers(min_value=1, max_value=40))
def test_scalar_and_vector_engines_agree(seed, n):
    net = small_stochastic_net()
    vec = instantiate_worlds_vec(net, n, seed)
    for i in (0, n // 2, n - 1):
        world = instantiate_world(net, RngState.for_stream(seed, i), i).assignment
        for node_id, value in world.items():
            assert float(vec[node_id][i]) == value


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.integers(2, 30))
def test_dropping_samples_never_changes_others(seed, n):
    net = small_stochastic_net()
    full = run_monte_carlo(net, ["s"], n, seed)["s"].samples
    half = run_monte_carlo(net, ["s"], max(1, n // 2), seed)["s"].samples
    assert np.array_equal(full[:len(half)], half)
