"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Tolerances are fixed here, not configuration.  The bundled model's summary
statistics are checked against its published calibration targets; everything
else is exact or oracle-bounded.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from beliefcast.errors import BadProbabilityRow, CycleDetected
from beliefcast.exact import enumerate_exact, exact_mean, exact_stddev
from beliefcast.gateway.cli import main
from beliefcast.network import build_network, network_to_json
from beliefcast.oilmarket import fuel_switching, wti_with_fee
from beliefcast.sampling import run_monte_carlo


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


# --- random all-discrete networks for the oracle criterion ---------------------

def random_discrete_document(rng: random.Random) -> dict:
    """2..6 stochastic nodes with 2..4 states each, plus deterministic
    combiners; probabilities are multiples of 1/64 so rows sum exactly to 1."""
    def probs(k):
        cuts = sorted(rng.sample(range(1, 64), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [64])]
        return [p / 64 for p in parts]

    n_stoch = rng.randint(2, 6)
    nodes = []
    discrete = []
    for i in range(n_stoch):
        node_id = f"s{i}"
        k = rng.randint(2, 4)
        values = rng.sample(range(-4, 9), k)
        labels = [f"v{j}" for j in range(k)]
        if discrete and rng.random() < 0.5:
            parent = rng.choice(discrete)
            parent_labels = [lbl for lbl, _ in parent["states"]]
            rows = [{"given": [lbl], "probs": probs(k)} for lbl in parent_labels]
            nodes.append({"id": node_id, "category": "supply", "period": "Q1",
                          "kind": "table", "parents": [parent["id"]],
                          "states": [{"label": lbl, "value": float(v)}
                                     for lbl, v in zip(labels, values)],
                          "rows": rows})
        else:
            nodes.append({"id": node_id, "category": "supply", "period": "Q1",
                          "kind": "prior",
                          "dist": {"type": "categorical",
                                   "values": [float(v) for v in values],
                                   "probs": probs(k), "labels": labels}})
        discrete.append({"id": node_id,
                         "states": list(zip(labels, values))})

    combine = [d["id"] for d in discrete]
    rng.shuffle(combine)
    half = max(2, len(combine) // 2 + 1)
    first = combine[:half]
    nodes.append({"id": "mixer", "category": "supply", "period": "Q1",
                  "kind": "deterministic", "parents": first,
                  "expr": " + ".join(first)})
    rest = [c for c in combine if c not in first]
    parents = ["mixer"] + rest
    terms = ["mixer"] + [f"{rng.randint(1, 3)} * {c}" for c in rest]
    expr = " + ".join(terms)
    if rng.random() < 0.5:
        expr = f"max({expr}, {rng.randint(-10, 0)})"
    nodes.append({"id": "target", "category": "price", "period": "Q1",
                  "kind": "deterministic", "parents": parents, "expr": expr})
    return {"format": "beliefcast-network/1", "name": "random-discrete",
            "periods": ["Q1"], "nodes": nodes}


def test_oracle_equivalence():
    with criterion("oracle equivalence on 20 random discrete networks"):
        started = time.monotonic()
        n = 100_000
        for case in range(20):
            net = build_network(random_discrete_document(random.Random(1000 + case)))
            exact = enumerate_exact(net, "target")
            assert abs(sum(exact.values()) - 1.0) <= 1e-9
            mc = run_monte_carlo(net, ["target"], n, 5000 + case)["target"]
            tolerance = 4.0 * exact_stddev(exact) / np.sqrt(n)
            assert abs(mc.mean - exact_mean(exact)) <= tolerance, \
                f"case {case}: |{mc.mean} - {exact_mean(exact)}| > {tolerance}"
        elapsed = time.monotonic() - started
        assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"


def test_simulation_determinism(base_net, tmp_path):
    with criterion("fixed-seed simulation is byte-identical"):
        model = tmp_path / "base.json"
        model.write_text(network_to_json(base_net))
        blobs = []
        for run in ("one", "two"):
            out = tmp_path / run
            rc = main(["simulate", "--network", str(model),
                       "--targets", "WTIp.1,WTIp.2,WTIp.3,WTIp.4",
                       "--n", "10000", "--seed", "42", "--out", str(out)])
            assert rc == 0
            blobs.append(((out / "samples.csv").read_bytes(),
                          (out / "summary.json").read_bytes()))
        assert blobs[0][0] == blobs[1][0]
        assert blobs[0][1] == blobs[1][1]
        # engine-independence backs the cross-platform claim: the vector and
        # scalar paths must agree bit for bit
        targets = ["WTIp.1", "WTIp.4"]
        v = run_monte_carlo(base_net, targets, 500, 42, engine="vector")
        s = run_monte_carlo(base_net, targets, 500, 42, engine="scalar")
        for t in targets:
            assert np.array_equal(v[t].samples, s[t].samples)


def test_import_fee_floor_rule_exact(base_net):
    with criterion("import-fee floor rule exact on the full grid"):
        from beliefcast.expr import eval_expression
        wtip = base_net.nodes["WTIp.1"]
        for wti in np.arange(10.00, 30.0001, 0.25):
            wti = float(wti)
            for fee in (True, False):
                expected = 18.0 if (fee and wti <= 18.0) else wti
                assert wti_with_fee(wti, fee) == expected  # zero tolerance
                got = eval_expression(wtip.expr,
                                      {"OIFee": 1.0 if fee else 0.0, "WTI.1": wti})
                assert got == expected


def test_fuel_switching_table_shape(params):
    with criterion("fuel-switching table: zero above threshold, in range, monotone"):
        table = params.fuel_switch
        levels = [round(5.0 + 0.05 * i, 2) for i in range(0, 500)]  # 5.00 .. 29.95
        durations = list(range(0, 10))
        for d in durations:
            row = [fuel_switching(lv, d, table) for lv in levels]
            for lv, v in zip(levels, row):
                if lv >= 15.0:
                    assert v == 0.0
                assert 0.0 <= v <= 2.0
            assert all(a >= b for a, b in zip(row, row[1:]))  # non-increasing in level
        for lv in levels:
            col = [fuel_switching(lv, d, table) for d in durations]
            assert all(a <= b for a, b in zip(col, col[1:]))  # non-decreasing in duration


BASE_TARGET_MEANS = {"WTIp.1": 20.87, "WTIp.2": 20.62, "WTIp.3": 21.23, "WTIp.4": 21.84}
BASE_TARGET_SIGMAS = {"WTIp.1": 2.9, "WTIp.2": 3.3, "WTIp.3": 4.1, "WTIp.4": 4.4}


def test_base_case_calibration(base_net):
    with criterion("base-case calibration against published statistics"):
        started = time.monotonic()
        res = run_monte_carlo(base_net, list(BASE_TARGET_MEANS), 10_000, 42)
        for target, goal in BASE_TARGET_MEANS.items():
            assert abs(res[target].mean - goal) <= 1.00, \
                f"{target} mean {res[target].mean:.3f} vs {goal}"
        for target, goal in BASE_TARGET_SIGMAS.items():
            assert abs(res[target].stddev - goal) <= 1.5, \
                f"{target} sigma {res[target].stddev:.3f} vs {goal}"
        pooled = np.concatenate([res[t].samples for t in BASE_TARGET_MEANS])
        assert abs(float(pooled.mean()) - 21.14) <= 1.00
        buckets = np.floor(pooled)
        buckets = buckets + (pooled - buckets >= 0.5)
        share = float(np.mean((buckets >= 18) & (buckets <= 21)))
        assert 0.45 <= share <= 0.75, f"18-21 bucket share {share:.3f}"
        elapsed = time.monotonic() - started
        assert elapsed < 5.0, f"runtime {elapsed:.1f}s exceeds 5s"


def test_constrained_case(base_net, constrained_net):
    with criterion("constrained-capacity case statistics"):
        con = run_monte_carlo(constrained_net, ["WTI.3", "WTI.4"], 10_000, 42)
        assert abs(con["WTI.3"].mean - 25.0) <= 2.0, con["WTI.3"].mean
        assert 27.0 <= con["WTI.4"].mean <= 33.0, con["WTI.4"].mean
        base = run_monte_carlo(base_net, ["WTIp.3", "WTIp.4"], 10_000, 42)
        for q in ("3", "4"):
            sigma = con[f"WTI.{q}"].stddev
            assert sigma <= 1.0, sigma
            assert sigma <= 0.25 * base[f"WTIp.{q}"].stddev, \
                (sigma, base[f"WTIp.{q}"].stddev)


MODEL_VARIABLE_CHECKLIST = {
    "non-core capacity": "NCCap",
    "non-core production": "NCProd",
    "world growth": "WorldGrowth",
    "import fee": "OIFee",
    "gasoline tax": "GT",
    "gasoline tax impact": "GTImpact",
    "price level": "Level.1",
    "duration": "Duration.1",
    "fuel switching": "FuelSwitch.1",
    "demand": "Demand.1",
    "US production": "USProd.1",
    "other non-OPEC production": "NOProd.1",
    "core capacity": "CCap",
    "inventory change": "DeltaI.1",
    "call on the cartel": "OCall.1",
    "core demand": "CoreDemand.1",
    "core production": "CoreProd.1",
    "capacity utilization": "CapUt.1",
    "total supply": "Supply.1",
    "year-over-year core production change": "DeltaYCoreProd.1",
    "quarter-over-quarter core production change": "DeltaQCoreProd.1",
    "year-over-year sweet crude change": "DeltaYSweet.1",
    "intragulf relations": "Intragulf.1",
    "market-share conflict": "MarketShare.1",
    "political hedge": "Politics.1",
    "marker crude price": "OPEC.1",
    "time trend": "Time.1",
    "sweet-sour differential": "SSDiff.1",
    "benchmark price": "WTI.1",
}


def test_structural_coverage(base_net, constrained_net):
    with criterion("structural coverage of the model variable checklist"):
        for name, node_id in MODEL_VARIABLE_CHECKLIST.items():
            assert node_id in base_net.nodes, f"{name} missing ({node_id})"
        banned_prefixes = ("Politics", "Intragulf", "MarketShare",
                           "FuelSwitch", "GT", "GTSize", "GTImpact", "OIFee")
        for node_id, spec in constrained_net.nodes.items():
            assert spec.category not in ("politics", "tax"), node_id
            prefix = node_id.split(".")[0]
            assert prefix not in banned_prefixes, node_id
            if prefix in ("Level", "Duration"):
                assert spec.category == "historical", node_id


def test_validation_gate(tmp_path):
    with criterion("cycle and bad-CPT rejection"):
        cyclic = {
            "format": "beliefcast-network/1", "name": "cyclic", "periods": ["Q1"],
            "nodes": [
                {"id": "a", "category": "supply", "period": "Q1",
                 "kind": "deterministic", "parents": ["c"], "expr": "c + 1"},
                {"id": "b", "category": "supply", "period": "Q1",
                 "kind": "deterministic", "parents": ["a"], "expr": "a + 1"},
                {"id": "c", "category": "supply", "period": "Q1",
                 "kind": "deterministic", "parents": ["b"], "expr": "b + 1"},
            ],
        }
        with pytest.raises(CycleDetected) as err:
            build_network(cyclic)
        witness = err.value.witness
        assert witness[0] == witness[-1] and set(witness) == {"a", "b", "c"}
        path = tmp_path / "cyclic.json"
        path.write_text(json.dumps(cyclic))
        assert main(["validate", str(path)]) == 1

        def cpt_doc(row):
            return {
                "format": "beliefcast-network/1", "name": "cpt", "periods": ["Q1"],
                "nodes": [
                    {"id": "p", "category": "supply", "period": "Q1", "kind": "prior",
                     "dist": {"type": "categorical", "values": [0, 1],
                              "probs": [0.5, 0.5], "labels": ["n", "y"]}},
                    {"id": "t", "category": "supply", "period": "Q1", "kind": "table",
                     "parents": ["p"],
                     "states": [{"label": "lo", "value": 0.0},
                                {"label": "hi", "value": 1.0}],
                     "rows": [{"given": ["n"], "probs": row},
                              {"given": ["y"], "probs": [0.5, 0.5]}]},
                ],
            }

        build_network(cpt_doc([0.5, 0.5 + 0.5e-9]))  # inside 1e-9
        with pytest.raises(BadProbabilityRow):
            build_network(cpt_doc([0.5, 0.5 + 2e-9]))  # outside 1e-9
