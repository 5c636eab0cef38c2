from __future__ import annotations

import json

import numpy as np
import pytest

from beliefcast.errors import EmptySamples, TruncationTooTight, UnknownTarget
from beliefcast.exact import enumerate_exact, exact_mean, exact_stddev
from beliefcast.network import Categorical, Normal, Triangular, Uniform, build_network
from beliefcast.rng import RngState
from beliefcast.sampling import (
    histogram_bucket,
    instantiate_world,
    instantiate_worlds_vec,
    run_monte_carlo,
    sample_distribution,
    samples_csv,
    summarize,
    summary_json_obj,
)
from tests.test_network import const, det, doc, prior


class TestSampleDistribution:
    def test_categorical_point_mass(self):
        dist = Categorical((7.0,), (1.0,))
        rng = RngState.for_stream(0, 0)
        assert all(sample_distribution(dist, rng) == 7.0 for _ in range(20))

    def test_uniform_degenerate(self):
        dist = Uniform(2.0, 2.0)
        rng = RngState.for_stream(0, 0)
        assert all(sample_distribution(dist, rng) == 2.0 for _ in range(20))

    def test_categorical_law_of_large_numbers(self):
        # tolerance from the statement: 0.01 covers 3 sigma / sqrt(n) here
        dist = Categorical((0.0, 1.0), (0.25, 0.75))
        rng = RngState.for_stream(123, 0)
        n = 100_000
        mean = sum(sample_distribution(dist, rng) for _ in range(n)) / n
        assert abs(mean - 0.75) <= 0.01

    def test_categorical_inverse_cdf_walk(self):
        # u = 0.30 lands in the second state of (0.25, 0.5, 0.25)
        dist = Categorical((10.0, 20.0, 30.0), (0.25, 0.5, 0.25))
        rng = RngState(seed=0)
        # find a substream whose first unit draw is in [0.25, 0.75)
        for idx in range(50):
            probe = RngState.for_stream(5, idx)
            u = probe.next_unit()
            if 0.25 <= u < 0.75:
                assert sample_distribution(dist, RngState.for_stream(5, idx)) == 20.0
                break
        else:
            pytest.fail("no suitable substream found")

    def test_zero_probability_state_never_drawn(self):
        dist = Categorical((1.0, 2.0, 3.0), (0.5, 0.0, 0.5))
        rng = RngState.for_stream(9, 0)
        draws = {sample_distribution(dist, rng) for _ in range(2000)}
        assert 2.0 not in draws

    def test_uniform_range(self):
        dist = Uniform(-1.0, 3.0)
        rng = RngState.for_stream(1, 1)
        draws = [sample_distribution(dist, rng) for _ in range(2000)]
        assert all(-1.0 <= x < 3.0 for x in draws)
        assert abs(np.mean(draws) - 1.0) < 0.1

    def test_triangular_bounds_and_mean(self):
        dist = Triangular(0.0, 1.0, 4.0)
        rng = RngState.for_stream(2, 0)
        draws = [sample_distribution(dist, rng) for x in range(20000)]
        assert all(0.0 <= x <= 4.0 for x in draws)
        assert abs(np.mean(draws) - 5.0 / 3.0) < 0.05  # (lo+mode+hi)/3

    def test_normal_moments(self):
        dist = Normal(10.0, 2.0)
        rng = RngState.for_stream(3, 0)
        draws = np.array([sample_distribution(dist, rng) for _ in range(50000)])
        assert abs(draws.mean() - 10.0) < 0.05
        assert abs(draws.std() - 2.0) < 0.05

    def test_truncated_normal_respects_bounds(self):
        dist = Normal(0.0, 1.0, trunc_lo=0.5, trunc_hi=1.5)
        rng = RngState.for_stream(4, 0)
        draws = [sample_distribution(dist, rng) for _ in range(2000)]
        assert all(0.5 <= x <= 1.5 for x in draws)

    def test_truncation_too_tight(self):
        dist = Normal(0.0, 1.0, trunc_lo=40.0, trunc_hi=40.1)
        with pytest.raises(TruncationTooTight):
            sample_distribution(dist, RngState.for_stream(0, 0))


class TestInstantiateWorld:
    def test_all_constant_network(self):
        net = build_network(doc([const("a", 1.5), const("b", -2.0)]))
        world = instantiate_world(net, RngState.for_stream(0, 0))
        assert world.assignment == {"a": 1.5, "b": -2.0}

    def test_point_mass_prior_with_deterministic_child(self):
        nodes = [prior("p", {"type": "categorical", "values": [1.0], "probs": [1.0]}),
                 det("d", ["p"], "p * 2")]
        net = build_network(doc(nodes))
        world = instantiate_world(net, RngState.for_stream(0, 0))
        assert world.assignment["d"] == 2.0

    def test_reference_model_deterministic_for_fixed_seed(self, base_net):
        w1 = instantiate_world(base_net, RngState.for_stream(99, 5), 5)
        w2 = instantiate_world(base_net, RngState.for_stream(99, 5), 5)
        assert w1.assignment == w2.assignment
        assert w1.seed_stream_index == 5

    def test_world_binds_every_node_exactly_once(self, base_net):
        world = instantiate_world(base_net, RngState.for_stream(1, 0))
        assert set(world.assignment) == set(base_net.nodes)

    def test_table_node_follows_parent_state(self):
        nodes = [
            prior("p", {"type": "categorical", "values": [0, 1], "probs": [0.5, 0.5],
                        "labels": ["no", "yes"]}),
            {"id": "t", "category": "supply", "period": "Q1", "kind": "table",
             "parents": ["p"],
             "states": [{"label": "lo", "value": 100.0}, {"label": "hi", "value": 200.0}],
             "rows": [{"given": ["no"], "probs": [1.0, 0.0]},
                      {"given": ["yes"], "probs": [0.0, 1.0]}]},
        ]
        net = build_network(doc(nodes))
        for i in range(40):
            w = instantiate_world(net, RngState.for_stream(11, i), i).assignment
            assert w["t"] == (200.0 if w["p"] == 1.0 else 100.0)

    def test_conditional_distribution_selects_row(self):
        nodes = [
            prior("p", {"type": "categorical", "values": [0, 1], "probs": [0.5, 0.5],
                        "labels": ["a", "b"]}),
            {"id": "c", "category": "supply", "period": "Q1", "kind": "conditional",
             "parents": ["p"],
             "rows": [{"given": ["a"], "dist": {"type": "uniform", "lo": 0, "hi": 1}},
                      {"given": ["b"], "dist": {"type": "uniform", "lo": 10, "hi": 11}}]},
        ]
        net = build_network(doc(nodes))
        for i in range(40):
            w = instantiate_world(net, RngState.for_stream(13, i), i).assignment
            assert (10.0 <= w["c"] < 11.0) if w["p"] == 1.0 else (0.0 <= w["c"] < 1.0)


def stress_network():
    """Touches every node kind and every distribution, including truncation
    rejection loops, to exercise the scalar/vector equivalence contract."""
    nodes = [
        prior("cat", {"type": "categorical", "values": [1, 2, 3],
                      "probs": [0.2, 0.5, 0.3], "labels": ["a", "b", "c"]}),
        prior("uni", {"type": "uniform", "lo": -2, "hi": 5}),
        prior("tri", {"type": "triangular", "lo": 0, "mode": 0.5, "hi": 4}),
        prior("nrm", {"type": "normal", "mu": 1, "sigma": 3}),
        prior("tn", {"type": "normal", "mu": 0, "sigma": 1,
                     "trunc_lo": 1.0, "trunc_hi": 1.6}),
        det("mix", ["cat", "uni", "tri", "nrm", "tn"],
            "if(cat = 2, uni * tri, nrm / (tn + 10)) + max(uni, tri) - min(nrm, tn)"),
        {"id": "tab", "category": "supply", "period": "Q1", "kind": "table",
         "parents": ["cat"],
         "states": [{"label": "lo", "value": -1.0}, {"label": "hi", "value": 1.0}],
         "rows": [{"given": ["a"], "probs": [0.9, 0.1]},
                  {"given": ["b"], "probs": [0.5, 0.5]},
                  {"given": ["c"], "probs": [0.1, 0.9]}]},
        {"id": "cd", "category": "supply", "period": "Q1", "kind": "conditional",
         "parents": ["tab"],
         "rows": [{"given": ["lo"], "dist": {"type": "normal", "mu": -5, "sigma": 0.5,
                                             "trunc_lo": -5.5, "trunc_hi": -4.8}},
                  {"given": ["hi"], "dist": {"type": "triangular", "lo": 1, "mode": 2,
                                             "hi": 3}}]},
        det("out", ["mix", "cd"], "mix + cd * 0.5"),
    ]
    return build_network(doc(nodes))


class TestVectorizedEngine:
    def test_bitwise_equal_to_scalar_on_stress_network(self):
        net = stress_network()
        n, seed = 400, 2024
        vec = instantiate_worlds_vec(net, n, seed)
        for i in range(n):
            world = instantiate_world(net, RngState.for_stream(seed, i), i).assignment
            for node_id, value in world.items():
                assert float(vec[node_id][i]) == value, (node_id, i)

    def test_bitwise_equal_to_scalar_on_reference_model(self, base_net):
        n, seed = 64, 7
        vec = instantiate_worlds_vec(base_net, n, seed)
        for i in range(0, n, 7):
            world = instantiate_world(base_net, RngState.for_stream(seed, i), i).assignment
            for node_id, value in world.items():
                assert float(vec[node_id][i]) == value, (node_id, i)

    def test_run_monte_carlo_engines_agree(self, base_net):
        targets = ["WTIp.1", "WTIp.4"]
        a = run_monte_carlo(base_net, targets, 150, 3, engine="vector")
        b = run_monte_carlo(base_net, targets, 150, 3, engine="scalar")
        for t in targets:
            assert np.array_equal(a[t].samples, b[t].samples)
            assert a[t].mean == b[t].mean
            assert a[t].histogram == b[t].histogram


class TestRunMonteCarlo:
    def test_constant_target(self):
        net = build_network(doc([const("price", 18.0)]))
        res = run_monte_carlo(net, ["price"], 50, 9)
        assert res["price"].mean == pytest.approx(18.0, abs=1e-12)
        assert res["price"].stddev == pytest.approx(0.0, abs=1e-12)
        assert res["price"].histogram == {18: 50}

    def test_discrete_net_matches_exact_oracle(self):
        nodes = [
            prior("a", {"type": "categorical", "values": [0, 1], "probs": [0.3, 0.7]}),
            prior("b", {"type": "categorical", "values": [0, 2], "probs": [0.6, 0.4]}),
            det("s", ["a", "b"], "a + b"),
        ]
        net = build_network(doc(nodes))
        exact = enumerate_exact(net, "s")
        n = 100_000
        res = run_monte_carlo(net, ["s"], n, 31)
        tol = 3.0 * exact_stddev(exact) / np.sqrt(n)
        assert abs(res["s"].mean - exact_mean(exact)) <= tol

    def test_unknown_target(self, base_net):
        with pytest.raises(UnknownTarget):
            run_monte_carlo(base_net, ["Nope"], 10, 0)

    def test_n_must_be_positive(self, base_net):
        with pytest.raises(ValueError):
            run_monte_carlo(base_net, ["WTIp.1"], 0, 0)

    def test_determinism_across_runs(self, base_net):
        a = run_monte_carlo(base_net, ["WTIp.2"], 300, 17)
        b = run_monte_carlo(base_net, ["WTIp.2"], 300, 17)
        assert np.array_equal(a["WTIp.2"].samples, b["WTIp.2"].samples)

    def test_substream_independence(self, base_net):
        # sample i is derived from (seed, i) alone: shrinking n keeps a prefix
        big = run_monte_carlo(base_net, ["WTIp.1"], 40, 5)["WTIp.1"].samples
        small = run_monte_carlo(base_net, ["WTIp.1"], 10, 5)["WTIp.1"].samples
        assert np.array_equal(big[:10], small)

    def test_targets_share_one_world_per_index(self, base_net):
        res = run_monte_carlo(base_net, ["WTI.3", "SSDiff.3", "OPEC.3"], 50, 21)
        # WTI = OPEC + SSDiff holds per sample because all targets come from
        # the same world
        lhs = res["WTI.3"].samples
        rhs = res["OPEC.3"].samples + res["SSDiff.3"].samples
        assert np.array_equal(lhs, rhs)


class TestSummarize:
    def test_all_equal_samples(self):
        mean, stddev, hist = summarize([18.0, 18.0, 18.0])
        assert mean == 18.0
        assert stddev == 0.0
        assert hist == {18: 3}

    def test_bucket_rounds_down_below_half(self):
        assert histogram_bucket(17.4) == 17
        _, _, hist = summarize([17.4])
        assert hist == {17: 1}

    def test_bucket_half_goes_up(self):
        assert histogram_bucket(17.5) == 18
        _, _, hist = summarize([17.5])
        assert hist == {18: 1}

    def test_negative_half_rounds_toward_plus_infinity(self):
        assert histogram_bucket(-17.5) == -17

    def test_near_half_double_not_promoted(self):
        # 0.49999999999999994 < 0.5 must stay in bucket 0
        assert histogram_bucket(0.49999999999999994) == 0

    def test_empty_samples_rejected(self):
        with pytest.raises(EmptySamples):
            summarize([])

    def test_histogram_conserves_count(self, base_net):
        fr = run_monte_carlo(base_net, ["WTIp.3"], 777, 2)["WTIp.3"]
        assert sum(fr.histogram.values()) == 777

    def test_moments_recomputable_from_samples(self, base_net):
        fr = run_monte_carlo(base_net, ["WTIp.1"], 500, 4)["WTIp.1"]
        xs = np.asarray(fr.samples)
        assert fr.mean == pytest.approx(float(np.mean(xs)), abs=1e-9)
        assert fr.stddev == pytest.approx(float(np.std(xs)), abs=1e-9)


class TestExports:
    def test_csv_shape_and_stability(self, base_net):
        res = run_monte_carlo(base_net, ["WTIp.1", "WTIp.2"], 20, 8)
        text = samples_csv(res)
        lines = text.split("\n")
        assert lines[0] == "index,target,value"
        assert len(lines) == 1 + 40 + 1 and lines[-1] == ""
        assert text == samples_csv(run_monte_carlo(base_net, ["WTIp.1", "WTIp.2"], 20, 8))

    def test_csv_full_precision_round_trip(self, base_net):
        res = run_monte_carlo(base_net, ["WTIp.1"], 10, 8)
        for line in samples_csv(res).splitlines()[1:]:
            idx, target, value = line.split(",")
            assert float(value) == float(res[target].samples[int(idx)])

    def test_summary_json_fields(self, base_net):
        res = run_monte_carlo(base_net, ["WTIp.1"], 25, 8)
        obj = summary_json_obj(res, 8)
        entry = obj["targets"][0]
        assert entry["target"] == "WTIp.1"
        assert entry["n"] == 25 and entry["seed"] == 8
        assert sum(entry["histogram"].values()) == 25
        json.dumps(obj)  # serializable
