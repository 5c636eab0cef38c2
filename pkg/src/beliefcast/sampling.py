"""Forward Monte Carlo evaluation of a network.

Two engines produce bit-identical results:

  * scalar  -- one world at a time, the reference semantics: walk the
               topological order, drawing each stochastic node from the
               sample's own substream.
  * vector  -- all worlds at once with numpy, node by node.  Because draw j
               of substream i is directly addressable (see rng.py), the
               vectorized engine consumes each substream exactly as the
               scalar engine would, including variable-length rejection
               loops, so sample vectors match the scalar engine bit for bit.

A drawn world binds every node exactly once; all requested targets are read
out of the same worlds so that multi-target forecasts are jointly
consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import network as nw
from .errors import (
    EmptySamples,
    EvaluationError,
    TruncationTooTight,
    UnknownTarget,
)
from .expr import eval_expression, eval_expression_vec
from .rng import (
    GAMMA,
    TRUNCATION_REJECT_CAP,
    RngState,
    mix64_array,
    normal_inverse_cdf,
    normal_inverse_cdf_array,
    substream_seeds,
)

_U64_GAMMA = np.uint64(GAMMA)
_TO_UNIT = 2.0 ** -53


@dataclass(frozen=True)
class WorldSample:
    """One fully-specified world: a value for every node."""

    assignment: dict[str, float]
    seed_stream_index: int


@dataclass
class ForecastResult:
    target: str
    samples: np.ndarray  # float64, length n
    n: int
    mean: float
    stddev: float  # population sigma (divide by n)
    histogram: dict[int, int]  # integer bucket -> count, round-half-up


# --- scalar distribution draws ---------------------------------------------------

def sample_distribution(dist: nw.DistributionSpec, rng: RngState) -> float:
    """Draw one value; consumes one unit draw per attempt.

    Categorical: inverse CDF -- the first value whose cumulative probability
    exceeds the draw (zero-probability states can never be selected).
    Uniform and Triangular: inverse CDF.  Normal: Acklam inverse-CDF
    transform; truncation by rejection, erroring past the reject cap.
    """
    if isinstance(dist, nw.Categorical):
        u = rng.next_unit()
        c = 0.0
        for v, p in zip(dist.values, dist.probs):
            c += p
            if c > u:
                return float(v)
        return float(dist.values[-1])  # cumulative slack below 1e-9
    if isinstance(dist, nw.Uniform):
        u = rng.next_unit()
        return dist.lo + u * (dist.hi - dist.lo)
    if isinstance(dist, nw.Triangular):
        u = rng.next_unit()
        if dist.hi == dist.lo:
            return float(dist.lo)
        fc = (dist.mode - dist.lo) / (dist.hi - dist.lo)
        if u < fc:
            return float(dist.lo + np.sqrt(u * (dist.hi - dist.lo) * (dist.mode - dist.lo)))
        return float(dist.hi - np.sqrt((1.0 - u) * (dist.hi - dist.lo) * (dist.hi - dist.mode)))
    # Normal
    if dist.trunc_lo is None:
        return dist.mu + dist.sigma * normal_inverse_cdf(rng.next_unit())
    for _ in range(TRUNCATION_REJECT_CAP):
        x = dist.mu + dist.sigma * normal_inverse_cdf(rng.next_unit())
        if dist.trunc_lo <= x <= dist.trunc_hi:
            return x
    raise TruncationTooTight(
        f"no draw inside [{dist.trunc_lo}, {dist.trunc_hi}] "
        f"after {TRUNCATION_REJECT_CAP} attempts")


def _state_lookup(spec: nw.NodeSpec, parent_id: str) -> dict[float, str]:
    states = nw.discrete_states(spec)
    if states is None:
        raise EvaluationError(parent_id, ValueError("parent is not discrete"))
    return {v: lbl for lbl, v in states}


def instantiate_world(net: nw.Network, rng: RngState,
                      stream_index: int = 0) -> WorldSample:
    """Draw one world: nodes evaluated in topological order.

    Constants copy their value, priors draw, deterministic nodes evaluate
    their expression, table nodes select the row keyed by their parents'
    states and draw, conditional-distribution nodes select and draw.
    Errors are re-raised with the offending node id attached.
    """
    assignment: dict[str, float] = {}
    for node_id in nw.topological_order(net):
        spec = net.nodes[node_id]
        try:
            if isinstance(spec, nw.Constant):
                assignment[node_id] = float(spec.value)
            elif isinstance(spec, nw.Prior):
                assignment[node_id] = sample_distribution(spec.dist, rng)
            elif isinstance(spec, nw.Deterministic):
                assignment[node_id] = eval_expression(spec.expr, assignment)
            elif isinstance(spec, nw.ConditionalTable):
                key = tuple(_state_lookup(net.nodes[p], p)[assignment[p]]
                            for p in spec.parents)
                row = spec.row_map()[key]
                values = tuple(v for _, v in spec.states)
                assignment[node_id] = sample_distribution(
                    nw.Categorical(values, row), rng)
            else:  # ConditionalDistribution
                key = tuple(_state_lookup(net.nodes[p], p)[assignment[p]]
                            for p in spec.parents)
                assignment[node_id] = sample_distribution(spec.row_map()[key], rng)
        except EvaluationError:
            raise
        except Exception as e:  # attach node id to any evaluation failure
            raise EvaluationError(node_id, e) from e
    return WorldSample(assignment=assignment, seed_stream_index=stream_index)


# --- vectorized engine -------------------------------------------------------------

class _VecStreams:
    """Per-sample substream seeds and consumption counters."""

    def __init__(self, master_seed: int, n: int):
        self.seeds = substream_seeds(master_seed, n)
        self.counters = np.zeros(n, dtype=np.uint64)

    def next_unit(self, mask: np.ndarray | None = None) -> np.ndarray:
        """One uniform draw for every sample (or the masked subset)."""
        with np.errstate(over="ignore"):
            if mask is None:
                self.counters += np.uint64(1)
                raw = mix64_array(self.seeds + _U64_GAMMA * self.counters)
            else:
                self.counters[mask] += np.uint64(1)
                raw = mix64_array(self.seeds[mask] + _U64_GAMMA * self.counters[mask])
        return (raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def _draw_dist_vec(dist: nw.DistributionSpec, streams: _VecStreams,
                   mask: np.ndarray | None = None) -> np.ndarray:
    """Vectorized draw matching sample_distribution per lane."""
    u = streams.next_unit(mask)
    if isinstance(dist, nw.Categorical):
        cum = np.cumsum(np.asarray(dist.probs, dtype=np.float64))
        idx = np.searchsorted(cum, u, side="right")
        idx = np.minimum(idx, len(dist.values) - 1)
        return np.asarray(dist.values, dtype=np.float64)[idx]
    if isinstance(dist, nw.Uniform):
        return dist.lo + u * (dist.hi - dist.lo)
    if isinstance(dist, nw.Triangular):
        if dist.hi == dist.lo:
            return np.full_like(u, float(dist.lo))
        fc = (dist.mode - dist.lo) / (dist.hi - dist.lo)
        left = dist.lo + np.sqrt(u * (dist.hi - dist.lo) * (dist.mode - dist.lo))
        right = dist.hi - np.sqrt((1.0 - u) * (dist.hi - dist.lo) * (dist.hi - dist.mode))
        return np.where(u < fc, left, right)
    # Normal
    x = dist.mu + dist.sigma * normal_inverse_cdf_array(u)
    if dist.trunc_lo is None:
        return x
    out = x
    pending = ~((dist.trunc_lo <= out) & (out <= dist.trunc_hi))
    attempts = 1
    base_idx = np.arange(out.shape[0])
    while np.any(pending):
        attempts += 1
        if attempts > TRUNCATION_REJECT_CAP:
            raise TruncationTooTight(
                f"no draw inside [{dist.trunc_lo}, {dist.trunc_hi}] "
                f"after {TRUNCATION_REJECT_CAP} attempts")
        if mask is None:
            sub = pending
        else:
            sub = mask.copy()
            sub[mask] = pending
        u2 = streams.next_unit(sub)
        x2 = dist.mu + dist.sigma * normal_inverse_cdf_array(u2)
        idx = base_idx[pending]
        out[idx] = x2
        pending[idx] = ~((dist.trunc_lo <= x2) & (x2 <= dist.trunc_hi))
    return out


def _parent_state_indices(values: np.ndarray, states: tuple[tuple[str, float], ...],
                          parent_id: str) -> np.ndarray:
    state_values = np.array([v for _, v in states], dtype=np.float64)
    matches = values[:, None] == state_values[None, :]
    ok = matches.any(axis=1)
    if not np.all(ok):
        bad = float(values[~ok][0])
        raise EvaluationError(parent_id,
                              ValueError(f"value {bad!r} matches no declared state"))
    return matches.argmax(axis=1)


def _row_index(net: nw.Network, spec, values: dict[str, np.ndarray], n: int) -> np.ndarray:
    """Flat row index per sample, in the cartesian-product order of parent states."""
    dims = []
    idxs = []
    for p in spec.parents:
        states = nw.discrete_states(net.nodes[p])
        dims.append(len(states))
        idxs.append(_parent_state_indices(values[p], states, p))
    flat = np.zeros(n, dtype=np.int64)
    for dim, idx in zip(dims, idxs):
        flat = flat * dim + idx
    return flat


def _product_order_keys(net: nw.Network, spec) -> list[tuple[str, ...]]:
    keys: list[tuple[str, ...]] = [()]
    for p in spec.parents:
        states = nw.discrete_states(net.nodes[p])
        keys = [k + (lbl,) for k in keys for lbl, _ in states]
    return keys


def instantiate_worlds_vec(net: nw.Network, n: int, master_seed: int) -> dict[str, np.ndarray]:
    """All n worlds at once; returns node id -> float64 array of length n."""
    streams = _VecStreams(master_seed, n)
    values: dict[str, np.ndarray] = {}
    for node_id in nw.topological_order(net):
        spec = net.nodes[node_id]
        try:
            if isinstance(spec, nw.Constant):
                values[node_id] = np.full(n, float(spec.value))
            elif isinstance(spec, nw.Prior):
                values[node_id] = _draw_dist_vec(spec.dist, streams)
            elif isinstance(spec, nw.Deterministic):
                v = eval_expression_vec(spec.expr, values)
                values[node_id] = np.full(n, float(v)) if np.ndim(v) == 0 else v
            elif isinstance(spec, nw.ConditionalTable):
                flat = _row_index(net, spec, values, n)
                row_map = spec.row_map()
                probs = np.array([row_map[k] for k in _product_order_keys(net, spec)],
                                 dtype=np.float64)
                cum = np.cumsum(probs, axis=1)
                u = streams.next_unit()
                above = cum[flat] > u[:, None]
                idx = np.where(above.any(axis=1), above.argmax(axis=1),
                               len(spec.states) - 1)
                state_values = np.array([v for _, v in spec.states], dtype=np.float64)
                values[node_id] = state_values[idx]
            else:  # ConditionalDistribution
                flat = _row_index(net, spec, values, n)
                row_map = spec.row_map()
                out = np.empty(n, dtype=np.float64)
                for ri, key in enumerate(_product_order_keys(net, spec)):
                    mask = flat == ri
                    if np.any(mask):
                        out[mask] = _draw_dist_vec(row_map[key], streams, mask)
                values[node_id] = out
        except EvaluationError:
            raise
        except Exception as e:
            raise EvaluationError(node_id, e) from e
    return values


# --- summaries ------------------------------------------------------------------------

def histogram_bucket(s: float) -> int:
    """Integer-dollar bucket by round-half-up (ties go toward +inf)."""
    b = np.floor(s)
    if s - b >= 0.5:
        b += 1.0
    return int(b)


def _histogram(samples: np.ndarray) -> dict[int, int]:
    b = np.floor(samples)
    b = b + (samples - b >= 0.5)
    buckets, counts = np.unique(b.astype(np.int64), return_counts=True)
    return {int(k): int(c) for k, c in zip(buckets, counts)}


def summarize(samples) -> tuple[float, float, dict[int, int]]:
    """(arithmetic mean, population sigma, integer-bucket histogram)."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise EmptySamples("summarize needs at least one sample")
    mean = float(np.mean(arr))
    stddev = float(np.sqrt(np.mean((arr - mean) ** 2)))
    return mean, stddev, _histogram(arr)


def run_monte_carlo(net: nw.Network, targets: list[str], n: int, master_seed: int,
                    engine: str = "vector") -> dict[str, ForecastResult]:
    """n independent worlds from substreams 0..n-1; one shared world per
    index serves every target.  ``engine`` selects "vector" (default) or
    "scalar"; both yield bit-identical sample vectors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not targets:
        raise ValueError("at least one target is required")
    for t in targets:
        if t not in net.nodes:
            raise UnknownTarget(t)

    if engine == "scalar":
        columns: dict[str, np.ndarray] = {t: np.empty(n, dtype=np.float64) for t in targets}
        for i in range(n):
            world = instantiate_world(net, RngState.for_stream(master_seed, i), i)
            for t in targets:
                columns[t][i] = world.assignment[t]
    elif engine == "vector":
        values = instantiate_worlds_vec(net, n, master_seed)
        columns = {t: values[t] for t in targets}
    else:
        raise ValueError(f"unknown engine {engine!r}")

    results: dict[str, ForecastResult] = {}
    for t in targets:
        mean, stddev, hist = summarize(columns[t])
        results[t] = ForecastResult(target=t, samples=columns[t], n=n,
                                    mean=mean, stddev=stddev, histogram=hist)
    return results


# --- exports -----------------------------------------------------------------------------

def samples_csv(results: dict[str, ForecastResult]) -> str:
    """CSV export: header ``index,target,value``; full double precision;
    LF line endings; rows grouped by target in request order."""
    lines = ["index,target,value"]
    for t, fr in results.items():
        for i, v in enumerate(fr.samples):
            lines.append(f"{i},{t},{float(v)!r}")
    return "\n".join(lines) + "\n"


def summary_json_obj(results: dict[str, ForecastResult], seed: int) -> dict:
    return {
        "format": "beliefcast-summary/1",
        "seed": seed,
        "targets": [
            {
                "target": fr.target,
                "n": fr.n,
                "seed": seed,
                "mean": fr.mean,
                "stddev": fr.stddev,
                "histogram": {str(k): fr.histogram[k] for k in sorted(fr.histogram)},
            }
            for fr in results.values()
        ],
    }
