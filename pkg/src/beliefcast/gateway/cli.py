"""Command-line interface.

Subcommands:

  validate PATH                 check a network document; exit 0/1/2
  simulate --network ... --targets ... --n ... --seed ... --out DIR
  calibrate --network ... --goals FILE --tolerance T
  serve [--port P] [--workspace DIR]
  init-workspace [--workspace DIR]   seed a workspace with the bundled model

Environment: BELIEFCAST_WORKSPACE and BELIEFCAST_PORT provide defaults for
--workspace / --port.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import BeliefcastError
from ..network import build_network, serialize_network
from ..sampling import run_monte_carlo, samples_csv, summary_json_obj
from ..scenario import apply_overlay, overlay_from_doc

DEFAULT_PORT = 8787


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_network(args) -> "Network":
    net = build_network(_read_json(args.network))
    if getattr(args, "overlay", None):
        overlay = overlay_from_doc(_read_json(args.overlay))
        net = apply_overlay(net, overlay)
    return net


def _stat_table(results) -> str:
    rows = [("target", "n", "mean", "stddev")]
    for fr in results.values():
        rows.append((fr.target, str(fr.n), repr(fr.mean), repr(fr.stddev)))
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in rows)


def cmd_validate(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: cannot read {args.path}: {e}", file=sys.stderr)
        return 2
    try:
        document = json.loads(text)
        net = build_network(document)
    except (json.JSONDecodeError, BeliefcastError) as e:
        print(f"invalid: {e}", file=sys.stderr)
        return 1
    from ..network import validate_parameters
    print(f"ok: {net.name or args.path}: {len(net.nodes)} nodes, "
          f"{len(net.sinks())} sink(s)")
    for w in validate_parameters(net):
        print(f"warning: {w.node}: {w.message} [{w.code}]")
    return 0


def cmd_simulate(args) -> int:
    try:
        net = _load_network(args)
        targets = [t for t in args.targets.split(",") if t]
        results = run_monte_carlo(net, targets, args.n, args.seed, engine=args.engine)
    except (OSError, json.JSONDecodeError, BeliefcastError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = json.dumps(summary_json_obj(results, args.seed), indent=2) + "\n"
    (out / "summary.json").write_text(summary)
    if args.format == "csv":
        (out / "samples.csv").write_text(samples_csv(results))
    else:
        rows = [{"index": i, "target": fr.target, "value": float(v)}
                for fr in results.values() for i, v in enumerate(fr.samples)]
        (out / "samples.json").write_text(
            json.dumps({"format": "beliefcast-samples/1", "rows": rows}, indent=2) + "\n")
    print(_stat_table(results))
    return 0


def cmd_calibrate(args) -> int:
    try:
        net = _load_network(args)
        goals_doc = _read_json(args.goals)
        goals = goals_doc["targets"]
        results = run_monte_carlo(net, list(goals), args.n, args.seed)
    except (OSError, json.JSONDecodeError, BeliefcastError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    failed = False
    for target, goal in goals.items():
        fr = results[target]
        mean_tol = float(goal.get("mean_tolerance", args.tolerance))
        delta = fr.mean - float(goal["mean"])
        ok = abs(delta) <= mean_tol
        print(f"{target}: mean {fr.mean:+.4f} goal {float(goal['mean']):+.4f} "
              f"delta {delta:+.4f} tolerance {mean_tol} "
              f"{'ok' if ok else 'FAIL'}")
        failed |= not ok
        if "stddev" in goal:
            sig_tol = float(goal.get("stddev_tolerance",
                                     args.sigma_tolerance
                                     if args.sigma_tolerance is not None
                                     else args.tolerance))
            sdelta = fr.stddev - float(goal["stddev"])
            sok = abs(sdelta) <= sig_tol
            print(f"{target}: stddev {fr.stddev:+.4f} goal {float(goal['stddev']):+.4f} "
                  f"delta {sdelta:+.4f} tolerance {sig_tol} "
                  f"{'ok' if sok else 'FAIL'}")
            failed |= not sok
    return 1 if failed else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .workspace import Workspace

    ws = Workspace(args.workspace)
    ws.initialize()
    app = create_app(ws, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_init_workspace(args) -> int:
    from ..oilmarket import (build_base_case, load_parameters,
                             load_reference_actuals)
    from ..scenario import (build_constrained_case, constrained_overlay,
                            overlay_to_doc)
    from .workspace import Workspace

    ws = Workspace(args.workspace)
    ws.initialize()
    params = load_parameters()
    actuals = load_reference_actuals()
    base = build_base_case(params)
    ws.put_network("oil-market-1990-base", serialize_network(base))
    ws.put_network("oil-market-1990-constrained",
                   serialize_network(build_constrained_case(params, actuals)))
    ws.put_overlay("constrained-capacity",
                   overlay_to_doc(constrained_overlay(params, actuals)))
    from importlib import resources
    params_doc = json.loads(resources.files("beliefcast.oilmarket")
                            .joinpath("data/market_parameters.json").read_text())
    ws.put_params("market-parameters", params_doc)
    print(f"workspace ready at {ws.root}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefcast",
        description="Belief-network scenario forecasting: validate models, "
                    "run seeded Monte Carlo forecasts, serve the scenario API.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a network document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run a Monte Carlo forecast")
    p.add_argument("--network", required=True, help="network document path")
    p.add_argument("--overlay", help="optional overlay document path")
    p.add_argument("--targets", required=True, help="comma-separated node ids")
    p.add_argument("--n", type=_positive_int, required=True, help="sample count")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="samples file format (summary.json is always written)")
    p.add_argument("--engine", choices=("vector", "scalar"), default="vector")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="compare simulated statistics to goals")
    p.add_argument("--network", required=True)
    p.add_argument("--overlay")
    p.add_argument("--goals", required=True, help="goals file (target -> mean/stddev)")
    p.add_argument("--tolerance", type=float, required=True,
                   help="allowed |mean - goal| (per-goal overrides allowed)")
    p.add_argument("--sigma-tolerance", type=float, default=None,
                   help="allowed |stddev - goal| (defaults to --tolerance)")
    p.add_argument("--n", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("BELIEFCAST_PORT", DEFAULT_PORT)))
    p.add_argument("--workspace",
                   default=os.environ.get("BELIEFCAST_WORKSPACE", "./workspace"))
    p.add_argument("--static", default=None,
                   help="optional directory of web UI assets to serve at /ui")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("init-workspace", help="seed a workspace with the bundled model")
    p.add_argument("--workspace",
                   default=os.environ.get("BELIEFCAST_WORKSPACE", "./workspace"))
    p.set_defaults(func=cmd_init_workspace)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
