"""Command line front door: headless runs, the server, and scenario linting.

Exit codes: 0 success (run finished Done; validate passed), 1 runtime or
validation failure, 2 run finished Failed or did not finish, 64 usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional, Sequence

from ..errors import PortInUse, ScenarioInvalid
from ..scenario import load_scenario
from ..sim import run_headless
from . import server

EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default is exit code 2
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="barriersim",
                description="Waypoint-mission arm simulator with virtual safety barriers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario headless and write metrics")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--seed", type=int, default=None, help="override planner seed")
    run.add_argument("--metrics", required=True, help="output metrics JSON path")
    run.add_argument("--max-time", type=float, default=None, help="override sim time cap (s)")
    run.add_argument("--tick-hz", type=float, default=None, help="override monitor rate (Hz)")

    srv = sub.add_parser("serve", help="serve the interactive client")
    srv.add_argument("--scenario", required=True, help="scenario JSON file")
    srv.add_argument("--port", type=int,
                     default=int(os.environ.get(server.PORT_ENV_VAR, server.DEFAULT_PORT)),
                     help=f"listen port (default ${server.PORT_ENV_VAR} or {server.DEFAULT_PORT})")
    srv.add_argument("--host", default="127.0.0.1", help="bind address")

    val = sub.add_parser("validate", help="schema-check a scenario file")
    val.add_argument("--scenario", required=True, help="scenario JSON file")
    return p


def _load(path: str):
    spec, warnings = load_scenario(path)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return spec


def _cmd_run(args) -> int:
    try:
        spec = _load(args.scenario)
    except ScenarioInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    overrides: dict = {}
    if args.seed is not None:
        overrides["planner_seed"] = args.seed
    if args.max_time is not None:
        if args.max_time <= 0:
            print("error: --max-time must be positive", file=sys.stderr)
            return EX_USAGE
        overrides["max_time"] = args.max_time
    if args.tick_hz is not None:
        if args.tick_hz <= 0:
            print("error: --tick-hz must be positive", file=sys.stderr)
            return EX_USAGE
        overrides["monitor"] = dataclasses.replace(spec.monitor, tick_hz=args.tick_hz)
    if overrides:
        spec = dataclasses.replace(spec, **overrides)

    metrics = run_headless(spec)
    with open(args.metrics, "w") as f:
        f.write(metrics.serialize())
    done = metrics.completion_time
    summary = (f"{metrics.outcome}"
               + (f" at t={done:.2f}s" if done is not None else "")
               + f" stops={metrics.stop_count}"
               + f" replans={metrics.replan_count_current}+{metrics.replan_count_future}"
               + f" contacts={metrics.ground_truth_collision_count}")
    print(summary)
    return 0 if metrics.outcome == "done" else 2


def _cmd_serve(args) -> int:
    try:
        spec = _load(args.scenario)
    except ScenarioInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        print(f"serving {spec.name} on http://{args.host}:{args.port} (ws at /ws)")
        server.serve(spec, args.host, args.port)
    except PortInUse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_validate(args) -> int:
    try:
        spec, warnings = load_scenario(args.scenario)
    except ScenarioInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"ok: {spec.name} ({len(spec.waypoints)} waypoints, "
          f"{len(spec.barriers)} barriers)")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return _cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
