"""Run one scenario headless and print the event timeline.

The metrics JSON written by `barriersim run` is for machines; this prints
the same run for humans. Run from the repo root:

    python scripts/run_scenario.py src/barriersim/data/scenario_crossing.json [--seed N] [--quiet]
"""
import argparse

from barriersim.scenario import load_scenario
from barriersim.sim import run_headless


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--quiet", action="store_true", help="summary only")
    args = ap.parse_args()

    spec, warnings = load_scenario(args.scenario)
    for w in warnings:
        print(f"warning: {w}")
    if args.seed is not None:
        import dataclasses
        spec = dataclasses.replace(spec, planner_seed=args.seed)

    metrics = run_headless(spec)

    if not args.quiet:
        for e in metrics.events:
            detail = " ".join(f"{k}={v}" for k, v in e["detail"].items())
            print(f"{e['t']:9.3f}  {e['event']:<26} {detail}")
        print()
    done = f" t={metrics.completion_time:.2f}s" if metrics.completion_time else ""
    clear = (f" min_clearance={metrics.min_clearance_over_run:.4f}m"
             if metrics.min_clearance_over_run is not None else "")
    print(f"{spec.name}: {metrics.outcome}{done}"
          f" stops={metrics.stop_count}"
          f" replans_current={metrics.replan_count_current}"
          f" replans_future={metrics.replan_count_future}"
          f" contacts={metrics.ground_truth_collision_count}"
          f" waypoints={metrics.waypoints_completed}{clear}")


if __name__ == "__main__":
    main()
