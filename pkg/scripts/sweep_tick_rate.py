"""Monitor-rate sweep on the person-crossing scenario.

How does the validation cadence trade off against stops, reaction latency,
and mission time? The deployed system runs at 0.75 Hz; this sweeps around
that point. Each run is deterministic, so the table is reproducible. Run
from the repo root:

    python scripts/sweep_tick_rate.py [--scenario F] [--rates 0.25 0.5 0.75 1.5 3.0]
"""
import argparse
import dataclasses

from barriersim.scenario import load_scenario
from barriersim.sim import run_headless

DEFAULT_RATES = [0.25, 0.5, 0.75, 1.5, 3.0, 6.0]


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario",
                    default="src/barriersim/data/scenario_crossing.json")
    ap.add_argument("--rates", type=float, nargs="+", default=DEFAULT_RATES)
    args = ap.parse_args()

    base, warnings = load_scenario(args.scenario)
    for w in warnings:
        print(f"warning: {w}")

    print(f"{'tick_hz':>8} {'outcome':>8} {'t_done':>8} {'stops':>6} "
          f"{'replans':>8} {'contacts':>9} {'min_clear':>10}")
    for hz in args.rates:
        spec = dataclasses.replace(
            base, monitor=dataclasses.replace(base.monitor, tick_hz=hz))
        m = run_headless(spec)
        t_done = f"{m.completion_time:8.2f}" if m.completion_time else "       -"
        clear = (f"{m.min_clearance_over_run:10.4f}"
                 if m.min_clearance_over_run is not None else "         -")
        replans = m.replan_count_current + m.replan_count_future
        print(f"{hz:8.2f} {m.outcome:>8} {t_done} {m.stop_count:6d} "
              f"{replans:8d} {m.ground_truth_collision_count:9d} {clear}")


if __name__ == "__main__":
    main()
