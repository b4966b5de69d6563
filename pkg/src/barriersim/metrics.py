"""Run accounting with byte-stable serialization.

The serializer is deliberately hand-rolled: floats are always rendered with
six decimal places and keys keep insertion order, so two runs that produce
the same numbers produce the same bytes. json.dumps would round-trip float
repr instead, which is stable too but couples the file format to repr
behavior; fixed-point output is also friendlier to diffing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

_FLOAT_FMT = "%.6f"


def _fmt(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value in metrics: {v}")
        if abs(v) < 5e-7:
            v = 0.0  # avoid -0.000000
        return _FLOAT_FMT % v
    if isinstance(value, str):
        out = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(value, (list, tuple, np.ndarray)):
        items = [_fmt(v, indent + 1) for v in value]
        if not items:
            return "[]"
        return "[\n" + ",\n".join(inner + i for i in items) + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{inner}"{k}": {_fmt(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    raise TypeError(f"unserializable metrics value: {type(value)}")


def stable_json(obj) -> str:
    return _fmt(obj, 0) + "\n"


@dataclass
class MetricsLog:
    """Event timeline plus derived counters for one run."""

    scenario: str
    planner_seed: int
    events: list = field(default_factory=list)
    outcome: str = "dnf"
    completion_time: Optional[float] = None
    min_clearance_over_run: Optional[float] = None
    ground_truth_collision_count: int = 0

    def record(self, t: float, event: str, detail: dict) -> None:
        self.events.append({"t": float(t), "event": event, "detail": detail})

    # -- derived counters --------------------------------------------------

    def _count(self, name: str) -> int:
        return sum(1 for e in self.events if e["event"] == name)

    @property
    def stop_count(self) -> int:
        return self._count("stop")

    @property
    def replan_count_current(self) -> int:
        return self._count("replan_current_succeeded")

    @property
    def replan_count_future(self) -> int:
        return self._count("replan_future_succeeded")

    @property
    def waypoints_completed(self) -> int:
        return self._count("subpath_completed")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "planner_seed": self.planner_seed,
            "outcome": self.outcome,
            "completion_time": self.completion_time,
            "stop_count": self.stop_count,
            "replan_count_current": self.replan_count_current,
            "replan_count_future": self.replan_count_future,
            "ground_truth_collision_count": self.ground_truth_collision_count,
            "min_clearance_over_run": self.min_clearance_over_run,
            "waypoints_completed": self.waypoints_completed,
            "events": self.events,
        }

    def serialize(self) -> str:
        return stable_json(self.to_dict())
