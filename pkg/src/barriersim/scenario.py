"""Scenario files: schema, loading, validation.

A scenario is a JSON document mirroring ScenarioSpec. Validation errors carry
file:line references where the offending entry can be located in the source
text; warnings (currently only the person speed bound) are collected, not
fatal.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .barriers import PERSON_HEIGHT_DEFAULT, PERSON_RADIUS_DEFAULT, _check_obstacle_shape
from .errors import ScenarioInvalid
from .geometry import Pose
from .mission import MonitorConfig
from .planner import PlannerConfig
from .shapes import BarrierShape, OrientedBox, Sphere

PERSON_SPEED_BOUND = 1.0  # m/s; the monitor cadence assumes at most this

_DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class BarrierInit:
    shape: BarrierShape
    label: str = ""


@dataclass(frozen=True)
class PersonSpec:
    """Scripted or interactive person. Script rows are (t, xy); the person
    holds the first row's position before the script starts and the last
    row's after it ends."""

    start_xy: tuple = (5.0, 5.0)
    radius: float = PERSON_RADIUS_DEFAULT
    height: float = PERSON_HEIGHT_DEFAULT
    script: Optional[tuple] = None  # tuple of (t, np.ndarray xy)
    interactive: bool = False

    def position_at(self, t: float) -> np.ndarray:
        if not self.script:
            return np.asarray(self.start_xy, dtype=float)
        times = [row[0] for row in self.script]
        if t <= times[0]:
            return self.script[0][1].copy()
        if t >= times[-1]:
            return self.script[-1][1].copy()
        i = int(np.searchsorted(times, t, side="right")) - 1
        t0, p0 = self.script[i]
        t1, p1 = self.script[i + 1]
        u = (t - t0) / (t1 - t0)
        return p0 + u * (p1 - p0)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    arm_file: Path
    waypoints: tuple  # of (np.ndarray position, str label)
    barriers: tuple   # of BarrierInit
    person: PersonSpec
    monitor: MonitorConfig
    dt: float = 0.02
    max_time: float = 300.0
    planner_seed: int = 0
    home_config: Optional[np.ndarray] = None
    workspace_lo: tuple = (-2.0, -2.0, -0.5)
    workspace_hi: tuple = (2.0, 2.0, 2.5)
    planner: PlannerConfig = field(default_factory=lambda: PlannerConfig(time_budget=None))


def _line_of_script_entry(raw: str, index: int) -> Optional[int]:
    """1-based line of the index-th entry of the person script array."""
    key = raw.find('"script"')
    if key < 0:
        return None
    start = raw.find("[", key)
    if start < 0:
        return None
    depth = 0
    entry = -1
    for pos in range(start, len(raw)):
        ch = raw[pos]
        if ch == "[":
            depth += 1
            if depth == 2:
                entry += 1
                if entry == index:
                    return raw.count("\n", 0, pos) + 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                break
    return None


def _fail(path: Path, msg: str, line: Optional[int] = None) -> None:
    loc = f"{path}:{line}" if line else str(path)
    raise ScenarioInvalid(f"{loc}: {msg}")


def _parse_barrier(entry: dict, path: Path, idx: int) -> BarrierInit:
    kind = entry.get("kind")
    label = entry.get("label", "")
    try:
        if kind == "sphere":
            shape: BarrierShape = Sphere(np.asarray(entry["center"], dtype=float),
                                         float(entry["radius"]))
        elif kind == "box":
            pose = Pose(np.asarray(entry["position"], dtype=float),
                        entry.get("orientation"))
            shape = OrientedBox(pose, np.asarray(entry["half_extents"], dtype=float))
        else:
            _fail(path, f"barriers[{idx}]: unknown kind {kind!r} (sphere or box)")
        _check_obstacle_shape(shape)
    except ScenarioInvalid:
        raise
    except Exception as exc:
        _fail(path, f"barriers[{idx}]: {exc}")
    return BarrierInit(shape, label)


def resolve_arm_file(name: str, scenario_dir: Path) -> Path:
    cand = Path(name)
    if cand.is_absolute() and cand.exists():
        return cand
    local = scenario_dir / name
    if local.exists():
        return local
    bundled = _DATA_DIR / name
    if bundled.exists():
        return bundled
    return local  # ArmDescription.from_file reports the miss


def load_scenario(path) -> tuple[ScenarioSpec, list]:
    """Parse and validate one scenario file; returns (spec, warnings)."""
    path = Path(path)
    if not path.exists():
        raise ScenarioInvalid(f"{path}: no such file")
    raw = path.read_text()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        _fail(path, f"not valid JSON: {exc.msg}", exc.lineno)
    if not isinstance(doc, dict):
        _fail(path, "top level must be an object")

    warnings: list = []
    name = doc.get("name", path.stem)
    if "arm_file" not in doc:
        _fail(path, "missing required key arm_file")
    arm_file = resolve_arm_file(doc["arm_file"], path.parent)

    waypoints = []
    for i, wp in enumerate(doc.get("waypoints", [])):
        try:
            pos = np.asarray(wp["position"], dtype=float).reshape(3)
        except Exception:
            _fail(path, f"waypoints[{i}]: position must be a 3-vector")
        waypoints.append((pos, str(wp.get("label", ""))))

    barriers = tuple(_parse_barrier(b, path, i) for i, b in enumerate(doc.get("barriers", [])))

    pdoc = doc.get("person", {})
    script = None
    interactive = bool(pdoc.get("interactive", False))
    if "script" in pdoc and pdoc["script"] is not None:
        rows = []
        prev_t = None
        prev_xy = None
        for i, row in enumerate(pdoc["script"]):
            try:
                t = float(row[0])
                xy = np.asarray(row[1], dtype=float).reshape(2)
            except Exception:
                _fail(path, f"person.script[{i}]: expected [t, [x, y]]",
                      _line_of_script_entry(raw, i))
            if t < 0:
                _fail(path, f"person.script[{i}]: time {t} is negative",
                      _line_of_script_entry(raw, i))
            if prev_t is not None:
                if t <= prev_t:
                    _fail(path, f"person.script[{i}]: time {t} does not increase past {prev_t}",
                          _line_of_script_entry(raw, i))
                speed = float(np.linalg.norm(xy - prev_xy)) / (t - prev_t)
                if speed > PERSON_SPEED_BOUND + 1e-9:
                    line = _line_of_script_entry(raw, i)
                    loc = f"{path}:{line}" if line else str(path)
                    warnings.append(
                        f"{loc}: person speed {speed:.2f} m/s exceeds the {PERSON_SPEED_BOUND} m/s "
                        f"bound the monitor cadence assumes")
            prev_t, prev_xy = t, xy
            rows.append((t, xy))
        script = tuple(rows)

    person = PersonSpec(
        start_xy=tuple(pdoc.get("start", (5.0, 5.0))),
        radius=float(pdoc.get("radius", PERSON_RADIUS_DEFAULT)),
        height=float(pdoc.get("height", PERSON_HEIGHT_DEFAULT)),
        script=script,
        interactive=interactive,
    )
    if person.radius <= 0 or person.height <= 0:
        _fail(path, "person radius and height must be positive")

    mdoc = doc.get("monitor", {})
    monitor = MonitorConfig(
        tick_hz=float(mdoc.get("tick_hz", 0.75)),
        d_safe=float(mdoc.get("d_safe", 0.05)),
        eps_q=float(mdoc.get("eps_q", 0.05)),
    )
    if monitor.tick_hz <= 0:
        _fail(path, f"monitor.tick_hz must be positive, got {monitor.tick_hz}")
    if monitor.eps_q <= 0 or monitor.d_safe < 0:
        _fail(path, "monitor.eps_q must be positive and monitor.d_safe non-negative")

    sdoc = doc.get("sim", {})
    dt = float(sdoc.get("dt", 0.02))
    max_time = float(sdoc.get("max_time", 300.0))
    if dt <= 0:
        _fail(path, f"sim.dt must be positive, got {dt}")
    if max_time <= 0:
        _fail(path, f"sim.max_time must be positive, got {max_time}")

    pldoc = doc.get("planner", {})
    planner = PlannerConfig(
        step=float(pldoc.get("step", 0.2)),
        max_iters=int(pldoc.get("max_iters", 20000)),
        shortcut_attempts=int(pldoc.get("shortcut_attempts", 100)),
        time_budget=None,  # in-sim planning terminates on iterations, not wall clock
    )

    home = None
    if doc.get("home_config") is not None:
        home = np.asarray(doc["home_config"], dtype=float)

    wdoc = doc.get("workspace", {})
    spec = ScenarioSpec(
        name=str(name),
        arm_file=arm_file,
        waypoints=tuple(waypoints),
        barriers=barriers,
        person=person,
        monitor=monitor,
        dt=dt,
        max_time=max_time,
        planner_seed=int(doc.get("seeds", {}).get("planner", 0)),
        home_config=home,
        workspace_lo=tuple(wdoc.get("lo", (-2.0, -2.0, -0.5))),
        workspace_hi=tuple(wdoc.get("hi", (2.0, 2.0, 2.5))),
        planner=planner,
    )
    return spec, warnings
