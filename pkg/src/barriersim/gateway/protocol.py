"""Wire protocol: command parsing, response shapes, and state serialization.

One UTF-8 JSON document per WebSocket text message. Commands carry a
client-chosen request_id echoed verbatim in exactly one response; state
messages are fire-and-forget broadcasts. All numeric values are SI
(meters, seconds, radians); quaternions are (w, x, y, z).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..arm import ee_position, forward_kinematics
from ..collision import EMPTY_CLEARANCE, densify
from ..errors import InvalidDimensions, SchemaError
from ..geometry import Pose
from ..mission import SubPathStatus
from ..shapes import OrientedBox, Sphere, VerticalCylinder

COMMAND_TYPES = (
    "add_waypoint", "lock_path", "execute", "spawn_barrier",
    "transform_barrier", "delete_barrier", "move_person",
    "pause", "resume", "reset", "set_sim_speed",
)

# joint-space spacing of polyline FK samples
POLYLINE_EPS_Q = 0.1


@dataclass
class Command:
    type: str
    request_id: Any
    fields: dict = field(default_factory=dict)


def _require(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(f"missing field '{key}'")
    return payload[key]


def _vec(payload: dict, key: str, n: int) -> np.ndarray:
    raw = _require(payload, key)
    if not isinstance(raw, (list, tuple)) or len(raw) != n:
        raise SchemaError(f"'{key}' must be a list of {n} numbers")
    out = np.empty(n)
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"'{key}[{i}]' must be a number")
        out[i] = float(v)
    if not np.all(np.isfinite(out)):
        raise SchemaError(f"'{key}' must be finite")
    return out


def _number(payload: dict, key: str) -> float:
    raw = _require(payload, key)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SchemaError(f"'{key}' must be a number")
    v = float(raw)
    if not np.isfinite(v):
        raise SchemaError(f"'{key}' must be finite")
    return v


def _string(payload: dict, key: str) -> str:
    raw = _require(payload, key)
    if not isinstance(raw, str):
        raise SchemaError(f"'{key}' must be a string")
    return raw


def _quat(payload: dict, key: str) -> np.ndarray:
    q = _vec(payload, key, 4)
    norm = float(np.linalg.norm(q))
    if abs(norm - 1.0) > 1e-3:
        raise SchemaError(f"'{key}' must be a unit quaternion (w, x, y, z)")
    return q / norm


def parse_command(message: dict) -> Command:
    """Validate one decoded command document; SchemaError on any violation."""
    if not isinstance(message, dict):
        raise SchemaError("command must be a JSON object")
    mtype = message.get("type")
    if mtype not in COMMAND_TYPES:
        raise SchemaError(f"unknown command type {mtype!r}")
    if "request_id" not in message:
        raise SchemaError("missing field 'request_id'")
    rid = message["request_id"]
    if not isinstance(rid, (str, int)):
        raise SchemaError("'request_id' must be a string or integer")

    f: dict = {}
    if mtype == "add_waypoint":
        f["position"] = _vec(message, "position", 3)
        f["label"] = _string(message, "label") if "label" in message else ""
    elif mtype == "spawn_barrier":
        kind = _string(message, "kind")
        try:
            if kind == "sphere":
                f["shape"] = Sphere(_vec(message, "center", 3), _number(message, "radius"))
            elif kind == "box":
                orientation = _quat(message, "orientation") if "orientation" in message else None
                f["shape"] = OrientedBox(Pose(_vec(message, "position", 3), orientation),
                                         _vec(message, "half_extents", 3))
            else:
                raise SchemaError(f"unknown barrier kind {kind!r}")
        except ValueError as exc:  # shape constructors reject degenerate dims
            raise InvalidDimensions(str(exc)) from None
        f["label"] = _string(message, "label") if "label" in message else ""
    elif mtype == "transform_barrier":
        f["id"] = _string(message, "id")
        f["position"] = _vec(message, "position", 3)
        f["orientation"] = _quat(message, "orientation") if "orientation" in message else None
        f["scale"] = _vec(message, "scale", 3) if "scale" in message else np.ones(3)
        if np.any(f["scale"] <= 0):
            raise SchemaError("'scale' factors must be positive")
    elif mtype == "delete_barrier":
        f["id"] = _string(message, "id")
    elif mtype == "move_person":
        f["position"] = _vec(message, "position", 2)
    elif mtype == "set_sim_speed":
        f["multiplier"] = _number(message, "multiplier")
    # lock_path / execute / pause / resume / reset carry no payload
    return Command(mtype, rid, f)


def decode(raw: str) -> dict:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("message must be a JSON object")
    return doc


def encode(message: dict) -> str:
    # default float repr round-trips exactly, so encode(decode(x)) is identity
    return json.dumps(message)


def ok_response(request_id, result: Optional[dict] = None) -> dict:
    return {"type": "response", "request_id": request_id, "ok": True,
            "result": result if result is not None else {}}


def error_response(request_id, code: str, detail: str) -> dict:
    return {"type": "response", "request_id": request_id, "ok": False,
            "error": {"code": code, "detail": detail}}


# -- state serialization -----------------------------------------------------


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr).ravel()]


def shape_to_wire(shape) -> dict:
    if isinstance(shape, Sphere):
        return {"kind": "sphere", "center": _floats(shape.center),
                "radius": float(shape.radius)}
    if isinstance(shape, VerticalCylinder):
        return {"kind": "cylinder", "center_xy": _floats(shape.center_xy),
                "base_z": float(shape.z0), "height": float(shape.height),
                "radius": float(shape.radius)}
    if isinstance(shape, OrientedBox):
        return {"kind": "box", "position": _floats(shape.pose.position),
                "orientation": _floats(shape.pose.orientation),
                "half_extents": _floats(shape.half_extents)}
    raise TypeError(f"unserializable shape {type(shape).__name__}")


def ee_polyline(arm, trajectory) -> list:
    """FK-sampled end-effector polyline of a joint trajectory."""
    rows = densify(trajectory.knots, POLYLINE_EPS_Q)
    return [_floats(ee_position(arm, q)) for q in rows]


def state_message(sim, *, paused: bool, sim_speed: float,
                  polyline_cache: Optional[dict] = None) -> dict:
    """Serialize one consistent view of the simulation.

    The barrier block comes from a single snapshot so no two registry
    versions ever mix. polyline_cache (index -> (traj id, polyline)) skips
    FK resampling of unchanged trajectories across broadcasts.
    """
    mission = sim.mission
    snap = sim.registry.snapshot(sim.sim_time)
    q = mission.robot_config()
    _, ee = forward_kinematics(sim.arm, q)

    subpaths = []
    for sub in mission.subpaths:
        wp = mission.waypoints[sub.index]
        poly = None
        if sub.trajectory is not None and sub.status is not SubPathStatus.UNPLANNED:
            if polyline_cache is not None:
                hit = polyline_cache.get(sub.index)
                if hit is not None and hit[0] == id(sub.trajectory):
                    poly = hit[1]
            if poly is None:
                poly = ee_polyline(sim.arm, sub.trajectory)
                if polyline_cache is not None:
                    polyline_cache[sub.index] = (id(sub.trajectory), poly)
        subpaths.append({
            "index": sub.index,
            "status": sub.status.value,
            "waypoint": {"id": wp.id, "label": wp.label,
                         "position": _floats(wp.ee_target)},
            "polyline": poly,
        })

    m = sim.metrics
    metrics = {
        "stop_count": m.stop_count,
        "replan_count_current": m.replan_count_current,
        "replan_count_future": m.replan_count_future,
        "ground_truth_collision_count": m.ground_truth_collision_count,
        "waypoints_completed": m.waypoints_completed,
        "min_clearance_over_run": (float(sim._min_clearance)
                                   if sim._min_clearance < EMPTY_CLEARANCE else None),
        "event_count": len(m.events),
    }

    return {
        "type": "state",
        "sim_time": float(sim.sim_time),
        "phase": mission.phase.value,
        "paused": bool(paused),
        "sim_speed": float(sim_speed),
        "robot": {"q": _floats(q),
                  "ee": {"position": _floats(ee.position),
                         "orientation": _floats(ee.orientation)}},
        "barriers": {"version": snap.version,
                     "items": [{"id": b.id, "kind": b.kind, "label": b.label,
                                "shape": shape_to_wire(b.shape)}
                               for b in snap.barriers]},
        "waypoints": [{"id": w.id, "label": w.label, "position": _floats(w.ee_target)}
                      for w in mission.waypoints],
        "subpaths": subpaths,
        "metrics": metrics,
    }
