"""Versioned world model: one person-following cylinder plus user obstacles.

Barrier objects are immutable; every mutation replaces the stored object and
bumps the registry version, so a snapshot is just the current tuple of
barriers plus that version. Snapshots taken earlier never observe later edits.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InvalidDimensions, PersonBarrierImmutable, UnknownBarrier
from .geometry import Pose
from .shapes import BarrierShape, OrientedBox, Sphere, VerticalCylinder

PERSON_ID = "person"
PERSON_RADIUS_DEFAULT = 0.4
PERSON_HEIGHT_DEFAULT = 2.0
PERSON_MOVE_DEDUP = 1e-6
DIM_MIN = 0.05
DIM_MAX = 2.0


@dataclass(frozen=True, eq=False)
class Barrier:
    id: str
    kind: str  # "person" | "obstacle"
    shape: BarrierShape
    label: str = ""


@dataclass(frozen=True, eq=False)
class PersonState:
    """Headset-derived person sample: position in meters, yaw informational."""

    position: np.ndarray
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))


@dataclass(frozen=True, eq=False)
class WorldSnapshot:
    version: int
    barriers: tuple
    timestamp: float = 0.0

    def barrier(self, barrier_id: str) -> Optional[Barrier]:
        for b in self.barriers:
            if b.id == barrier_id:
                return b
        return None


def _check_obstacle_shape(shape: BarrierShape) -> None:
    if isinstance(shape, Sphere):
        dims = [shape.radius]
    elif isinstance(shape, OrientedBox):
        dims = list(shape.half_extents)
    else:
        raise InvalidDimensions("obstacle shape must be a sphere or a box")
    for d in dims:
        if not (DIM_MIN <= d <= DIM_MAX):
            raise InvalidDimensions(
                f"obstacle dimension {d:.4f} outside [{DIM_MIN}, {DIM_MAX}] m"
            )


class BarrierRegistry:
    """Single-writer registry of the person barrier and spawned obstacles."""

    def __init__(self, person_xy=(5.0, 5.0), person_radius: float = PERSON_RADIUS_DEFAULT,
                 person_height: float = PERSON_HEIGHT_DEFAULT):
        self.person_radius = float(person_radius)
        self.person_height = float(person_height)
        self._person_pos = np.array([person_xy[0], person_xy[1], 0.0])
        self._barriers: dict[str, Barrier] = {}
        self._barriers[PERSON_ID] = Barrier(
            PERSON_ID, "person",
            VerticalCylinder(np.array(person_xy, dtype=float), 0.0, self.person_height, self.person_radius),
            label="person",
        )
        self.version = 0
        self._next_obstacle = 1

    # -- queries ---------------------------------------------------------

    def snapshot(self, timestamp: float = 0.0) -> WorldSnapshot:
        return WorldSnapshot(self.version, tuple(self._barriers.values()), timestamp)

    def person_position(self) -> np.ndarray:
        return self._person_pos.copy()

    def get(self, barrier_id: str) -> Barrier:
        try:
            return self._barriers[barrier_id]
        except KeyError:
            raise UnknownBarrier(barrier_id) from None

    # -- mutations (each bumps version exactly once) -----------------------

    def spawn_obstacle(self, shape: BarrierShape, label: str = "") -> str:
        _check_obstacle_shape(shape)
        bid = f"obs-{self._next_obstacle}"
        self._next_obstacle += 1
        self._barriers[bid] = Barrier(bid, "obstacle", shape, label)
        self.version += 1
        return bid

    def transform_barrier(self, barrier_id: str, new_pose: Pose, scale=(1.0, 1.0, 1.0)) -> Barrier:
        if barrier_id == PERSON_ID:
            raise PersonBarrierImmutable("person barrier follows the headset only")
        old = self.get(barrier_id)
        scale = np.asarray(scale, dtype=float).reshape(3)
        if np.any(scale <= 0):
            raise InvalidDimensions("scale factors must be positive")
        if isinstance(old.shape, Sphere):
            shape: BarrierShape = Sphere(new_pose.position, old.shape.radius * float(scale[0]))
        elif isinstance(old.shape, OrientedBox):
            shape = OrientedBox(new_pose, old.shape.half_extents * scale)
        else:  # pragma: no cover - registry never stores other obstacle shapes
            raise InvalidDimensions("unsupported obstacle shape")
        _check_obstacle_shape(shape)  # validates before committing; failure leaves barrier untouched
        updated = Barrier(old.id, old.kind, shape, old.label)
        self._barriers[barrier_id] = updated
        self.version += 1
        return updated

    def delete_barrier(self, barrier_id: str) -> None:
        if barrier_id == PERSON_ID:
            raise PersonBarrierImmutable("person barrier cannot be deleted")
        if barrier_id not in self._barriers:
            raise UnknownBarrier(barrier_id)
        del self._barriers[barrier_id]
        self.version += 1

    def update_person(self, state: PersonState) -> bool:
        """Move the person cylinder under the headset sample.

        Updates closer than 1e-6 m in the ground plane are dropped so a
        stationary person does not spin the version counter. Returns whether
        a new version was committed.
        """
        new_xy = state.position[:2]
        if np.linalg.norm(new_xy - self._person_pos[:2]) <= PERSON_MOVE_DEDUP:
            return False
        self._person_pos = np.array([new_xy[0], new_xy[1], state.position[2]])
        self._barriers[PERSON_ID] = Barrier(
            PERSON_ID, "person",
            VerticalCylinder(new_xy.copy(), 0.0, self.person_height, self.person_radius),
            label="person",
        )
        self.version += 1
        return True
