"""Geometric primitives shared by the arm model and the barrier registry."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .geometry import Pose


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    return a


@dataclass(frozen=True, eq=False)
class CapsuleShape:
    """Capsule: segment p0-p1 swept by a sphere of the given radius. World frame."""

    p0: np.ndarray
    p1: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "p0", _vec3(self.p0))
        object.__setattr__(self, "p1", _vec3(self.p1))
        if not self.radius > 0:
            raise ValueError("capsule radius must be positive")


@dataclass(frozen=True, eq=False)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True, eq=False)
class VerticalCylinder:
    """Solid cylinder with a vertical (+z) axis, base at z0, top at z0 + height."""

    center_xy: np.ndarray
    z0: float
    height: float
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center_xy, dtype=float).reshape(2)
        object.__setattr__(self, "center_xy", c)
        if not (self.radius > 0 and self.height > 0):
            raise ValueError("cylinder radius and height must be positive")


@dataclass(frozen=True, eq=False)
class OrientedBox:
    """Box with half extents along the axes of its pose frame."""

    pose: Pose
    half_extents: np.ndarray

    def __post_init__(self):
        h = _vec3(self.half_extents)
        if not np.all(h > 0):
            raise ValueError("box half extents must be positive")
        object.__setattr__(self, "half_extents", h)


BarrierShape = Union[Sphere, VerticalCylinder, OrientedBox]
