"""Desk-scale simulator of a virtual-barrier safety layer for a
waypoint-programmed collaborative arm: a person-following cylinder and
user-spawned obstacle barriers guard the robot, an online monitor replans
invalidated sub-paths, and every run is deterministic given its seeds."""

__version__ = "0.1.0"
