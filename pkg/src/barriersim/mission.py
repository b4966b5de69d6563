"""Waypoint workflow and the online path monitor.

The controller owns the sub-path chain. Planning requests always carry exact
endpoint arrays (the goal array of sub-path i-1 IS the start array of i), so
junction equality is bitwise, never approximate. The monitor is a pure
decision function over one world snapshot; the controller applies its actions
synchronously in sim time.

Re-validation is skipped for a sub-path whose trajectory was planned against
the snapshot version currently in force: planner edge checks run one decade
finer than the monitor resolution, and coarse sample grids are subsets of
fine ones, so a fresh plan cannot fail the monitor's check. Trajectories
planned under a relaxed stop-recovery threshold are exempt from the skip and
are always re-validated at full d_safe.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .arm import ArmDescription
from .barriers import WorldSnapshot
from .collision import config_valid, path_valid
from .errors import (
    OutOfWorkspace,
    PlanningError,
    PlanningFailed,
    WrongPhase,
)
from .planner import (
    PlannerConfig,
    PlanRequest,
    Trajectory,
    plan_trajectory,
    remaining_knots,
    sample_trajectory,
)

MAX_STOP_RETRIES_DEFAULT = 30


class Phase(enum.Enum):
    COLLECTING = "collecting"
    LOCKED = "locked"
    EXECUTING = "executing"
    STOPPED = "stopped"
    DONE = "done"
    FAILED = "failed"


class SubPathStatus(enum.Enum):
    UNPLANNED = "unplanned"
    PLANNED = "planned"
    EXECUTING = "executing"
    INVALID = "invalid"
    REPLANNING = "replanning"
    COMPLETED = "completed"


@dataclass(frozen=True)
class Waypoint:
    id: int
    ee_target: np.ndarray
    label: str = ""


@dataclass
class SubPath:
    """Sub-path i connects waypoint i-1's goal config (home for i=0) to waypoint i."""

    index: int
    start_config: np.ndarray
    goal_config: np.ndarray
    trajectory: Optional[Trajectory]
    status: SubPathStatus
    planned_against_version: int = -1
    invalidated_at_version: int = -1
    relaxed: bool = False  # planned under the stop-recovery threshold


@dataclass(frozen=True)
class MonitorConfig:
    tick_hz: float = 0.75
    d_safe: float = 0.05
    eps_q: float = 0.05


@dataclass(frozen=True)
class StopAndReplanCurrent:
    barrier: Optional[str] = None


@dataclass(frozen=True)
class ReplanFuture:
    index: int
    barrier: Optional[str] = None


MonitorAction = object
EventCallback = Callable[[float, str, dict], None]


@dataclass
class _StopState:
    retries: int = 0


class MissionController:
    """Single-writer mission state machine; all mutations happen on the sim context."""

    def __init__(self, arm: ArmDescription, monitor: MonitorConfig,
                 home_config: np.ndarray,
                 workspace_lo=(-2.0, -2.0, -0.5), workspace_hi=(2.0, 2.0, 2.5),
                 planner_config: Optional[PlannerConfig] = None,
                 planner_seed: int = 0,
                 max_stop_retries: int = MAX_STOP_RETRIES_DEFAULT,
                 on_event: Optional[EventCallback] = None):
        self.arm = arm
        self.monitor = monitor
        self.home_config = arm.check_config(home_config)
        self.workspace_lo = np.asarray(workspace_lo, dtype=float)
        self.workspace_hi = np.asarray(workspace_hi, dtype=float)
        self.planner_config = planner_config or PlannerConfig()
        self.max_stop_retries = max_stop_retries
        self.on_event = on_event

        self.phase = Phase.COLLECTING
        self.waypoints: list[Waypoint] = []
        self.subpaths: list[SubPath] = []
        self.current_subpath: Optional[int] = None
        self.exec_time = 0.0
        self.failure_reason: Optional[str] = None
        self._q = self.home_config.copy()
        self._seed_seq = np.random.SeedSequence(planner_seed)
        self._stop = _StopState()

    # -- helpers -----------------------------------------------------------

    def _emit(self, sim_time: float, name: str, detail: dict) -> None:
        if self.on_event is not None:
            self.on_event(sim_time, name, detail)

    def _next_seed(self) -> int:
        child = self._seed_seq.spawn(1)[0]
        return int(child.generate_state(1, np.uint64)[0])

    def robot_config(self) -> np.ndarray:
        return self._q.copy()

    def _plan(self, start: np.ndarray, snapshot: WorldSnapshot, *,
              goal_config=None, goal_position=None, recovery=False) -> Trajectory:
        req = PlanRequest(
            start=start,
            snapshot=snapshot,
            d_safe=self.monitor.d_safe,
            eps_q=self.monitor.eps_q,
            goal_config=goal_config,
            goal_position=goal_position,
            rng_seed=self._next_seed(),
            recovery=recovery,
        )
        return plan_trajectory(req, self.arm, self.planner_config)

    # -- workflow commands --------------------------------------------------

    def add_waypoint(self, ee_target, label: str = "", sim_time: float = 0.0) -> Waypoint:
        if self.phase is not Phase.COLLECTING:
            raise WrongPhase(f"add_waypoint requires collecting phase, not {self.phase.value}")
        target = np.asarray(ee_target, dtype=float).reshape(3)
        if np.any(target < self.workspace_lo) or np.any(target > self.workspace_hi):
            raise OutOfWorkspace(f"waypoint {target.tolist()} outside workspace bounds")
        wp = Waypoint(len(self.waypoints), target, label)
        self.waypoints.append(wp)
        self._emit(sim_time, "waypoint_added",
                   {"id": wp.id, "label": label, "position": target.tolist()})
        return wp

    def lock_path(self, snapshot: WorldSnapshot, sim_time: float = 0.0) -> None:
        """Plan the whole chain against one snapshot; all-or-nothing."""
        if self.phase is not Phase.COLLECTING:
            raise WrongPhase(f"lock_path requires collecting phase, not {self.phase.value}")
        if not self.waypoints:
            raise WrongPhase("lock_path requires at least one waypoint")
        planned: list[SubPath] = []
        start = self.home_config
        for wp in self.waypoints:
            try:
                traj = self._plan(start, snapshot, goal_position=wp.ee_target)
            except PlanningError as exc:
                self.subpaths = []
                raise PlanningFailed(wp.id, exc) from exc
            goal = traj.end_config()
            planned.append(SubPath(wp.id, start, goal, traj, SubPathStatus.PLANNED,
                                   planned_against_version=snapshot.version))
            start = goal
        self.subpaths = planned
        self.phase = Phase.LOCKED
        self._emit(sim_time, "path_locked", {"subpaths": len(planned)})

    def execute(self, sim_time: float = 0.0) -> None:
        if self.phase is not Phase.LOCKED:
            raise WrongPhase(f"execute requires locked phase, not {self.phase.value}")
        self.phase = Phase.EXECUTING
        self.current_subpath = 0
        self.exec_time = 0.0
        self.subpaths[0].status = SubPathStatus.EXECUTING
        self._emit(sim_time, "execution_started", {})

    # -- executor ------------------------------------------------------------

    def advance(self, dt: float, sim_time: float) -> np.ndarray:
        """Move the robot dt seconds along the active trajectory.

        Handles junction handoff (with time carry-over) and completion. A
        junction whose next sub-path is not Planned becomes a stop: the robot
        waits at the junction config and the stop-replan retry loop takes over.
        """
        if self.phase is not Phase.EXECUTING:
            return self._q.copy()
        self.exec_time += dt
        while self.phase is Phase.EXECUTING:
            sub = self.subpaths[self.current_subpath]
            dur = sub.trajectory.duration
            if self.exec_time < dur - 1e-12:
                break
            leftover = max(self.exec_time - dur, 0.0)
            sub.status = SubPathStatus.COMPLETED
            self._emit(sim_time, "subpath_completed", {"subpath": sub.index})
            if sub.index + 1 >= len(self.subpaths):
                self.phase = Phase.DONE
                self._q = sub.trajectory.end_config()
                self._emit(sim_time, "mission_done", {})
                return self._q.copy()
            nxt = self.subpaths[sub.index + 1]
            self.current_subpath = nxt.index
            if nxt.status is SubPathStatus.PLANNED:
                nxt.status = SubPathStatus.EXECUTING
                self.exec_time = leftover
            else:
                # pending future replan never landed; wait at the junction
                self.phase = Phase.STOPPED
                self.exec_time = 0.0
                self._q = nxt.start_config.copy()
                self._stop = _StopState()
                self._emit(sim_time, "stop",
                           {"reason": "junction", "subpath": nxt.index, "barrier": None})
                return self._q.copy()
        if self.phase is Phase.EXECUTING:
            sub = self.subpaths[self.current_subpath]
            self._q = sample_trajectory(sub.trajectory, self.exec_time)
        return self._q.copy()

    # -- monitor --------------------------------------------------------------

    def monitor_tick(self, snapshot: WorldSnapshot, robot_q: np.ndarray,
                     sim_time: float) -> list:
        """Decide replanning actions for one tick; mutates only status marks."""
        if self.phase not in (Phase.EXECUTING, Phase.STOPPED):
            return []
        actions: list = []
        cur = self.subpaths[self.current_subpath]

        if self.phase is Phase.STOPPED:
            actions.append(StopAndReplanCurrent())
        else:
            stale = cur.relaxed or cur.planned_against_version != snapshot.version
            if stale:
                rem = remaining_knots(cur.trajectory, self.exec_time)
                rep = path_valid(self.arm, rem, snapshot,
                                 self.monitor.d_safe, self.monitor.eps_q)
                if not rep.valid:
                    cur.status = SubPathStatus.INVALID
                    cur.invalidated_at_version = snapshot.version
                    actions.append(StopAndReplanCurrent(barrier=rep.offending_barrier))

        for sub in self.subpaths[self.current_subpath + 1:]:
            if sub.status is SubPathStatus.REPLANNING or sub.status is SubPathStatus.INVALID:
                actions.append(ReplanFuture(sub.index))
                continue
            if sub.status is not SubPathStatus.PLANNED:
                continue
            if not sub.relaxed and sub.planned_against_version == snapshot.version:
                continue
            rep = path_valid(self.arm, sub.trajectory.knots, snapshot,
                             self.monitor.d_safe, self.monitor.eps_q)
            if not rep.valid:
                sub.status = SubPathStatus.INVALID
                sub.invalidated_at_version = snapshot.version
                self._emit(sim_time, "subpath_invalidated",
                           {"subpath": sub.index, "barrier": rep.offending_barrier})
                actions.append(ReplanFuture(sub.index, barrier=rep.offending_barrier))
        return actions

    def apply_actions(self, actions: list, snapshot: WorldSnapshot, sim_time: float) -> None:
        for action in actions:
            if self.phase in (Phase.DONE, Phase.FAILED):
                return
            if isinstance(action, StopAndReplanCurrent):
                self._attempt_stop_replan(action, snapshot, sim_time)
            elif isinstance(action, ReplanFuture):
                self._attempt_future_replan(action.index, snapshot, sim_time)

    # -- replanning ------------------------------------------------------------

    def _attempt_stop_replan(self, action: StopAndReplanCurrent,
                             snapshot: WorldSnapshot, sim_time: float) -> None:
        sub = self.subpaths[self.current_subpath]
        if self.phase is Phase.EXECUTING:
            # halt exactly at the current sample; one stop event per episode
            self._q = sample_trajectory(sub.trajectory, self.exec_time)
            self.phase = Phase.STOPPED
            self._stop = _StopState()
            sub.status = SubPathStatus.REPLANNING
            self._emit(sim_time, "stop",
                       {"reason": "barrier", "subpath": sub.index, "barrier": action.barrier})
        halted = self._q.copy()
        recovery = not config_valid(self.arm, halted, snapshot, self.monitor.d_safe)
        try:
            traj = self._plan(halted, snapshot, goal_config=sub.goal_config, recovery=recovery)
        except PlanningError as exc:
            self._stop.retries += 1
            self._emit(sim_time, "replan_current_failed",
                       {"subpath": sub.index, "error": exc.code, "retries": self._stop.retries})
            if self._stop.retries >= self.max_stop_retries:
                self.phase = Phase.FAILED
                self.failure_reason = f"stop-replan retries exhausted on sub-path {sub.index}"
                self._emit(sim_time, "mission_failed", {"reason": self.failure_reason})
            return
        if sub.invalidated_at_version > snapshot.version:
            return  # stale result; a newer world change superseded this plan
        sub.trajectory = traj
        sub.start_config = halted
        sub.planned_against_version = snapshot.version
        sub.relaxed = recovery
        sub.status = SubPathStatus.EXECUTING
        self.exec_time = 0.0
        self.phase = Phase.EXECUTING
        self._emit(sim_time, "replan_current_succeeded",
                   {"subpath": sub.index, "recovery": recovery})

    def _attempt_future_replan(self, index: int, snapshot: WorldSnapshot,
                               sim_time: float) -> None:
        cur = self.current_subpath if self.current_subpath is not None else -1
        if index <= cur:
            return  # became current via a junction stop; handled by the stop path
        sub = self.subpaths[index]
        if sub.status not in (SubPathStatus.INVALID, SubPathStatus.REPLANNING):
            return
        sub.status = SubPathStatus.REPLANNING
        try:
            traj = self._plan(sub.start_config, snapshot, goal_config=sub.goal_config)
        except PlanningError as exc:
            self._emit(sim_time, "replan_future_failed",
                       {"subpath": sub.index, "error": exc.code})
            return
        if sub.invalidated_at_version > snapshot.version:
            return  # stale result
        sub.trajectory = traj
        sub.planned_against_version = snapshot.version
        sub.relaxed = False
        sub.status = SubPathStatus.PLANNED
        self._emit(sim_time, "replan_future_succeeded", {"subpath": sub.index})
