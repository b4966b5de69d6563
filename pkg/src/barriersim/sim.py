"""Fixed-step simulation loop tying the world, mission, and metrics together.

One step is: person update, executor advance, ground-truth audit, then the
monitor if a cadence boundary was crossed. Sim time is step_index * dt
(recomputed, never accumulated) so runs are bit-for-bit repeatable. Planning
happens inline and costs zero sim time; wall-clock budgets are disabled in
favor of iteration caps, which keeps results independent of host speed.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .arm import ArmDescription
from .barriers import BarrierRegistry, PersonState
from .collision import EMPTY_CLEARANCE, step_audit
from .errors import PlanningFailed
from .metrics import MetricsLog
from .mission import MissionController, Phase
from .scenario import ScenarioSpec

_TICK_SLOP = 1e-12


class Simulation:
    """Single-context simulation of one scenario."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.arm = ArmDescription.from_file(spec.arm_file)
        self.registry = BarrierRegistry(
            person_xy=spec.person.position_at(0.0),
            person_radius=spec.person.radius,
            person_height=spec.person.height,
        )
        for b in spec.barriers:
            self.registry.spawn_obstacle(b.shape, b.label)
        self.metrics = MetricsLog(spec.name, spec.planner_seed)
        home = spec.home_config if spec.home_config is not None else np.zeros(self.arm.dof)
        self.mission = MissionController(
            self.arm, spec.monitor, home,
            workspace_lo=spec.workspace_lo, workspace_hi=spec.workspace_hi,
            planner_config=spec.planner, planner_seed=spec.planner_seed,
            on_event=self.metrics.record,
        )
        self.sim_time = 0.0
        self.step_index = 0
        self._next_tick = 1
        self._contacts: set = set()
        self._min_clearance = EMPTY_CLEARANCE
        self._person_override: Optional[np.ndarray] = None  # interactive input

    # -- interactive hooks ---------------------------------------------------

    def set_person_position(self, xy) -> None:
        self._person_override = np.asarray(xy, dtype=float).reshape(2)

    # -- lifecycle -------------------------------------------------------------

    def start_mission(self) -> None:
        """Program the scenario waypoints, lock, and begin execution at t=0."""
        for pos, label in self.spec.waypoints:
            self.mission.add_waypoint(pos, label, sim_time=self.sim_time)
        self.mission.lock_path(self.registry.snapshot(self.sim_time), sim_time=self.sim_time)
        self.mission.execute(sim_time=self.sim_time)

    def step(self) -> None:
        self.step_index += 1
        self.sim_time = self.step_index * self.spec.dt

        if self._person_override is not None:
            target = self._person_override
        else:
            target = self.spec.person.position_at(self.sim_time)
        self.registry.update_person(PersonState([target[0], target[1], self.spec.person.height]))

        self.mission.advance(self.spec.dt, self.sim_time)

        snap = self.registry.snapshot(self.sim_time)
        self._audit(snap)

        tick_hz = self.spec.monitor.tick_hz
        while self.sim_time + _TICK_SLOP >= self._next_tick / tick_hz:
            actions = self.mission.monitor_tick(snap, self.mission.robot_config(), self.sim_time)
            self.mission.apply_actions(actions, snap, self.sim_time)
            self._next_tick += 1

    def _audit(self, snap) -> None:
        contacts, candidate = step_audit(self.arm, self.mission.robot_config(),
                                         snap.barriers, self._min_clearance)
        self._min_clearance = min(self._min_clearance, candidate)
        current = set(contacts)
        for bid in contacts:
            if bid not in self._contacts:
                self.metrics.ground_truth_collision_count += 1
                self.metrics.record(self.sim_time, "ground_truth_contact", {"barrier": bid})
        self._contacts = current

    def finished(self) -> bool:
        return (self.mission.phase in (Phase.DONE, Phase.FAILED)
                or self.sim_time >= self.spec.max_time)

    def finalize(self) -> MetricsLog:
        phase = self.mission.phase
        if phase is Phase.DONE:
            self.metrics.outcome = "done"
            done = [e for e in self.metrics.events if e["event"] == "mission_done"]
            self.metrics.completion_time = done[-1]["t"]
        elif phase is Phase.FAILED:
            self.metrics.outcome = "failed"
        else:
            self.metrics.outcome = "dnf"
        if self._min_clearance < EMPTY_CLEARANCE:
            self.metrics.min_clearance_over_run = self._min_clearance
        return self.metrics


def run_headless(spec: ScenarioSpec) -> MetricsLog:
    """Run a scenario start to finish; pure function of the spec."""
    sim = Simulation(spec)
    try:
        sim.start_mission()
    except PlanningFailed as exc:
        sim.metrics.record(0.0, "mission_failed",
                           {"reason": f"lock failed on sub-path {exc.index}", "error": exc.cause.code})
        sim.metrics.outcome = "failed"
        return sim.metrics
    while not sim.finished():
        sim.step()
    return sim.finalize()
