"""Joint-space planning: bidirectional RRT with connect heuristic, shortcut
smoothing, and velocity-limited time parameterization.

Distances and extension steps use the joint-space L-infinity norm. Edges are
checked at a resolution of eps_q * EDGE_EPS_FACTOR, one decade finer than the
monitor's validation resolution, so returned paths stay valid under finer
re-sampling. Endpoint configs are carried through untouched: the returned
knot sequence starts with the exact start array and ends with the exact goal
array, which is what makes chain continuity an equality rather than a
tolerance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arm import ArmDescription, IkOptions, capsule_points_batch, ik_candidates
from .collision import CancelToken, densify, segments_clear
from .errors import (
    EmptyPath,
    GoalInCollision,
    GoalUnreachable,
    PlanningTimeout,
    StartInvalid,
)

EDGE_EPS_FACTOR = 0.1
RECOVERY_RELAX = 0.5  # start-validity margin factor for stop-recovery requests


@dataclass
class PlannerConfig:
    step: float = 0.2              # L-inf extension step, rad
    max_iters: int = 20000
    shortcut_attempts: int = 100
    time_budget: float = 0.5       # wall-clock seconds; None disables
    min_segment_duration: float = 1e-3


@dataclass
class PlanRequest:
    """One sub-path planning problem against a fixed snapshot.

    Exactly one of goal_config / goal_position must be set. recovery marks a
    stop-recovery request whose start is allowed to sit inside the d_safe
    margin (but not in contact); validity for such plans is checked at
    d_safe * RECOVERY_RELAX instead.
    """

    start: np.ndarray
    snapshot: object
    d_safe: float
    eps_q: float
    goal_config: Optional[np.ndarray] = None
    goal_position: Optional[np.ndarray] = None
    rng_seed: int = 0
    recovery: bool = False
    time_budget: Optional[float] = None
    max_iters: Optional[int] = None


@dataclass
class JointPath:
    knots: list  # list of (dof,) arrays; endpoints are the request's arrays

    def arclength(self) -> float:
        return float(sum(np.linalg.norm(b - a) for a, b in zip(self.knots[:-1], self.knots[1:])))


@dataclass
class Trajectory:
    """Piecewise-linear joint trajectory; knot rows are exact path knots."""

    times: np.ndarray   # (K,), starts at 0, strictly increasing
    knots: np.ndarray   # (K, dof)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def end_config(self) -> np.ndarray:
        return self.knots[-1].copy()

    def start_config(self) -> np.ndarray:
        return self.knots[0].copy()


def sample_trajectory(traj: Trajectory, t: float) -> np.ndarray:
    """Config at time t, clamped to the trajectory's span; exact at knots."""
    times = traj.times
    if t <= times[0]:
        return traj.knots[0].copy()
    if t >= times[-1]:
        return traj.knots[-1].copy()
    i = int(np.searchsorted(times, t, side="right")) - 1
    u = (t - times[i]) / (times[i + 1] - times[i])
    if u <= 0.0:
        return traj.knots[i].copy()
    return traj.knots[i] + u * (traj.knots[i + 1] - traj.knots[i])


def remaining_knots(traj: Trajectory, t: float) -> np.ndarray:
    """Knot polyline from time t onward: interpolated config plus later knots."""
    if t >= traj.duration:
        return traj.knots[-1:].copy()
    q = sample_trajectory(traj, t)
    i = int(np.searchsorted(traj.times, t, side="right"))
    return np.concatenate([q[None, :], traj.knots[i:]], axis=0)


def time_parameterize(path: JointPath, arm: ArmDescription,
                      min_segment_duration: float = 1e-3) -> Trajectory:
    """Assign times so every joint respects its velocity limit per segment."""
    if len(path.knots) < 1:
        raise EmptyPath("cannot time-parameterize an empty path")
    knots = np.array(path.knots, dtype=float)
    if knots.shape[0] == 1:
        knots = np.concatenate([knots, knots], axis=0)
    times = np.zeros(knots.shape[0])
    for i in range(1, knots.shape[0]):
        dq = np.abs(knots[i] - knots[i - 1])
        dur = float(np.max(dq / arm.vel_max))
        times[i] = times[i - 1] + max(dur, min_segment_duration)
    return Trajectory(times, knots)


# -- internals ---------------------------------------------------------------


def _linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


class _Checker:
    """Edge/config validity against one snapshot at a fixed threshold."""

    def __init__(self, arm: ArmDescription, snapshot, threshold: float, edge_eps: float):
        self.arm = arm
        self.barriers = list(snapshot.barriers)
        self.threshold = threshold
        self.edge_eps = edge_eps

    def config_ok(self, q: np.ndarray) -> bool:
        p0, p1, radii = capsule_points_batch(self.arm, q[None, :])
        return segments_clear(p0, p1, radii, self.barriers, self.threshold)

    def edge_ok(self, a: np.ndarray, b: np.ndarray) -> bool:
        samples = densify(np.stack([a, b]), self.edge_eps)
        p0, p1, radii = capsule_points_batch(self.arm, samples)
        return segments_clear(p0, p1, radii, self.barriers, self.threshold)


def _steer(a: np.ndarray, b: np.ndarray, step: float) -> np.ndarray:
    d = _linf(a, b)
    if d <= step:
        return b
    return a + (b - a) * (step / d)


class _Tree:
    def __init__(self, root: np.ndarray, dof: int):
        self.nodes = np.empty((64, dof))
        self.nodes[0] = root
        self.count = 1
        self.parents = [-1]
        self.exact = {0: root}  # node index -> exact array where it matters

    def add(self, q: np.ndarray, parent: int, exact: Optional[np.ndarray] = None) -> int:
        if self.count == self.nodes.shape[0]:
            self.nodes = np.concatenate([self.nodes, np.empty_like(self.nodes)], axis=0)
        self.nodes[self.count] = q
        self.parents.append(parent)
        if exact is not None:
            self.exact[self.count] = exact
        self.count += 1
        return self.count - 1

    def nearest(self, q: np.ndarray) -> int:
        d = np.max(np.abs(self.nodes[: self.count] - q), axis=1)
        return int(np.argmin(d))

    def config(self, i: int) -> np.ndarray:
        return self.exact.get(i, self.nodes[i])

    def chain(self, i: int) -> list:
        out = []
        while i >= 0:
            out.append(self.config(i))
            i = self.parents[i]
        out.reverse()
        return out


def _resolve_goal(req: PlanRequest, arm: ArmDescription, checker: _Checker,
                  deadline: Optional[float]) -> np.ndarray:
    if req.goal_config is not None:
        goal = arm.check_config(req.goal_config)
        if not arm.within_limits(goal):
            raise GoalUnreachable("goal config violates joint limits")
        if not checker.config_ok(goal):
            raise GoalInCollision("goal config too close to a barrier")
        return goal
    if req.goal_position is None:
        raise GoalUnreachable("request has neither goal_config nor goal_position")
    opts = IkOptions(rng_seed=req.rng_seed)
    converged = False
    for cand in ik_candidates(arm, req.goal_position, req.start, opts):
        converged = True
        if checker.config_ok(cand):
            return cand
        if deadline is not None and time.monotonic() > deadline:
            raise PlanningTimeout("goal resolution exceeded the time budget")
    if converged:
        raise GoalInCollision("every reachable goal config is too close to a barrier")
    raise GoalUnreachable(f"IK found no config for target {np.asarray(req.goal_position).tolist()}")


def plan_subpath(req: PlanRequest, arm: ArmDescription,
                 config: Optional[PlannerConfig] = None,
                 cancel: Optional[CancelToken] = None) -> JointPath:
    """Plan one collision-free sub-path for the request's snapshot.

    Deterministic for a fixed request (including rng_seed). Raises
    StartInvalid / GoalUnreachable / GoalInCollision / PlanningTimeout.
    """
    cfg = config or PlannerConfig()
    start = arm.check_config(req.start)
    threshold = req.d_safe * (RECOVERY_RELAX if req.recovery else 1.0)
    edge_eps = req.eps_q * EDGE_EPS_FACTOR
    checker = _Checker(arm, req.snapshot, threshold, edge_eps)
    budget = req.time_budget if req.time_budget is not None else cfg.time_budget
    deadline = time.monotonic() + budget if budget is not None else None
    max_iters = req.max_iters if req.max_iters is not None else cfg.max_iters

    if not checker.config_ok(start):
        raise StartInvalid("start config too close to a barrier")
    goal = _resolve_goal(req, arm, checker, deadline)

    if checker.edge_ok(start, goal):
        return JointPath([start, goal])

    rng = np.random.default_rng(req.rng_seed)
    tree_a = _Tree(start, arm.dof)
    tree_b = _Tree(goal, arm.dof)
    a_is_start = True

    for it in range(max_iters):
        if cancel is not None and it % 64 == 0:
            cancel.raise_if_cancelled()
        if deadline is not None and it % 64 == 0 and time.monotonic() > deadline:
            raise PlanningTimeout(f"no path within the {budget:.3f} s budget")

        q_rand = arm.random_config(rng)
        ni = tree_a.nearest(q_rand)
        q_new = _steer(tree_a.nodes[ni], q_rand, cfg.step)
        if checker.edge_ok(tree_a.nodes[ni], q_new):
            na = tree_a.add(q_new, ni)
            # connect: greedily extend the other tree toward q_new
            nb = tree_b.nearest(q_new)
            while True:
                q_next = _steer(tree_b.nodes[nb], q_new, cfg.step)
                if not checker.edge_ok(tree_b.nodes[nb], q_next):
                    break
                nb = tree_b.add(q_next, nb)
                if _linf(q_next, q_new) == 0.0:
                    chain_a = tree_a.chain(na)
                    chain_b = tree_b.chain(nb)
                    chain_b.reverse()
                    knots = chain_a + chain_b[1:]
                    if not a_is_start:
                        knots.reverse()
                    return JointPath(knots)
        tree_a, tree_b = tree_b, tree_a
        a_is_start = not a_is_start

    raise PlanningTimeout(f"no path within {max_iters} iterations")


def shortcut(path: JointPath, arm: ArmDescription, snapshot, d_safe: float, eps_q: float,
             attempts: int = 100, rng_seed: int = 0,
             cancel: Optional[CancelToken] = None) -> JointPath:
    """Random shortcut smoothing; endpoints and validity are preserved.

    Replacement edges are checked at the planner's edge resolution. Joint-space
    arclength never increases (triangle inequality per replacement).
    """
    knots = list(path.knots)
    rng = np.random.default_rng(rng_seed)
    checker = _Checker(arm, snapshot, d_safe, eps_q * EDGE_EPS_FACTOR)
    for _ in range(attempts):
        if len(knots) <= 2:
            break
        if cancel is not None:
            cancel.raise_if_cancelled()
        i = int(rng.integers(0, len(knots) - 2))
        j = int(rng.integers(i + 2, len(knots)))
        if checker.edge_ok(knots[i], knots[j]):
            knots = knots[: i + 1] + knots[j:]
    return JointPath(knots)


def plan_trajectory(req: PlanRequest, arm: ArmDescription,
                    config: Optional[PlannerConfig] = None,
                    cancel: Optional[CancelToken] = None) -> Trajectory:
    """plan_subpath + shortcut + time_parameterize in one call."""
    cfg = config or PlannerConfig()
    raw = plan_subpath(req, arm, cfg, cancel)
    threshold = req.d_safe * (RECOVERY_RELAX if req.recovery else 1.0)
    smooth = shortcut(raw, arm, req.snapshot, threshold, req.eps_q,
                      attempts=cfg.shortcut_attempts, rng_seed=req.rng_seed, cancel=cancel)
    return time_parameterize(smooth, arm, cfg.min_segment_duration)
