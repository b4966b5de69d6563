"""Planner behavior: correctness of results, failure taxonomy, determinism."""
import numpy as np
import pytest

from barriersim.barriers import Barrier, WorldSnapshot
from barriersim.collision import CancelToken, path_valid
from barriersim.errors import (
    Cancelled,
    GoalInCollision,
    GoalUnreachable,
    PlanningTimeout,
    StartInvalid,
)
from barriersim.planner import (
    JointPath,
    PlannerConfig,
    PlanRequest,
    Trajectory,
    plan_subpath,
    plan_trajectory,
    remaining_knots,
    sample_trajectory,
    shortcut,
    time_parameterize,
)
from barriersim.shapes import Sphere

D_SAFE = 0.05
EPS_Q = 0.05


def _snap(*barriers):
    return WorldSnapshot(0, tuple(Barrier(f"obs-{i+1}", "obstacle", s) for i, s in enumerate(barriers)), 0.0)


def _req(start, goal, snap=None, **kw):
    return PlanRequest(
        start=np.asarray(start, dtype=float),
        snapshot=snap if snap is not None else _snap(),
        d_safe=D_SAFE,
        eps_q=EPS_Q,
        goal_config=np.asarray(goal, dtype=float) if goal is not None else None,
        **kw,
    )


def test_unobstructed_plan_is_direct(planar_arm):
    start = np.array([0.0, 0.0])
    goal = np.array([np.pi / 2, 0.0])
    path = plan_subpath(_req(start, goal), planar_arm)
    assert len(path.knots) == 2
    assert path.knots[0] is not start  # defensive copy from check_config
    np.testing.assert_array_equal(path.knots[0], start)
    np.testing.assert_array_equal(path.knots[-1], goal)


def test_blocked_edge_routes_around(planar_arm):
    # sphere sits on the radius-2 arc midway through the sweep
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    snap = _snap(blocker)
    start = np.array([0.0, 0.0])
    goal = np.array([np.pi / 2, 0.0])
    path = plan_subpath(_req(start, goal, snap), planar_arm)
    assert len(path.knots) > 2
    np.testing.assert_array_equal(path.knots[0], start)
    np.testing.assert_array_equal(path.knots[-1], goal)
    rep = path_valid(planar_arm, np.array(path.knots), snap, D_SAFE, EPS_Q / 10)
    assert rep.valid, f"min clearance {rep.min_clearance}"


def test_start_invalid(planar_arm):
    snap = _snap(Sphere([2.0, 0.0, 0.0], 0.3))
    with pytest.raises(StartInvalid):
        plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], snap), planar_arm)


def test_goal_config_in_collision(planar_arm):
    snap = _snap(Sphere([0.0, 2.0, 0.0], 0.3))
    with pytest.raises(GoalInCollision):
        plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], snap), planar_arm)


def test_goal_config_outside_limits(planar_arm):
    with pytest.raises(GoalUnreachable):
        plan_subpath(_req([0.0, 0.0], [5.0, 0.0]), planar_arm)


def test_goal_position_via_ik(planar_arm):
    from barriersim.arm import ee_position

    req = PlanRequest(start=np.zeros(2), snapshot=_snap(), d_safe=D_SAFE, eps_q=EPS_Q,
                      goal_position=np.array([0.0, 2.0, 0.0]))
    path = plan_subpath(req, planar_arm)
    assert np.linalg.norm(ee_position(planar_arm, path.knots[-1]) - [0.0, 2.0, 0.0]) <= 1e-4


def test_goal_position_unreachable(planar_arm):
    req = PlanRequest(start=np.zeros(2), snapshot=_snap(), d_safe=D_SAFE, eps_q=EPS_Q,
                      goal_position=np.array([3.0, 0.0, 0.0]))
    with pytest.raises(GoalUnreachable):
        plan_subpath(req, planar_arm)


def test_goal_position_surrounded(planar_arm):
    # target reachable by IK but fenced in by a barrier
    snap = _snap(Sphere([0.0, 2.0, 0.0], 0.3))
    req = PlanRequest(start=np.zeros(2), snapshot=snap, d_safe=D_SAFE, eps_q=EPS_Q,
                      goal_position=np.array([0.0, 2.0, 0.0]))
    with pytest.raises(GoalInCollision):
        plan_subpath(req, planar_arm)


def test_iteration_cap_raises_timeout(planar_arm):
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    req = _req([0.0, 0.0], [np.pi / 2, 0.0], _snap(blocker), max_iters=1, time_budget=None)
    with pytest.raises(PlanningTimeout):
        plan_subpath(req, planar_arm, PlannerConfig(time_budget=None))


def test_cancellation(planar_arm):
    token = CancelToken()
    token.cancel()
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    with pytest.raises(Cancelled):
        plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], _snap(blocker)), planar_arm, cancel=token)


def test_recovery_relaxes_start_margin(planar_arm):
    # park a sphere so the start clearance sits between d_safe/2 and d_safe
    from barriersim.collision import min_clearance

    snap = _snap(Sphere([2.0, 0.53, 0.0], 0.45))
    start = np.array([0.0, 0.0])
    val, _ = min_clearance(planar_arm, start, snap.barriers and snap)
    assert D_SAFE / 2 < val < D_SAFE
    with pytest.raises(StartInvalid):
        plan_subpath(_req(start, [np.pi, 0.0], snap), planar_arm)
    path = plan_subpath(_req(start, [np.pi, 0.0], snap, recovery=True), planar_arm)
    np.testing.assert_array_equal(path.knots[0], start)


def test_determinism(planar_arm):
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    snap = _snap(blocker)
    a = plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], snap, rng_seed=42), planar_arm)
    b = plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], snap, rng_seed=42), planar_arm)
    assert len(a.knots) == len(b.knots)
    for ka, kb in zip(a.knots, b.knots):
        np.testing.assert_array_equal(ka, kb)


def test_shortcut_never_lengthens(planar_arm):
    rng = np.random.default_rng(3)
    knots = [np.zeros(2)]
    for _ in range(8):
        knots.append(knots[-1] + rng.uniform(-0.4, 0.4, 2))
    path = JointPath(knots)
    short = shortcut(path, planar_arm, _snap(), D_SAFE, EPS_Q, rng_seed=11)
    assert short.arclength() <= path.arclength() + 1e-12
    np.testing.assert_array_equal(short.knots[0], path.knots[0])
    np.testing.assert_array_equal(short.knots[-1], path.knots[-1])


def test_shortcut_keeps_clearing_barriers(planar_arm):
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    snap = _snap(blocker)
    raw = plan_subpath(_req([0.0, 0.0], [np.pi / 2, 0.0], snap), planar_arm)
    short = shortcut(raw, planar_arm, snap, D_SAFE, EPS_Q, rng_seed=5)
    rep = path_valid(planar_arm, np.array(short.knots), snap, D_SAFE, EPS_Q / 10)
    assert rep.valid


def test_time_parameterization_velocity_limit(planar_arm):
    path = JointPath([np.array([0.0, 0.0]), np.array([1.0, 0.0])])
    traj = time_parameterize(path, planar_arm)
    assert traj.duration == pytest.approx(1.0, abs=1e-12)  # vel_max 1.0 rad/s
    path2 = JointPath([np.array([0.0, 0.0]), np.array([0.5, -1.5])])
    traj2 = time_parameterize(path2, planar_arm)
    assert traj2.duration == pytest.approx(1.5, abs=1e-12)


def test_time_parameterization_single_knot(planar_arm):
    traj = time_parameterize(JointPath([np.zeros(2)]), planar_arm)
    assert traj.duration == pytest.approx(1e-3)
    np.testing.assert_array_equal(sample_trajectory(traj, 0.0), np.zeros(2))


def test_sample_trajectory_exact_at_knots():
    times = np.array([0.0, 1.0, 2.5])
    knots = np.array([[0.0, 0.0], [1.0, -1.0], [0.3, 0.7]])
    traj = Trajectory(times, knots)
    for t, k in zip(times, knots):
        np.testing.assert_array_equal(sample_trajectory(traj, t), k)
    np.testing.assert_allclose(sample_trajectory(traj, 0.5), [0.5, -0.5], atol=1e-15)
    np.testing.assert_array_equal(sample_trajectory(traj, -1.0), knots[0])
    np.testing.assert_array_equal(sample_trajectory(traj, 99.0), knots[-1])


def test_remaining_knots_mid_segment():
    times = np.array([0.0, 1.0, 2.0])
    knots = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    traj = Trajectory(times, knots)
    rem = remaining_knots(traj, 0.5)
    np.testing.assert_allclose(rem[0], [0.5, 0.0], atol=1e-15)
    np.testing.assert_array_equal(rem[1:], knots[1:])
    end = remaining_knots(traj, 5.0)
    np.testing.assert_array_equal(end, knots[-1:])


def test_plan_trajectory_roundtrip(planar_arm):
    blocker = Sphere([2 * np.cos(np.pi / 4), 2 * np.sin(np.pi / 4), 0.0], 0.3)
    snap = _snap(blocker)
    start = np.array([0.0, 0.0])
    goal = np.array([np.pi / 2, 0.0])
    traj = plan_trajectory(_req(start, goal, snap), planar_arm)
    np.testing.assert_array_equal(traj.start_config(), start)
    np.testing.assert_array_equal(traj.end_config(), goal)
    assert traj.duration > 0
    rep = path_valid(planar_arm, traj.knots, snap, D_SAFE, EPS_Q / 10)
    assert rep.valid
