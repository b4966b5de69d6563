"""Release gate: one test per acceptance criterion, each printing a PASS line.

These are the load-bearing end-to-end checks: geometry against an
independent dense-sampling oracle, kinematics against finite differences,
planner success on randomized blocked scenes, monitor reaction latency,
the two bundled scenarios, junction continuity, and byte-level determinism
of the CLI. Budgets are wall-clock ceilings, generous on purpose.
"""
import json
import time

import numpy as np
import pytest

import oracles
from conftest import data_path
from barriersim.arm import ArmDescription, ee_position, jacobian_position, solve_ik
from barriersim.barriers import Barrier, WorldSnapshot
from barriersim.collision import config_valid, distance_capsule_shape, path_valid
from barriersim.gateway import cli
from barriersim.geometry import Pose, quat_from_axis_angle, quat_to_mat
from barriersim.mission import MonitorConfig
from barriersim.planner import PlanRequest, PlannerConfig, plan_subpath
from barriersim.scenario import load_scenario
from barriersim.shapes import CapsuleShape, OrientedBox, Sphere, VerticalCylinder
from barriersim.sim import Simulation, run_headless

D_SAFE = MonitorConfig().d_safe
EPS_Q = MonitorConfig().eps_q


# -- geometry ------------------------------------------------------------------


def _random_capsule(rng):
    p0 = rng.uniform(-2.0, 2.0, 3)
    return CapsuleShape(p0, p0 + rng.uniform(-1.5, 1.5, 3),
                        float(rng.uniform(0.02, 0.3)))


def _random_case(rng, kind):
    c = _random_capsule(rng)
    if kind == "sphere":
        s = Sphere(rng.uniform(-2, 2, 3), float(rng.uniform(0.05, 1.0)))
        fn = lambda p: oracles.signed_point_sphere(p, s.center, s.radius)
        return c, s, fn
    if kind == "cylinder":
        cyl = VerticalCylinder(rng.uniform(-2, 2, 2), float(rng.uniform(-1, 0.5)),
                               float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.05, 1.0)))
        fn = lambda p: oracles.signed_point_cylinder(p, cyl.center_xy, cyl.z0,
                                                     cyl.height, cyl.radius)
        return c, cyl, fn
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    q = quat_from_axis_angle(axis, float(rng.uniform(0, np.pi)))
    b = OrientedBox(Pose(rng.uniform(-2, 2, 3), q), rng.uniform(0.05, 0.8, 3))
    fn = lambda p: oracles.signed_point_box(p, quat_to_mat(b.pose.orientation),
                                            b.pose.position, b.half_extents)
    return c, b, fn


def test_geometry_oracle_suite():
    t0 = time.monotonic()
    rng = np.random.default_rng(11)
    n_per = 1000
    worst = 0.0
    for kind in ("sphere", "cylinder", "box"):
        for _ in range(n_per):
            c, shape, fn = _random_case(rng, kind)
            ours = distance_capsule_shape(c, shape)
            ref = oracles.sampled_capsule_distance(c.p0, c.p1, c.radius, fn)
            assert (ours >= 0) == (ref >= 0), \
                f"{kind} sign mismatch: ours={ours:.6g} oracle={ref:.6g}"
            if ours > 0:
                err = abs(ours - ref)
                worst = max(worst, err)
                assert err <= 1e-3, f"{kind} distance error {err:.2e}"
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0, f"geometry suite took {elapsed:.1f}s"
    print(f"PASS geometry oracle: {3 * n_per} pairs, 100% sign agreement, "
          f"worst separated error {worst:.2e} m, {elapsed:.1f}s")


# -- kinematics ------------------------------------------------------------------


def test_kinematics_suite(cobot_arm, planar_arm):
    t0 = time.monotonic()
    rng = np.random.default_rng(12)

    h = 1e-6
    worst_jac = 0.0
    for _ in range(100):
        q = cobot_arm.random_config(rng)
        jac = jacobian_position(cobot_arm, q)
        fd = np.empty_like(jac)
        for j in range(cobot_arm.dof):
            dq = np.zeros(cobot_arm.dof)
            dq[j] = h
            fd[:, j] = (ee_position(cobot_arm, q + dq)
                        - ee_position(cobot_arm, q - dq)) / (2 * h)
        worst_jac = max(worst_jac, float(np.max(np.abs(jac - fd))))
    assert worst_jac <= 1e-5, f"jacobian error {worst_jac:.2e}"

    home = np.zeros(cobot_arm.dof)
    worst_ik = 0.0
    for _ in range(100):
        target = ee_position(cobot_arm, cobot_arm.random_config(rng))
        sol = solve_ik(cobot_arm, target, home)
        worst_ik = max(worst_ik, float(np.linalg.norm(ee_position(cobot_arm, sol) - target)))
    assert worst_ik <= 1e-4, f"IK round-trip error {worst_ik:.2e}"

    for a, b in ((0.0, 0.0), (np.pi / 2, 0.0), (np.pi / 4, -np.pi / 2), (1.1, 0.7)):
        expected = np.array([np.cos(a) + np.cos(a + b),
                             np.sin(a) + np.sin(a + b), 0.0])
        got = ee_position(planar_arm, [a, b])
        assert np.max(np.abs(got - expected)) <= 1e-12

    elapsed = time.monotonic() - t0
    assert elapsed < 10.0, f"kinematics suite took {elapsed:.1f}s"
    print(f"PASS kinematics: jacobian worst {worst_jac:.2e} (<=1e-5), "
          f"IK worst {worst_ik:.2e} m (<=1e-4), planar FK exact, {elapsed:.1f}s")


# -- planner ------------------------------------------------------------------


def _blocked_scene(arm, rng):
    """Two clear configs whose straight joint interpolation hits a sphere.

    A random sphere can genuinely disconnect the free space (it cages one
    endpoint against the joint limits), so feasibility is certified by
    exhibiting a witness detour that clears the sphere at full margin. The
    planner never sees the witness.
    """
    while True:
        q0 = arm.random_config(rng)
        q1 = arm.random_config(rng)
        center = ee_position(arm, 0.5 * (q0 + q1))
        if np.linalg.norm(center) < 0.3:
            continue  # too tangled with the base column
        radius = float(rng.uniform(0.12, 0.3))
        snap = WorldSnapshot(0, (Barrier("obs-1", "obstacle", Sphere(center, radius)),))
        if not config_valid(arm, q0, snap, D_SAFE):
            continue
        if not config_valid(arm, q1, snap, D_SAFE):
            continue
        if path_valid(arm, np.stack([q0, q1]), snap, D_SAFE, EPS_Q).valid:
            continue  # not actually blocked
        for _ in range(20):
            qd = arm.random_config(rng)
            if path_valid(arm, np.stack([q0, qd, q1]), snap, D_SAFE, EPS_Q / 10).valid:
                return q0, q1, snap
        # no witness found: likely infeasible, discard the scene


def test_planner_validity_suite(cobot_arm):
    t0 = time.monotonic()
    rng = np.random.default_rng(13)
    n_scenes = 50
    solved = 0
    checked = 0
    for i in range(n_scenes):
        q0, q1, snap = _blocked_scene(cobot_arm, rng)
        req = PlanRequest(start=q0, snapshot=snap, d_safe=D_SAFE, eps_q=EPS_Q,
                          goal_config=q1, rng_seed=1000 + i, time_budget=2.0)
        try:
            path = plan_subpath(req, cobot_arm, PlannerConfig())
        except Exception:
            continue
        solved += 1
        report = path_valid(cobot_arm, path.knots, snap, D_SAFE, EPS_Q / 10)
        assert report.valid, f"scene {i}: returned path fails validation"
        checked += 1
    rate = solved / n_scenes
    assert rate >= 0.95, f"planner solved only {solved}/{n_scenes} blocked scenes"
    elapsed = time.monotonic() - t0
    assert elapsed < 180.0, f"planner suite took {elapsed:.1f}s"
    print(f"PASS planner validity: {solved}/{n_scenes} solved ({rate:.0%}), "
          f"{checked}/{solved} pass path_valid at eps_q/10, {elapsed:.1f}s")


# -- monitor latency ------------------------------------------------------------


def _planar_spec(tmp_path, **overrides):
    doc = {
        "name": "accept_planar",
        "arm_file": "planar_2link.json",
        "home_config": [0, 0],
        "waypoints": [{"position": [0.0, 2.0, 0.0], "label": "A"}],
        "person": {"start": [5.0, 5.0]},
        "sim": {"dt": 0.02, "max_time": 60.0},
        "seeds": {"planner": 5},
    }
    doc.update(overrides)
    p = tmp_path / "accept.json"
    p.write_text(json.dumps(doc))
    spec, warnings = load_scenario(p)
    assert warnings == []
    return spec


def test_monitor_latency_one_tick(tmp_path):
    spec = _planar_spec(tmp_path)
    sim = Simulation(spec)
    sim.start_mission()
    # slow the arc down so the robot is still mid-path when the barrier lands
    traj = sim.mission.subpaths[0].trajectory
    traj.times = traj.times * 40.0

    t_spawn = 2.0
    tick = 1.0 / spec.monitor.tick_hz
    # first monitor boundary after the teleport, quantized to the step grid
    boundary = np.ceil((np.ceil(t_spawn / tick) * tick) / spec.dt) * spec.dt
    while not sim.finished():
        if sim.sim_time + spec.dt >= t_spawn - 1e-12 and sim.sim_time < t_spawn:
            sim.set_person_position([1.0, np.sqrt(3.0)])  # onto the remaining arc
        sim.step()
        stops = [e for e in sim.metrics.events if e["event"] == "stop"]
        if stops:
            break
        assert sim.sim_time < 6.0, "no stop recorded"
    stop = stops[0]
    latency = stop["t"] - t_spawn
    assert stop["t"] == pytest.approx(boundary, abs=1e-9)
    assert latency <= 1.0 / 0.75 + spec.dt + 1e-9
    assert stop["detail"]["barrier"] == "person"
    print(f"PASS monitor latency: barrier at t={t_spawn:.2f}s, stop at "
          f"t={stop['t']:.2f}s (boundary {boundary:.4f}s), latency {latency:.3f}s <= 1.334s")


# -- bundled scenarios -----------------------------------------------------------


def test_person_crossing_scenario():
    spec, _ = load_scenario(data_path("scenario_crossing.json"))
    metrics = run_headless(spec)
    assert metrics.outcome == "done"
    assert metrics.completion_time < 120.0
    assert metrics.waypoints_completed == 8
    assert metrics.ground_truth_collision_count == 0
    assert metrics.stop_count >= 1
    print(f"PASS person crossing: done at t={metrics.completion_time:.2f}s, "
          f"{metrics.stop_count} stops, 0 ground-truth contacts, "
          f"min clearance {metrics.min_clearance_over_run:.3f} m")


def test_replan_ahead_scenario(tmp_path):
    spec = _planar_spec(
        tmp_path,
        waypoints=[{"position": [0.0, 2.0, 0.0], "label": "A"},
                   {"position": [-2.0, 0.0, 0.0], "label": "B"}])
    sim = Simulation(spec)
    sim.start_mission()
    spawned = False
    while not sim.finished():
        sim.step()
        if not spawned and sim.sim_time >= 0.2:
            # block only the second leg of the arc, ahead of the robot
            ang = np.deg2rad(135.0)
            sim.registry.spawn_obstacle(
                Sphere([2.0 * np.cos(ang), 2.0 * np.sin(ang), 0.0], 0.3))
            spawned = True
    metrics = sim.finalize()
    assert metrics.outcome == "done"
    assert metrics.stop_count == 0
    assert metrics.replan_count_future >= 1
    assert metrics.ground_truth_collision_count == 0
    print(f"PASS replan ahead: done at t={metrics.completion_time:.2f}s with "
          f"{metrics.replan_count_future} future replans, 0 stops, 0 contacts")


# -- chain continuity -------------------------------------------------------------


def _run_with_continuity_checks(spec):
    sim = Simulation(spec)
    sim.start_mission()
    seen = 0
    junctions = 0
    resumes = 0
    halted = {}
    while not sim.finished():
        sim.step()
        for e in sim.metrics.events[seen:]:
            name, detail = e["event"], e["detail"]
            if name == "stop":
                halted[detail["subpath"]] = sim.mission.robot_config()
            elif name == "replan_current_succeeded":
                s = detail["subpath"]
                sub = sim.mission.subpaths[s]
                assert np.array_equal(sub.start_config, halted[s])
                assert np.array_equal(sub.trajectory.knots[0], halted[s])
                resumes += 1
            elif name == "subpath_completed":
                i = detail["subpath"]
                subs = sim.mission.subpaths
                assert np.array_equal(subs[i].trajectory.knots[-1], subs[i].goal_config)
                if i + 1 < len(subs):
                    assert np.array_equal(subs[i + 1].start_config, subs[i].goal_config)
                    junctions += 1
        seen = len(sim.metrics.events)
    for sub in sim.mission.subpaths:
        assert np.array_equal(sub.trajectory.knots[0], sub.start_config)
        assert np.array_equal(sub.trajectory.knots[-1], sub.goal_config)
    return sim.finalize(), junctions, resumes


def test_chain_continuity_exact():
    total_j = total_r = 0
    for name in ("scenario_paper_table.json", "scenario_crossing.json"):
        spec, _ = load_scenario(data_path(name))
        metrics, junctions, resumes = _run_with_continuity_checks(spec)
        assert metrics.outcome == "done"
        total_j += junctions
        total_r += resumes
    assert total_j >= 10  # both scenarios have 8 sub-paths
    assert total_r >= 1  # the crossing run stops and resumes
    print(f"PASS chain continuity: {total_j} junctions and {total_r} "
          f"stop-resumes bitwise-exact across both bundled scenarios")


# -- determinism -------------------------------------------------------------------


def test_cli_determinism_all_bundled(tmp_path):
    for name in ("scenario_paper_table.json", "scenario_crossing.json"):
        blobs = []
        for i in range(2):
            out = tmp_path / f"{name}.{i}.metrics.json"
            code = cli.main(["run", "--scenario", data_path(name),
                             "--metrics", str(out)])
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1], f"{name}: metrics differ between runs"
    print("PASS determinism: repeated cli runs byte-identical for both "
          "bundled scenarios")


# -- bundled mission ------------------------------------------------------------


def test_paper_table_scenario_completes():
    spec, _ = load_scenario(data_path("scenario_paper_table.json"))
    metrics = run_headless(spec)
    assert metrics.outcome == "done"
    assert metrics.completion_time < 300.0
    assert metrics.waypoints_completed == 8
    assert metrics.ground_truth_collision_count == 0
    print(f"PASS bundled mission: 8 labeled waypoints done at "
          f"t={metrics.completion_time:.2f}s, 0 ground-truth contacts")
