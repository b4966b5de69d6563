"""Serial revolute-joint arm: description loading, FK, Jacobian, damped IK.

Conventions
-----------
Frame j is the pose of joint j's child link after the joint rotation has been
applied, so link j's capsules are fixed in frame j. The chain is

    T_j = T_{j-1} @ A_j @ R(axis_j, q_j)

with A_j the fixed parent-to-joint transform from the description file and
T_{-1} = I (base frame = world). The end effector hangs off the last frame by
one more fixed transform.

All angles in radians, lengths in meters. Configurations are 1-D float64
arrays of length ``arm.dof``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ArmFileMissing, DimensionMismatch, Unreachable
from .geometry import Pose, make_transform, mat_to_quat, rpy_to_mat
from .shapes import CapsuleShape

AXIS_NORM_TOL = 1e-9


@dataclass(frozen=True)
class JointSpec:
    """One revolute joint: fixed mount transform, rotation axis, limits."""

    origin_xyz: tuple
    origin_rpy: tuple
    axis: tuple
    limit_lo: float
    limit_hi: float
    vel_max: float

    def validate(self, index: int) -> None:
        axis = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > AXIS_NORM_TOL:
            raise ValueError(f"joint {index}: axis must be unit length")
        if not self.limit_lo < self.limit_hi:
            raise ValueError(f"joint {index}: limit_lo must be below limit_hi")
        if not self.vel_max > 0:
            raise ValueError(f"joint {index}: vel_max must be positive")


class ArmDescription:
    """Validated arm model with cached numeric arrays for the hot paths."""

    def __init__(self, name: str, joints: Sequence[JointSpec],
                 link_capsules: Sequence[Sequence[CapsuleShape]], ee_offset: np.ndarray):
        if len(joints) < 1:
            raise ValueError("arm needs at least one joint")
        if len(link_capsules) != len(joints):
            raise ValueError("need one capsule list per link")
        for i, j in enumerate(joints):
            j.validate(i)
        for caps in link_capsules:
            for c in caps:
                if not c.radius > 0:
                    raise ValueError("capsule radius must be positive")
        self.name = name
        self.joints = tuple(joints)
        self.link_capsules = tuple(tuple(c for c in caps) for caps in link_capsules)
        self.ee_offset = np.asarray(ee_offset, dtype=float).reshape(4, 4)

        self.dof = len(joints)
        self.limits_lo = np.array([j.limit_lo for j in joints])
        self.limits_hi = np.array([j.limit_hi for j in joints])
        self.vel_max = np.array([j.vel_max for j in joints])
        self.axes = np.array([j.axis for j in joints], dtype=float)
        # fixed transforms A_j, stacked (dof, 4, 4)
        self.fixed = np.stack(
            [make_transform(rpy_to_mat(j.origin_rpy), j.origin_xyz) for j in joints]
        )
        # local capsule endpoints flattened over links for batch transforms
        owner, p0s, p1s, radii = [], [], [], []
        for li, caps in enumerate(self.link_capsules):
            for c in caps:
                owner.append(li)
                p0s.append(c.p0)
                p1s.append(c.p1)
                radii.append(c.radius)
        self.capsule_owner = np.array(owner, dtype=int)
        self.capsule_p0_local = np.array(p0s, dtype=float)
        self.capsule_p1_local = np.array(p1s, dtype=float)
        self.capsule_radii = np.array(radii, dtype=float)
        self.n_capsules = len(owner)

    # -- loading ---------------------------------------------------------

    @staticmethod
    def from_dict(data: dict) -> "ArmDescription":
        joints = [
            JointSpec(
                origin_xyz=tuple(j["origin_xyz"]),
                origin_rpy=tuple(j.get("origin_rpy", (0.0, 0.0, 0.0))),
                axis=tuple(j["axis"]),
                limit_lo=float(j["limit_lo"]),
                limit_hi=float(j["limit_hi"]),
                vel_max=float(j["vel_max"]),
            )
            for j in data["joints"]
        ]
        caps = [
            [CapsuleShape(np.asarray(c["p0"], dtype=float), np.asarray(c["p1"], dtype=float), float(c["radius"])) for c in link]
            for link in data["link_capsules"]
        ]
        ee = data.get("ee_offset", {"xyz": (0, 0, 0), "rpy": (0, 0, 0)})
        ee_mat = make_transform(rpy_to_mat(ee.get("rpy", (0, 0, 0))), ee.get("xyz", (0, 0, 0)))
        return ArmDescription(data.get("name", "arm"), joints, caps, ee_mat)

    @staticmethod
    def from_file(path: str) -> "ArmDescription":
        if not os.path.exists(path):
            raise ArmFileMissing(path)
        with open(path) as fh:
            return ArmDescription.from_dict(json.load(fh))

    def check_config(self, q: np.ndarray) -> np.ndarray:
        q = np.array(q, dtype=float)  # always copies; stored paths must not alias caller arrays
        if q.shape != (self.dof,):
            raise DimensionMismatch(f"expected config of shape ({self.dof},), got {q.shape}")
        return q

    def clamp(self, q: np.ndarray) -> np.ndarray:
        return np.clip(q, self.limits_lo, self.limits_hi)

    def within_limits(self, q: np.ndarray) -> bool:
        return bool(np.all(q >= self.limits_lo) and np.all(q <= self.limits_hi))

    def random_config(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.limits_lo, self.limits_hi)


# -- forward kinematics ----------------------------------------------------


def _axis_rotations(axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rodrigues rotation matrices, batched: axes (J,3), angles (N,J) -> (N,J,3,3)."""
    n, j = angles.shape
    c = np.cos(angles)[..., None, None]
    s = np.sin(angles)[..., None, None]
    k = np.zeros((j, 3, 3))
    ax = axes
    k[:, 0, 1] = -ax[:, 2]
    k[:, 0, 2] = ax[:, 1]
    k[:, 1, 0] = ax[:, 2]
    k[:, 1, 2] = -ax[:, 0]
    k[:, 2, 0] = -ax[:, 1]
    k[:, 2, 1] = ax[:, 0]
    kk = np.einsum("jab,jbc->jac", k, k)
    eye = np.eye(3)
    return eye + s * k + (1.0 - c) * kk


def fk_frames_batch(arm: ArmDescription, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Joint frames and EE frames for a batch of configs.

    Args:
        Q: (N, dof) configurations.
    Returns:
        frames (N, dof, 4, 4) and ee (N, 4, 4).
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != arm.dof:
        raise DimensionMismatch(f"expected (N, {arm.dof}) config batch, got {Q.shape}")
    n = Q.shape[0]
    rots = _axis_rotations(arm.axes, Q)
    frames = np.empty((n, arm.dof, 4, 4))
    t = np.broadcast_to(np.eye(4), (n, 4, 4))
    for j in range(arm.dof):
        t = np.einsum("nij,jk->nik", t, arm.fixed[j])
        rj = np.broadcast_to(np.eye(4), (n, 4, 4)).copy()
        rj[:, :3, :3] = rots[:, j]
        t = np.einsum("nij,njk->nik", t, rj)
        frames[:, j] = t
    ee = np.einsum("nij,jk->nik", t, arm.ee_offset)
    return frames, ee


def fk_frames(arm: ArmDescription, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Single-config FK as 4x4 matrices: (dof, 4, 4) link frames plus EE frame."""
    q = arm.check_config(q)
    frames, ee = fk_frames_batch(arm, q[None, :])
    return frames[0], ee[0]


def forward_kinematics(arm: ArmDescription, q: np.ndarray) -> tuple[list[Pose], Pose]:
    """Link frames and EE pose for one configuration."""
    frames, ee = fk_frames(arm, q)
    link_poses = [Pose(frames[j, :3, 3].copy(), mat_to_quat(frames[j, :3, :3])) for j in range(arm.dof)]
    return link_poses, Pose(ee[:3, 3].copy(), mat_to_quat(ee[:3, :3]))


def ee_position(arm: ArmDescription, q: np.ndarray) -> np.ndarray:
    _, ee = fk_frames(arm, q)
    return ee[:3, 3]


def capsule_points_batch(arm: ArmDescription, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """World capsule endpoints for a config batch.

    Returns (P0, P1, radii) with P0, P1 of shape (N, n_capsules, 3); radii is
    shared across the batch, shape (n_capsules,).
    """
    frames, _ = fk_frames_batch(arm, Q)
    owned = frames[:, arm.capsule_owner]  # (N, C, 4, 4)
    rot = owned[..., :3, :3]
    trans = owned[..., :3, 3]
    p0 = np.einsum("ncij,cj->nci", rot, arm.capsule_p0_local) + trans
    p1 = np.einsum("ncij,cj->nci", rot, arm.capsule_p1_local) + trans
    return p0, p1, arm.capsule_radii


def link_capsules_world(arm: ArmDescription, q: np.ndarray) -> list[CapsuleShape]:
    q = arm.check_config(q)
    p0, p1, radii = capsule_points_batch(arm, q[None, :])
    return [CapsuleShape(p0[0, i], p1[0, i], float(radii[i])) for i in range(arm.n_capsules)]


def jacobian_position(arm: ArmDescription, q: np.ndarray) -> np.ndarray:
    """Position Jacobian (3, dof): column j = axis_j x (p_ee - p_joint_j)."""
    q = arm.check_config(q)
    frames, ee = fk_frames(arm, q)
    p_ee = ee[:3, 3]
    jac = np.empty((3, arm.dof))
    for j in range(arm.dof):
        axis_world = frames[j, :3, :3] @ arm.axes[j]
        jac[:, j] = np.cross(axis_world, p_ee - frames[j, :3, 3])
    return jac


# -- inverse kinematics ----------------------------------------------------


@dataclass
class IkOptions:
    tol: float = 1e-4
    max_iters: int = 200
    max_restarts: int = 10
    damping: float = 0.1
    step_clamp: float = 0.5
    rng_seed: int = 0


def _dls_attempt(arm: ArmDescription, target: np.ndarray, q0: np.ndarray, opts: IkOptions) -> Optional[np.ndarray]:
    q = arm.clamp(np.array(q0, dtype=float))
    lam2 = opts.damping * opts.damping
    eye3 = np.eye(3)
    for _ in range(opts.max_iters):
        err = target - ee_position(arm, q)
        if np.linalg.norm(err) <= opts.tol:
            return q
        jac = jacobian_position(arm, q)
        dq = jac.T @ np.linalg.solve(jac @ jac.T + lam2 * eye3, err)
        m = np.max(np.abs(dq))
        if m > opts.step_clamp:
            dq *= opts.step_clamp / m
        q = arm.clamp(q + dq)
    if np.linalg.norm(target - ee_position(arm, q)) <= opts.tol:
        return q
    return None


def solve_ik(arm: ArmDescription, target_position: np.ndarray, seed_config: np.ndarray,
             opts: Optional[IkOptions] = None) -> np.ndarray:
    """Position-only IK via damped least squares with seeded random restarts.

    The first attempt starts at seed_config; subsequent restarts draw uniform
    configs inside the joint limits from a generator seeded by opts.rng_seed,
    so the whole search is deterministic. Raises Unreachable when every
    attempt fails to converge within tolerance.
    """
    opts = opts or IkOptions()
    target = np.asarray(target_position, dtype=float).reshape(3)
    seed = arm.check_config(seed_config)
    rng = np.random.default_rng(opts.rng_seed)
    for attempt in range(opts.max_restarts + 1):
        q0 = seed if attempt == 0 else arm.random_config(rng)
        q = _dls_attempt(arm, target, q0, opts)
        if q is not None:
            return q
    raise Unreachable(f"IK failed for target {target.tolist()} after {opts.max_restarts} restarts")


def ik_candidates(arm: ArmDescription, target_position: np.ndarray, seed_config: np.ndarray,
                  opts: Optional[IkOptions] = None):
    """Yield converged IK solutions in deterministic restart order."""
    opts = opts or IkOptions()
    target = np.asarray(target_position, dtype=float).reshape(3)
    seed = arm.check_config(seed_config)
    rng = np.random.default_rng(opts.rng_seed)
    for attempt in range(opts.max_restarts + 1):
        q0 = seed if attempt == 0 else arm.random_config(rng)
        q = _dls_attempt(arm, target, q0, opts)
        if q is not None:
            yield q
