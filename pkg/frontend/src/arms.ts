/**
 * Client-side copies of the bundled arm descriptions plus just enough
 * forward kinematics to pose link capsules from a streamed joint config.
 *
 * The state broadcast carries q and the end-effector pose but not per-link
 * frames, so the client owns the arm geometry the same way a headset app
 * ships with its robot hologram. Frame convention matches the simulator:
 *
 *   T_j = T_{j-1} * A_j * R(axis_j, q_j)
 *
 * with A_j the fixed mount transform (origin_xyz, origin_rpy), the base at
 * the world origin, and link j's capsules expressed in frame j. Which arm is
 * in use is inferred from the length of q.
 */

export type Capsule = { p0: [number, number, number]; p1: [number, number, number]; radius: number };

export type ArmModel = {
  name: string;
  joints: {
    origin_xyz: [number, number, number];
    origin_rpy: [number, number, number];
    axis: [number, number, number];
  }[];
  linkCapsules: Capsule[][];
  eeOffset: { xyz: [number, number, number]; rpy: [number, number, number] };
};

const PLANAR_2LINK: ArmModel = {
  name: "planar-2link",
  joints: [
    { origin_xyz: [0, 0, 0], origin_rpy: [0, 0, 0], axis: [0, 0, 1] },
    { origin_xyz: [1, 0, 0], origin_rpy: [0, 0, 0], axis: [0, 0, 1] },
  ],
  linkCapsules: [
    [{ p0: [0, 0, 0], p1: [1, 0, 0], radius: 0.05 }],
    [{ p0: [0, 0, 0], p1: [1, 0, 0], radius: 0.05 }],
  ],
  eeOffset: { xyz: [1, 0, 0], rpy: [0, 0, 0] },
};

const COBOT_6DOF: ArmModel = {
  name: "cobot-6dof",
  joints: [
    { origin_xyz: [0, 0, 0.15], origin_rpy: [0, 0, 0], axis: [0, 0, 1] },
    { origin_xyz: [0, 0, 0.05], origin_rpy: [0, 0, 0], axis: [0, 1, 0] },
    { origin_xyz: [0, 0, 0.35], origin_rpy: [0, 0, 0], axis: [0, 1, 0] },
    { origin_xyz: [0, 0, 0.3], origin_rpy: [0, 0, 0], axis: [0, 1, 0] },
    { origin_xyz: [0, 0, 0.08], origin_rpy: [0, 0, 0], axis: [0, 0, 1] },
    { origin_xyz: [0, 0, 0.06], origin_rpy: [0, 0, 0], axis: [0, 1, 0] },
  ],
  linkCapsules: [
    [{ p0: [0, 0, -0.13], p1: [0, 0, 0.05], radius: 0.06 }],
    [{ p0: [0, 0, 0], p1: [0, 0, 0.35], radius: 0.06 }],
    [{ p0: [0, 0, 0], p1: [0, 0, 0.3], radius: 0.055 }],
    [{ p0: [0, 0, 0], p1: [0, 0, 0.08], radius: 0.05 }],
    [{ p0: [0, 0, 0], p1: [0, 0, 0.06], radius: 0.05 }],
    [{ p0: [0, 0, 0], p1: [0, 0, 0.1], radius: 0.05 }],
  ],
  eeOffset: { xyz: [0, 0, 0.1], rpy: [0, 0, 0] },
};

export function armForDof(dof: number): ArmModel | null {
  if (dof === 2) return PLANAR_2LINK;
  if (dof === 6) return COBOT_6DOF;
  return null;
}

// Row-major 4x4, plain number[16]. Hot path is 7 multiplies per frame at
// 60 Hz, nothing worth a matrix library over.
export type Mat4 = number[];

export function identity(): Mat4 {
  return [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];
}

export function matMul(a: Mat4, b: Mat4): Mat4 {
  const out = new Array<number>(16);
  for (let r = 0; r < 4; r++) {
    for (let c = 0; c < 4; c++) {
      out[r * 4 + c] =
        a[r * 4] * b[c] +
        a[r * 4 + 1] * b[4 + c] +
        a[r * 4 + 2] * b[8 + c] +
        a[r * 4 + 3] * b[12 + c];
    }
  }
  return out;
}

/** Fixed-axis roll-pitch-yaw: R = Rz(yaw) Ry(pitch) Rx(roll). */
export function rpyTransform(
  rpy: [number, number, number],
  xyz: [number, number, number],
): Mat4 {
  const [r, p, y] = rpy;
  const cr = Math.cos(r), sr = Math.sin(r);
  const cp = Math.cos(p), sp = Math.sin(p);
  const cy = Math.cos(y), sy = Math.sin(y);
  return [
    cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr, xyz[0],
    sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr, xyz[1],
    -sp, cp * sr, cp * cr, xyz[2],
    0, 0, 0, 1,
  ];
}

/** Rotation about a unit axis (Rodrigues), as a homogeneous matrix. */
export function axisRotation(axis: [number, number, number], angle: number): Mat4 {
  const [x, y, z] = axis;
  const c = Math.cos(angle), s = Math.sin(angle), v = 1 - c;
  return [
    x * x * v + c, x * y * v - z * s, x * z * v + y * s, 0,
    y * x * v + z * s, y * y * v + c, y * z * v - x * s, 0,
    z * x * v - y * s, z * y * v + x * s, z * z * v + c, 0,
    0, 0, 0, 1,
  ];
}

/** One world transform per joint frame, plus the end-effector frame. */
export function fkFrames(arm: ArmModel, q: number[]): { frames: Mat4[]; ee: Mat4 } {
  if (q.length !== arm.joints.length) {
    throw new Error(`config length ${q.length} != dof ${arm.joints.length}`);
  }
  const frames: Mat4[] = [];
  let t = identity();
  for (let j = 0; j < arm.joints.length; j++) {
    const spec = arm.joints[j];
    t = matMul(t, rpyTransform(spec.origin_rpy, spec.origin_xyz));
    t = matMul(t, axisRotation(spec.axis, q[j]));
    frames.push(t);
  }
  const ee = matMul(t, rpyTransform(arm.eeOffset.rpy, arm.eeOffset.xyz));
  return { frames, ee };
}

export function eePosition(arm: ArmModel, q: number[]): [number, number, number] {
  const { ee } = fkFrames(arm, q);
  return [ee[3], ee[7], ee[11]];
}
