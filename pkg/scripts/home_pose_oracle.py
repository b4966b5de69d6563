"""Independent home-pose calculator for an arm description file.

Composes the kinematic chain with scipy Rotation objects instead of the
package's own FK code, so the printed pose can serve as a frozen regression
value in the test suite. Run from the repo root:

    python scripts/home_pose_oracle.py src/barriersim/data/cobot_6dof.json [q0 q1 ...]
"""
import json
import sys

import numpy as np
from scipy.spatial.transform import Rotation


def main() -> None:
    path = sys.argv[1]
    spec = json.loads(open(path).read())
    q = np.zeros(len(spec["joints"]))
    if len(sys.argv) > 2:
        q = np.array([float(a) for a in sys.argv[2:]])
        assert q.shape == (len(spec["joints"]),)

    rot = Rotation.identity()
    pos = np.zeros(3)
    for joint, angle in zip(spec["joints"], q):
        # fixed parent-to-joint transform, then rotation about the joint axis
        pos = pos + rot.apply(np.asarray(joint["origin_xyz"], dtype=float))
        r, p, y = joint["origin_rpy"]
        rot = rot * Rotation.from_euler("ZYX", [y, p, r])
        axis = np.asarray(joint["axis"], dtype=float)
        rot = rot * Rotation.from_rotvec(axis * angle)

    ee = spec["ee_offset"]
    pos = pos + rot.apply(np.asarray(ee["xyz"], dtype=float))
    r, p, y = ee["rpy"]
    rot = rot * Rotation.from_euler("ZYX", [y, p, r])

    quat_xyzw = rot.as_quat()
    wxyz = np.array([quat_xyzw[3], quat_xyzw[0], quat_xyzw[1], quat_xyzw[2]])
    if wxyz[0] < 0:
        wxyz = -wxyz
    np.set_printoptions(precision=17)
    print("config:", list(q))
    print("ee position:", repr(pos))
    print("ee quaternion (w,x,y,z):", repr(wxyz))


if __name__ == "__main__":
    main()
