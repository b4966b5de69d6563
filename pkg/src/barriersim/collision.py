"""Signed distances between arm capsules and barrier volumes, plus validity checks.

Sign convention: positive = separated surfaces, zero = touching, negative =
overlap. A solid finite cylinder and a solid box are convex sets, so the
distance from a point to either is convex along a segment; the segment-to-solid
distance is found by ternary search on that 1-D convex function, which is exact
to float precision in the separated case. Penetration magnitudes come from a
dense fallback sampling and are only advisory: validity thresholds act on the
sign and near-zero band where values are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arm import ArmDescription, capsule_points_batch
from .errors import Cancelled, EmptyPath
from .geometry import quat_to_mat
from .shapes import BarrierShape, CapsuleShape, OrientedBox, Sphere, VerticalCylinder

EMPTY_CLEARANCE = 1e9
_TERNARY_ITERS = 64
_PENETRATION_SAMPLES = 65


class CancelToken:
    """Cooperative cancellation flag for long validity checks and planning."""

    __slots__ = ("_cancelled",)

    def __init__(self):
        self._cancelled = False

    def cancel(self) -> None:
        self._cancelled = True

    @property
    def cancelled(self) -> bool:
        return self._cancelled

    def raise_if_cancelled(self) -> None:
        if self._cancelled:
            raise Cancelled("operation cancelled")


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    first_invalid_sample: Optional[int]
    min_clearance: float
    offending_barrier: Optional[str]


# -- point distances (vectorized over leading dims) -------------------------


def _point_sphere_outside(p: np.ndarray, s: Sphere) -> np.ndarray:
    return np.linalg.norm(p - s.center, axis=-1)


def _point_cylinder_outside(p: np.ndarray, c: VerticalCylinder) -> np.ndarray:
    # distance to the solid cylinder, zero inside; convex in p
    dx = p[..., 0] - c.center_xy[0]
    dy = p[..., 1] - c.center_xy[1]
    rho = np.hypot(dx, dy)
    dr = np.maximum(rho - c.radius, 0.0)
    dz = np.maximum(np.maximum(c.z0 - p[..., 2], p[..., 2] - (c.z0 + c.height)), 0.0)
    return np.hypot(dr, dz)


def _point_cylinder_signed(p: np.ndarray, c: VerticalCylinder) -> np.ndarray:
    dx = p[..., 0] - c.center_xy[0]
    dy = p[..., 1] - c.center_xy[1]
    rho = np.hypot(dx, dy)
    below = c.z0 - p[..., 2]
    above = p[..., 2] - (c.z0 + c.height)
    dz_out = np.maximum(below, above)
    outside = np.hypot(np.maximum(rho - c.radius, 0.0), np.maximum(dz_out, 0.0))
    inside = np.maximum(rho - c.radius, dz_out)  # negative depth when inside
    return np.where((rho <= c.radius) & (dz_out <= 0.0), inside, outside)


def _box_local(p: np.ndarray, b: OrientedBox) -> np.ndarray:
    rot = quat_to_mat(b.pose.orientation)
    return (p - b.pose.position) @ rot


def _point_box_outside_local(p_loc: np.ndarray, half: np.ndarray) -> np.ndarray:
    d = np.abs(p_loc) - half
    return np.linalg.norm(np.maximum(d, 0.0), axis=-1)


def _point_box_signed_local(p_loc: np.ndarray, half: np.ndarray) -> np.ndarray:
    d = np.abs(p_loc) - half
    outside = np.linalg.norm(np.maximum(d, 0.0), axis=-1)
    inside = np.max(d, axis=-1)
    return np.where(np.all(d <= 0.0, axis=-1), inside, outside)


# -- segment minimization ----------------------------------------------------


def _ternary_min(f, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Minimum of a convex function along each segment p0->p1.

    f maps points (..., 3) to values (...). Plain ternary search; convexity of
    point-to-convex-set distance makes this exact up to float resolution.
    """
    d = p1 - p0
    lo = np.zeros(p0.shape[:-1])
    hi = np.ones(p0.shape[:-1])
    for _ in range(_TERNARY_ITERS):
        third = (hi - lo) / 3.0
        m1 = lo + third
        m2 = hi - third
        f1 = f(p0 + m1[..., None] * d)
        f2 = f(p0 + m2[..., None] * d)
        left = f1 <= f2
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    t = 0.5 * (lo + hi)
    return f(p0 + t[..., None] * d)


def _penetration(signed_point_fn, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Most-negative signed point distance over a dense fixed sampling."""
    ts = np.linspace(0.0, 1.0, _PENETRATION_SAMPLES)
    pts = p0[..., None, :] + ts[:, None] * (p1 - p0)[..., None, :]
    vals = signed_point_fn(pts)
    return np.minimum(np.min(vals, axis=-1), 0.0)


def _segment_sphere_signed(p0: np.ndarray, p1: np.ndarray, s: Sphere) -> np.ndarray:
    d = p1 - p0
    dd = np.einsum("...i,...i->...", d, d)
    t = np.where(dd > 0.0, np.einsum("...i,...i->...", s.center - p0, d) / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = p0 + t[..., None] * d
    return np.linalg.norm(closest - s.center, axis=-1) - s.radius


def _segment_cylinder_signed(p0: np.ndarray, p1: np.ndarray, c: VerticalCylinder) -> np.ndarray:
    solid = _ternary_min(lambda p: _point_cylinder_outside(p, c), p0, p1)
    hit = solid <= 0.0
    out = solid.copy() if isinstance(solid, np.ndarray) else np.asarray(solid)
    if np.any(hit):
        pen = _penetration(lambda p: _point_cylinder_signed(p, c), p0, p1)
        out = np.where(hit, pen, out)
    return out


def _segment_box_signed(p0: np.ndarray, p1: np.ndarray, b: OrientedBox) -> np.ndarray:
    half = b.half_extents
    q0 = _box_local(p0, b)
    q1 = _box_local(p1, b)
    solid = _ternary_min(lambda p: _point_box_outside_local(p, half), q0, q1)
    hit = solid <= 0.0
    out = solid
    if np.any(hit):
        pen = _penetration(lambda p: _point_box_signed_local(p, half), q0, q1)
        out = np.where(hit, pen, out)
    return out


def _segment_shape_signed(p0: np.ndarray, p1: np.ndarray, shape: BarrierShape) -> np.ndarray:
    if isinstance(shape, Sphere):
        return _segment_sphere_signed(p0, p1, shape)
    if isinstance(shape, VerticalCylinder):
        return _segment_cylinder_signed(p0, p1, shape)
    if isinstance(shape, OrientedBox):
        return _segment_box_signed(p0, p1, shape)
    raise TypeError(f"unsupported barrier shape {type(shape).__name__}")


# -- capsule distances -------------------------------------------------------


def distance_capsule_sphere(c: CapsuleShape, s: Sphere) -> float:
    return float(_segment_sphere_signed(c.p0, c.p1, s) - c.radius)


def distance_capsule_cylinder(c: CapsuleShape, cyl: VerticalCylinder) -> float:
    return float(_segment_cylinder_signed(c.p0[None], c.p1[None], cyl)[0] - c.radius)


def distance_capsule_box(c: CapsuleShape, b: OrientedBox) -> float:
    return float(_segment_box_signed(c.p0[None], c.p1[None], b)[0] - c.radius)


def distance_capsule_shape(c: CapsuleShape, shape: BarrierShape) -> float:
    if isinstance(shape, Sphere):
        return distance_capsule_sphere(c, shape)
    if isinstance(shape, VerticalCylinder):
        return distance_capsule_cylinder(c, shape)
    if isinstance(shape, OrientedBox):
        return distance_capsule_box(c, shape)
    raise TypeError(f"unsupported barrier shape {type(shape).__name__}")


# -- cheap lower bounds (used to skip exact work when everything is far) -----


def _segment_point_dist2(p0: np.ndarray, p1: np.ndarray, x: np.ndarray, dims: int) -> np.ndarray:
    a = p0[..., :dims]
    d = p1[..., :dims] - a
    dd = np.einsum("...i,...i->...", d, d)
    t = np.where(dd > 0.0, np.einsum("...i,...i->...", x[:dims] - a, d) / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * d
    return np.linalg.norm(closest - x[:dims], axis=-1)


def _shape_lower_bound(p0: np.ndarray, p1: np.ndarray, shape: BarrierShape) -> np.ndarray:
    """Cheap per-segment lower bound on the signed distance to the shape."""
    if isinstance(shape, Sphere):
        return _segment_sphere_signed(p0, p1, shape)  # already exact and cheap
    if isinstance(shape, VerticalCylinder):
        cx = np.array([shape.center_xy[0], shape.center_xy[1], 0.0])
        radial = _segment_point_dist2(p0, p1, cx, 2) - shape.radius
        z_lo = np.minimum(p0[..., 2], p1[..., 2])
        z_hi = np.maximum(p0[..., 2], p1[..., 2])
        vertical = np.maximum(shape.z0 - z_hi, z_lo - (shape.z0 + shape.height))
        return np.maximum(radial, vertical)
    if isinstance(shape, OrientedBox):
        return (
            _segment_point_dist2(p0, p1, shape.pose.position, 3)
            - float(np.linalg.norm(shape.half_extents))
        )
    raise TypeError(f"unsupported barrier shape {type(shape).__name__}")


def segments_clear(p0: np.ndarray, p1: np.ndarray, radii: np.ndarray,
                   barriers: Sequence, threshold: float) -> bool:
    """True when every capsule keeps >= threshold clearance from every barrier.

    Tries a conservative bound per barrier first and falls back to the exact
    signed distance only when the bound cannot certify the margin.
    """
    for b in barriers:
        lb = _shape_lower_bound(p0, p1, b.shape) - radii
        if np.all(lb >= threshold):
            continue
        exact = _segment_shape_signed(p0, p1, b.shape) - radii
        if np.any(exact < threshold):
            return False
    return True


def clearance_lower_bound(arm: ArmDescription, q: np.ndarray, barriers: Sequence) -> float:
    """Conservative lower bound on min_clearance for one config; cheap."""
    if len(barriers) == 0:
        return EMPTY_CLEARANCE
    p0, p1, radii = capsule_points_batch(arm, q[None, :])
    best = EMPTY_CLEARANCE
    for b in barriers:
        lb = _shape_lower_bound(p0, p1, b.shape) - radii
        best = min(best, float(np.min(lb)))
    return best


def step_audit(arm: ArmDescription, q: np.ndarray, barriers: Sequence,
               running_min: float) -> tuple[list, float]:
    """Per-step ground-truth contact check with exact min-clearance tracking.

    A barrier whose conservative bound proves it neither touches the arm nor
    improves the caller's running minimum is skipped without an exact query.
    Returns (ids of barriers in contact, candidate) where
    min(running_min, candidate) equals min(running_min, true step minimum).
    """
    contacts: list = []
    candidate = EMPTY_CLEARANCE
    if len(barriers) == 0:
        return contacts, candidate
    p0, p1, radii = capsule_points_batch(arm, q[None, :])
    for b in barriers:
        lb = float(np.min(_shape_lower_bound(p0, p1, b.shape) - radii))
        if lb >= 0.0 and lb >= running_min:
            continue
        exact = float(np.min(_segment_shape_signed(p0, p1, b.shape) - radii))
        if exact < 0.0:
            contacts.append(b.id)
        candidate = min(candidate, exact)
    return contacts, candidate


# -- arm clearance -----------------------------------------------------------


def clearance_batch(arm: ArmDescription, Q: np.ndarray, barriers: Sequence) -> tuple[np.ndarray, np.ndarray]:
    """Min signed clearance of each config against every barrier.

    Args:
        Q: (N, dof) configs.
        barriers: sequence of objects with .id and .shape.
    Returns:
        clearances (N,) and offender index (N,) into barriers (-1 when empty).
    """
    n = Q.shape[0]
    if len(barriers) == 0:
        return np.full(n, EMPTY_CLEARANCE), np.full(n, -1, dtype=int)
    p0, p1, radii = capsule_points_batch(arm, Q)
    per_barrier = np.empty((n, len(barriers)))
    for bi, b in enumerate(barriers):
        signed = _segment_shape_signed(p0, p1, b.shape) - radii[None, :]
        per_barrier[:, bi] = np.min(signed, axis=1)
    idx = np.argmin(per_barrier, axis=1)
    return per_barrier[np.arange(n), idx], idx


def min_clearance(arm: ArmDescription, q: np.ndarray, snapshot) -> tuple[float, Optional[str]]:
    """Smallest capsule-to-barrier clearance for one config.

    Returns the 1e9 sentinel and no offender when the snapshot has no
    barriers.
    """
    q = arm.check_config(q)
    barriers = list(snapshot.barriers)
    vals, idx = clearance_batch(arm, q[None, :], barriers)
    if idx[0] < 0:
        return EMPTY_CLEARANCE, None
    return float(vals[0]), barriers[int(idx[0])].id


def config_valid(arm: ArmDescription, q: np.ndarray, snapshot, d_safe: float) -> bool:
    """True when every capsule keeps at least d_safe clearance (exactly d_safe passes)."""
    val, _ = min_clearance(arm, q, snapshot)
    return val >= d_safe


# -- path validation ---------------------------------------------------------


def _interval_subdivisions(delta: float, eps_q: float) -> int:
    # power-of-two subdivision so finer eps always yields a superset of samples
    n = 1
    while delta / n > eps_q * (1.0 + 1e-12):
        n *= 2
    return n


def densify(knots: np.ndarray, eps_q: float) -> np.ndarray:
    """Expand a knot sequence so no joint moves more than eps_q between samples.

    Subdivision counts are powers of two per interval, which makes the sample
    set at eps_q/2^k a superset of the one at eps_q.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 2 or knots.shape[0] < 1:
        raise EmptyPath("path must contain at least one knot")
    if knots.shape[0] == 1:
        return knots.copy()
    parts = [knots[0:1]]
    for a, b in zip(knots[:-1], knots[1:]):
        delta = float(np.max(np.abs(b - a)))
        n = _interval_subdivisions(delta, eps_q)
        ts = np.arange(1, n + 1) / n
        parts.append(a[None, :] + ts[:, None] * (b - a)[None, :])
    return np.concatenate(parts, axis=0)


def path_valid(arm: ArmDescription, knots: np.ndarray, snapshot, d_safe: float,
               eps_q: float, cancel: Optional[CancelToken] = None,
               chunk: int = 512) -> ValidityReport:
    """Validate a joint-space polyline against a snapshot.

    Samples are the knots plus power-of-two interior subdivisions so that no
    joint moves more than eps_q between consecutive checked configs. Checking
    stops at the first invalid sample; min_clearance covers the samples
    checked up to and including that point.
    """
    samples = densify(knots, eps_q)
    barriers = list(snapshot.barriers)
    total = samples.shape[0]
    overall_min = EMPTY_CLEARANCE
    offender: Optional[str] = None
    for start in range(0, total, chunk):
        if cancel is not None:
            cancel.raise_if_cancelled()
        block = samples[start:start + chunk]
        vals, idx = clearance_batch(arm, block, barriers)
        bad = np.nonzero(vals < d_safe)[0]
        if bad.size > 0:
            cut = int(bad[0])
            block_min = float(np.min(vals[:cut + 1]))
            if block_min < overall_min:
                overall_min = block_min
            first_bad = start + cut
            off = barriers[int(idx[cut])].id if idx[cut] >= 0 else None
            return ValidityReport(False, first_bad, overall_min, off)
        block_min = float(np.min(vals)) if vals.size else EMPTY_CLEARANCE
        if block_min < overall_min:
            overall_min = block_min
    return ValidityReport(True, None, overall_min, offender)
