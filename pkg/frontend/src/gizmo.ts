/**
 * Pure payload side of barrier manipulation: what a gizmo gesture turns
 * into on the wire, and the ghost bookkeeping that keeps local preview and
 * authoritative state from fighting.
 *
 * Position and orientation are sent absolutely. Scale is multiplicative on
 * the server (sphere radius times scale[0], box half-extents componentwise),
 * so a gesture streams scale increments: the ratio of the mesh scale now to
 * the mesh scale at the previous send. The product of all increments equals
 * the total gesture scale regardless of throttling.
 */

import type { Quat, TransformFields, Vec3 } from "./protocol";

export type GizmoMode = "translate" | "rotate" | "scale";

/** three.js quaternions are (x, y, z, w); the wire wants (w, x, y, z). */
export function quatToWire(x: number, y: number, z: number, w: number): Quat {
  return [w, x, y, z];
}

export class ScaleTracker {
  private lastSent: Vec3 = [1, 1, 1];

  /** Ratio of the current gesture scale to what was already sent. */
  increment(current: Vec3): Vec3 {
    return [
      current[0] / this.lastSent[0],
      current[1] / this.lastSent[1],
      current[2] / this.lastSent[2],
    ];
  }

  markSent(current: Vec3): void {
    this.lastSent = [...current] as Vec3;
  }

  reset(): void {
    this.lastSent = [1, 1, 1];
  }
}

const SCALE_SEND_EPS = 1e-9;

/**
 * Fields for one throttled send during a gesture. Returns null when the
 * increment is too small to bother the server with (e.g. pure translate
 * gestures in scale mode).
 */
export function transformFieldsFor(
  mode: GizmoMode,
  pose: { position: Vec3; quaternion: Quat },
  scaleIncrement: Vec3,
): TransformFields | null {
  if (mode === "translate") return { position: [...pose.position] as Vec3 };
  if (mode === "rotate") return { orientation: [...pose.quaternion] as Quat };
  const s = scaleIncrement;
  if (
    Math.abs(s[0] - 1) < SCALE_SEND_EPS &&
    Math.abs(s[1] - 1) < SCALE_SEND_EPS &&
    Math.abs(s[2] - 1) < SCALE_SEND_EPS
  ) {
    return null;
  }
  return { scale: [...s] as Vec3 };
}

/**
 * Ghost lifecycle for one barrier. While a gesture is live (and until the
 * server confirms the final send) the scene must not overwrite the mesh
 * from broadcasts, or the preview would stutter backwards in time.
 */
export class GhostTracker {
  private ghosted = new Set<string>();
  private releaseOnNextState = new Set<string>();

  begin(barrierId: string): void {
    this.ghosted.add(barrierId);
    this.releaseOnNextState.delete(barrierId);
  }

  /** Final send acknowledged: authoritative state now carries the pose. */
  confirm(barrierId: string): void {
    if (this.ghosted.has(barrierId)) this.releaseOnNextState.add(barrierId);
  }

  /** Rejection or cancel: drop the ghost so the wire pose snaps back in. */
  release(barrierId: string): void {
    this.ghosted.delete(barrierId);
    this.releaseOnNextState.delete(barrierId);
  }

  isGhosted(barrierId: string): boolean {
    return this.ghosted.has(barrierId);
  }

  /** Call once per applied StateMessage. */
  onStateApplied(): void {
    for (const id of this.releaseOnNextState) this.ghosted.delete(id);
    this.releaseOnNextState.clear();
  }
}
