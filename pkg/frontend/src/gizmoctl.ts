/**
 * TransformControls wiring: turns gizmo gestures on obstacle meshes into
 * throttled transform_barrier streams with ghost preview and snap-back.
 */

import * as THREE from "three";
import { TransformControls } from "three/examples/jsm/controls/TransformControls.js";
import {
  GhostTracker,
  quatToWire,
  ScaleTracker,
  transformFieldsFor,
  type GizmoMode,
} from "./gizmo";
import type { Gateway } from "./net";
import { transformBarrier, type Vec3 } from "./protocol";
import type { SceneView } from "./scene";
import { RateLimiter } from "./throttle";

export class GizmoController {
  private readonly tc: TransformControls;
  private readonly limiter = new RateLimiter(20);
  private readonly scales = new ScaleTracker();
  private attachedId: string | null = null;

  constructor(
    private readonly view: SceneView,
    private readonly gateway: Gateway,
    private readonly ghosts: GhostTracker,
    private readonly onReject: (code: string, detail: string) => void,
  ) {
    this.tc = new TransformControls(view.camera, view.renderer.domElement);
    this.tc.setSize(0.8);
    view.scene.add(this.tc.getHelper());
    this.tc.addEventListener("dragging-changed", (ev) => {
      view.controls.enabled = !ev.value;
      if (ev.value) this.beginGesture();
      else this.endGesture();
    });
    this.tc.addEventListener("objectChange", () => this.streamChange());
  }

  get mode(): GizmoMode {
    return this.tc.mode as GizmoMode;
  }

  setMode(mode: GizmoMode): void {
    this.tc.setMode(mode);
  }

  /** True while the pointer is over a gizmo handle (don't re-route clicks). */
  get busy(): boolean {
    return this.tc.axis !== null || this.tc.dragging;
  }

  get attached(): string | null {
    return this.attachedId;
  }

  attachTo(barrierId: string): void {
    const object = this.view.barrierObject(barrierId);
    if (object === null) return;
    this.attachedId = barrierId;
    this.tc.attach(object);
  }

  detach(): void {
    if (this.tc.dragging) return; // never yank mid-gesture
    this.attachedId = null;
    this.tc.detach();
  }

  /** Drop the gizmo if its barrier vanished from the broadcast. */
  onState(): void {
    if (this.attachedId !== null && this.view.barrierObject(this.attachedId) === null) {
      this.attachedId = null;
      this.tc.detach();
    }
  }

  private snapshot(): { position: Vec3; quaternion: ReturnType<typeof quatToWire>; scale: Vec3 } {
    const o = this.tc.object as THREE.Object3D;
    return {
      position: [o.position.x, o.position.y, o.position.z],
      quaternion: quatToWire(o.quaternion.x, o.quaternion.y, o.quaternion.z, o.quaternion.w),
      scale: [o.scale.x, o.scale.y, o.scale.z],
    };
  }

  private beginGesture(): void {
    if (this.attachedId === null) return;
    this.ghosts.begin(this.attachedId);
    this.scales.reset();
  }

  private streamChange(): void {
    if (this.attachedId === null || !this.tc.dragging) return;
    this.pushSend(false);
  }

  private endGesture(): void {
    if (this.attachedId === null) return;
    this.pushSend(true);
  }

  private pushSend(final: boolean): void {
    const id = this.attachedId!;
    const snap = this.snapshot();
    const fields = transformFieldsFor(this.mode, snap, this.scales.increment(snap.scale));
    if (fields === null) {
      if (final) this.ghosts.confirm(id); // nothing changed; wire already right
      return;
    }
    const scaleAtBuild = snap.scale;
    this.limiter.push(() => {
      if (fields.scale !== undefined) this.scales.markSent(scaleAtBuild);
      this.gateway.send(
        (rid) => transformBarrier(rid, id, fields),
        (resp) => {
          if (resp.error) {
            // authoritative state wins: release the ghost so the next
            // broadcast snaps the mesh back, and surface the rejection
            this.ghosts.release(id);
            this.onReject(resp.error.code, resp.error.detail);
            const object = this.view.barrierObject(id);
            if (object !== null) object.scale.set(1, 1, 1);
          } else if (final) {
            this.ghosts.confirm(id);
          }
        },
      );
    });
  }
}
