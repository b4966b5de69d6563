/**
 * Person avatar driving: drag on the floor plane, or WASD relative to the
 * camera heading. Both emit a throttled move_person stream; the cylinder is
 * ghosted locally while input is active so it tracks the pointer without
 * waiting a broadcast round-trip.
 */

import type { GhostTracker } from "./gizmo";
import type { Gateway } from "./net";
import { movePerson, type Vec2 } from "./protocol";
import type { SceneView } from "./scene";
import type { StateStore } from "./state";
import { RateLimiter } from "./throttle";

const WALK_SPEED = 1.0; // m/s, matches the scripted-person cap

export class PersonDriver {
  private readonly limiter = new RateLimiter(20);
  private dragging = false;
  private keys = new Set<string>();
  private ghostXY: Vec2 | null = null;

  constructor(
    private readonly view: SceneView,
    private readonly gateway: Gateway,
    private readonly store: StateStore,
    private readonly ghosts: GhostTracker,
  ) {
    window.addEventListener("keydown", (ev) => this.onKey(ev, true));
    window.addEventListener("keyup", (ev) => this.onKey(ev, false));
  }

  get personId(): string | null {
    return this.store.person?.id ?? null;
  }

  private currentXY(): Vec2 | null {
    if (this.ghostXY !== null) return this.ghostXY;
    const p = this.store.person;
    if (p === null || p.shape.kind !== "cylinder") return null;
    return [p.shape.center_xy[0], p.shape.center_xy[1]];
  }

  // ----------------------------------------------------------------- drag

  startDrag(): boolean {
    const id = this.personId;
    if (id === null) return false;
    this.dragging = true;
    this.view.controls.enabled = false;
    this.ghosts.begin(id);
    return true;
  }

  moveDrag(event: PointerEvent): void {
    if (!this.dragging) return;
    const hit = this.view.pickTable(event);
    if (hit === null) return;
    this.setGhost([hit[0], hit[1]]);
    this.queueSend(false);
  }

  endDrag(): void {
    if (!this.dragging) return;
    this.dragging = false;
    this.view.controls.enabled = true;
    this.queueSend(true);
  }

  get isDragging(): boolean {
    return this.dragging;
  }

  // ----------------------------------------------------------------- wasd

  private onKey(ev: KeyboardEvent, down: boolean): void {
    const k = ev.key.toLowerCase();
    if (!["w", "a", "s", "d"].includes(k)) return;
    const tag = (ev.target as HTMLElement | null)?.tagName;
    if (tag === "INPUT" || tag === "TEXTAREA") return;
    if (down) this.keys.add(k);
    else {
      this.keys.delete(k);
      if (this.keys.size === 0) this.queueSend(true);
    }
  }

  /** Advance WASD motion; called once per render frame with wall dt. */
  tick(dt: number): void {
    if (this.keys.size === 0 || this.dragging) return;
    const id = this.personId;
    const xy = this.currentXY();
    if (id === null || xy === null) return;

    // camera-relative heading projected onto the floor
    const cam = this.view.camera;
    const fwd = [-cam.position.x + this.view.controls.target.x,
                 -cam.position.y + this.view.controls.target.y];
    const norm = Math.hypot(fwd[0], fwd[1]) || 1;
    const f: Vec2 = [fwd[0] / norm, fwd[1] / norm];
    const right: Vec2 = [f[1], -f[0]];

    let vx = 0;
    let vy = 0;
    if (this.keys.has("w")) { vx += f[0]; vy += f[1]; }
    if (this.keys.has("s")) { vx -= f[0]; vy -= f[1]; }
    if (this.keys.has("d")) { vx += right[0]; vy += right[1]; }
    if (this.keys.has("a")) { vx -= right[0]; vy -= right[1]; }
    const mag = Math.hypot(vx, vy);
    if (mag < 1e-9) return;

    if (this.ghostXY === null) this.ghosts.begin(id);
    this.setGhost([
      xy[0] + (vx / mag) * WALK_SPEED * dt,
      xy[1] + (vy / mag) * WALK_SPEED * dt,
    ]);
    this.queueSend(false);
  }

  // ------------------------------------------------------------- plumbing

  private setGhost(xy: Vec2): void {
    this.ghostXY = xy;
    const id = this.personId;
    if (id === null) return;
    const object = this.view.barrierObject(id);
    if (object !== null) {
      object.position.x = xy[0];
      object.position.y = xy[1];
    }
  }

  private queueSend(final: boolean): void {
    const id = this.personId;
    const xy = this.ghostXY;
    if (id === null || xy === null) return;
    const payload: Vec2 = [xy[0], xy[1]];
    this.limiter.push(() => {
      this.gateway.send(
        (rid) => movePerson(rid, payload),
        (resp) => {
          if (resp.error || final) this.ghosts.confirm(id);
        },
      );
    });
    if (final) this.ghostXY = null;
  }
}
