/**
 * three.js view of one StateMessage: table, capsule-proxy arm, barriers,
 * waypoint markers, and status-colored sub-path polylines.
 *
 * The world is z-up to match the wire (SI meters, table at z = 0); the
 * camera's up vector is set accordingly instead of rotating every object
 * into three's default y-up frame.
 *
 * update() is the only mutator and consumes a whole StateMessage, so the
 * rendered scene never mixes two broadcasts. Barriers with an active ghost
 * (gizmo preview in flight) are skipped; the gizmo owns those meshes until
 * the server confirms or rejects.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import { armForDof, fkFrames, type ArmModel } from "./arms";
import type { GhostTracker } from "./gizmo";
import type {
  Barrier,
  StateMessage,
  SubPathStatus,
  Vec3,
} from "./protocol";

const STATUS_COLORS: Record<SubPathStatus, number> = {
  unplanned: 0x555555,
  planned: 0x2e6fd8,
  executing: 0x27ae60,
  invalid: 0xd64541,
  replanning: 0xd64541,
  completed: 0x8a8f98,
};

const WAYPOINT_BLUE = 0x2e6fd8;
const OBSTACLE_RED = 0xc0392b;
const PERSON_TINT = 0x4a90d9;

function makeLabelSprite(text: string): THREE.Sprite {
  const canvas = document.createElement("canvas");
  canvas.width = 256;
  canvas.height = 64;
  const ctx = canvas.getContext("2d")!;
  ctx.font = "28px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillStyle = "rgba(10, 14, 20, 0.65)";
  const w = Math.min(250, ctx.measureText(text).width + 16);
  ctx.fillRect(128 - w / 2, 8, w, 48);
  ctx.fillStyle = "#dfe7f0";
  ctx.fillText(text, 128, 34, 240);
  const texture = new THREE.CanvasTexture(canvas);
  const sprite = new THREE.Sprite(
    new THREE.SpriteMaterial({ map: texture, depthTest: false }),
  );
  sprite.scale.set(0.3, 0.075, 1);
  return sprite;
}

type BarrierEntry = { object: THREE.Object3D; shapeKey: string };
type PolylineEntry = { line: THREE.Line; key: string };

export class SceneView {
  readonly renderer: THREE.WebGLRenderer;
  readonly scene: THREE.Scene;
  readonly camera: THREE.PerspectiveCamera;
  readonly controls: OrbitControls;

  private readonly tablePlane: THREE.Mesh;
  private readonly raycaster = new THREE.Raycaster();

  private arm: ArmModel | null = null;
  private armLinks: THREE.Group[] = [];
  private readonly armGroup = new THREE.Group();
  private readonly eeMarker: THREE.Mesh;

  private readonly barrierGroup = new THREE.Group();
  private barriers = new Map<string, BarrierEntry>();

  private readonly waypointGroup = new THREE.Group();
  private waypointKey = "";

  private readonly pathGroup = new THREE.Group();
  private polylines = new Map<number, PolylineEntry>();

  constructor(
    container: HTMLElement,
    private readonly ghosts: GhostTracker,
  ) {
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.renderer.setSize(container.clientWidth, container.clientHeight);
    container.appendChild(this.renderer.domElement);

    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x10141b);

    this.camera = new THREE.PerspectiveCamera(
      50,
      container.clientWidth / container.clientHeight,
      0.01,
      100,
    );
    this.camera.up.set(0, 0, 1);
    this.camera.position.set(2.0, -2.4, 1.7);

    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.target.set(0.3, 0.0, 0.3);
    this.controls.enableDamping = true;
    this.controls.dampingFactor = 0.1;

    const hemi = new THREE.HemisphereLight(0xf0f4fa, 0x30353d, 1.0);
    hemi.position.set(0, 0, 1);
    this.scene.add(hemi);
    const sun = new THREE.DirectionalLight(0xffffff, 1.6);
    sun.position.set(2, -3, 4);
    this.scene.add(sun);

    this.tablePlane = new THREE.Mesh(
      new THREE.PlaneGeometry(6, 6),
      new THREE.MeshStandardMaterial({ color: 0x232a33, roughness: 0.95 }),
    );
    this.tablePlane.name = "table";
    this.scene.add(this.tablePlane);

    const grid = new THREE.GridHelper(6, 24, 0x3a4654, 0x2c3540);
    grid.rotation.x = Math.PI / 2; // GridHelper lies in xz; our floor is xy
    grid.position.z = 0.001;
    this.scene.add(grid);

    this.scene.add(new THREE.AxesHelper(0.25));

    this.eeMarker = new THREE.Mesh(
      new THREE.SphereGeometry(0.02, 16, 12),
      new THREE.MeshStandardMaterial({ color: 0xe8a33d }),
    );
    this.scene.add(this.armGroup);
    this.scene.add(this.eeMarker);
    this.scene.add(this.barrierGroup);
    this.scene.add(this.waypointGroup);
    this.scene.add(this.pathGroup);

    window.addEventListener("resize", () => this.onResize(container));
  }

  private onResize(container: HTMLElement): void {
    const w = container.clientWidth;
    const h = container.clientHeight;
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
    this.renderer.setSize(w, h);
  }

  render(): void {
    this.controls.update();
    this.renderer.render(this.scene, this.camera);
  }

  // ------------------------------------------------------------------ arm

  private buildArm(arm: ArmModel): void {
    this.arm = arm;
    this.armLinks = [];
    this.armGroup.clear();
    const mat = new THREE.MeshStandardMaterial({
      color: 0x9aa7b5,
      roughness: 0.5,
      metalness: 0.25,
    });
    const up = new THREE.Vector3(0, 1, 0);
    for (const capsules of arm.linkCapsules) {
      const link = new THREE.Group();
      link.matrixAutoUpdate = false;
      for (const cap of capsules) {
        const p0 = new THREE.Vector3(...cap.p0);
        const p1 = new THREE.Vector3(...cap.p1);
        const dir = new THREE.Vector3().subVectors(p1, p0);
        const len = dir.length();
        const geo =
          len < 1e-9
            ? new THREE.SphereGeometry(cap.radius, 16, 12)
            : new THREE.CapsuleGeometry(cap.radius, len, 6, 16);
        const mesh = new THREE.Mesh(geo, mat);
        mesh.position.copy(p0).addScaledVector(dir, 0.5);
        if (len >= 1e-9) {
          mesh.quaternion.setFromUnitVectors(up, dir.normalize());
        }
        link.add(mesh);
      }
      this.armLinks.push(link);
      this.armGroup.add(link);
    }
    // base stub so the first joint does not float
    const base = new THREE.Mesh(
      new THREE.CylinderGeometry(0.07, 0.09, 0.04, 24),
      mat,
    );
    base.rotation.x = Math.PI / 2;
    base.position.z = 0.02;
    this.armGroup.add(base);
  }

  private poseArm(q: number[]): void {
    if (this.arm === null || this.arm.joints.length !== q.length) {
      const model = armForDof(q.length);
      if (model === null) return; // unknown arm: EE marker only
      this.buildArm(model);
    }
    const { frames } = fkFrames(this.arm!, q);
    for (let j = 0; j < frames.length; j++) {
      const m = frames[j];
      // row-major number[16] onto three's Matrix4 (set() takes row-major)
      this.armLinks[j].matrix.set(
        m[0], m[1], m[2], m[3],
        m[4], m[5], m[6], m[7],
        m[8], m[9], m[10], m[11],
        m[12], m[13], m[14], m[15],
      );
    }
  }

  // ------------------------------------------------------------- barriers

  private shapeKeyOf(b: Barrier): string {
    const s = b.shape;
    if (s.kind === "sphere") return `sphere:${s.radius}`;
    if (s.kind === "box") return `box:${s.half_extents.join(",")}`;
    return `cyl:${s.radius},${s.height}`;
  }

  private buildBarrierObject(b: Barrier): THREE.Object3D {
    const s = b.shape;
    if (s.kind === "cylinder") {
      // person: translucent, unpickable by gizmo but pickable for dragging
      const group = new THREE.Group();
      const mesh = new THREE.Mesh(
        new THREE.CylinderGeometry(s.radius, s.radius, s.height, 32),
        new THREE.MeshStandardMaterial({
          color: PERSON_TINT,
          transparent: true,
          opacity: 0.15,
          depthWrite: false,
        }),
      );
      mesh.rotation.x = Math.PI / 2; // cylinder axis y -> world z
      mesh.userData.barrierId = b.id;
      group.add(mesh);
      group.userData.barrierId = b.id;
      return group;
    }
    const mat = new THREE.MeshStandardMaterial({
      color: OBSTACLE_RED,
      roughness: 0.6,
    });
    const mesh =
      s.kind === "sphere"
        ? new THREE.Mesh(new THREE.SphereGeometry(s.radius, 24, 18), mat)
        : new THREE.Mesh(
            new THREE.BoxGeometry(
              2 * s.half_extents[0],
              2 * s.half_extents[1],
              2 * s.half_extents[2],
            ),
            mat,
          );
    mesh.userData.barrierId = b.id;
    return mesh;
  }

  private placeBarrier(object: THREE.Object3D, b: Barrier): void {
    const s = b.shape;
    if (s.kind === "sphere") {
      object.position.set(...s.center);
      object.quaternion.identity();
      object.scale.set(1, 1, 1);
    } else if (s.kind === "box") {
      object.position.set(...s.position);
      const [w, x, y, z] = s.orientation;
      object.quaternion.set(x, y, z, w);
      object.scale.set(1, 1, 1);
    } else {
      object.position.set(s.center_xy[0], s.center_xy[1], s.base_z + s.height / 2);
    }
  }

  private updateBarriers(state: StateMessage): void {
    const seen = new Set<string>();
    for (const b of state.barriers.items) {
      seen.add(b.id);
      let entry = this.barriers.get(b.id);
      const key = this.shapeKeyOf(b);
      if (entry === undefined || entry.shapeKey !== key) {
        if (entry !== undefined) this.barrierGroup.remove(entry.object);
        const object = this.buildBarrierObject(b);
        entry = { object, shapeKey: key };
        this.barriers.set(b.id, entry);
        this.barrierGroup.add(object);
        this.placeBarrier(object, b);
        continue;
      }
      if (!this.ghosts.isGhosted(b.id)) this.placeBarrier(entry.object, b);
    }
    for (const [id, entry] of this.barriers) {
      if (!seen.has(id)) {
        this.barrierGroup.remove(entry.object);
        this.barriers.delete(id);
      }
    }
  }

  // ------------------------------------------------- waypoints / polylines

  private updateWaypoints(state: StateMessage): void {
    const key = state.waypoints.map((w) => `${w.id}:${w.label}`).join("|");
    if (key === this.waypointKey) return;
    this.waypointKey = key;
    this.waypointGroup.clear();
    const geo = new THREE.SphereGeometry(0.022, 16, 12);
    const mat = new THREE.MeshStandardMaterial({
      color: WAYPOINT_BLUE,
      emissive: WAYPOINT_BLUE,
      emissiveIntensity: 0.35,
    });
    for (const w of state.waypoints) {
      const marker = new THREE.Mesh(geo, mat);
      marker.position.set(...w.position);
      this.waypointGroup.add(marker);
      const label = makeLabelSprite(w.label);
      label.position.set(w.position[0], w.position[1], w.position[2] + 0.07);
      this.waypointGroup.add(label);
    }
  }

  private updatePolylines(state: StateMessage): void {
    const seen = new Set<number>();
    for (const sp of state.subpaths) {
      if (sp.polyline === null || sp.polyline.length < 2) continue;
      seen.add(sp.index);
      const last = sp.polyline[sp.polyline.length - 1];
      const key = `${sp.status}:${sp.polyline.length}:${last.join(",")}`;
      const entry = this.polylines.get(sp.index);
      if (entry !== undefined && entry.key === key) continue;
      if (entry !== undefined) this.pathGroup.remove(entry.line);
      const points = sp.polyline.map((p) => new THREE.Vector3(...p));
      const line = new THREE.Line(
        new THREE.BufferGeometry().setFromPoints(points),
        new THREE.LineBasicMaterial({ color: STATUS_COLORS[sp.status] }),
      );
      this.polylines.set(sp.index, { line, key });
      this.pathGroup.add(line);
    }
    for (const [index, entry] of this.polylines) {
      if (!seen.has(index)) {
        this.pathGroup.remove(entry.line);
        this.polylines.delete(index);
      }
    }
  }

  // ----------------------------------------------------------------- update

  update(state: StateMessage): void {
    this.poseArm(state.robot.q);
    this.eeMarker.position.set(...state.robot.ee.position);
    this.updateBarriers(state);
    this.updateWaypoints(state);
    this.updatePolylines(state);
  }

  // ---------------------------------------------------------------- picking

  private ndcFrom(event: PointerEvent | MouseEvent): THREE.Vector2 {
    const rect = this.renderer.domElement.getBoundingClientRect();
    return new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1,
    );
  }

  /** World hit on the table plane, or null. */
  pickTable(event: PointerEvent | MouseEvent): Vec3 | null {
    this.raycaster.setFromCamera(this.ndcFrom(event), this.camera);
    const hits = this.raycaster.intersectObject(this.tablePlane, false);
    if (hits.length === 0) return null;
    const p = hits[0].point;
    return [p.x, p.y, p.z];
  }

  /** Topmost barrier under the cursor, or null. */
  pickBarrier(event: PointerEvent | MouseEvent): string | null {
    this.raycaster.setFromCamera(this.ndcFrom(event), this.camera);
    const hits = this.raycaster.intersectObjects(this.barrierGroup.children, true);
    for (const hit of hits) {
      let node: THREE.Object3D | null = hit.object;
      while (node !== null) {
        const id = node.userData.barrierId as string | undefined;
        if (id !== undefined) return id;
        node = node.parent;
      }
    }
    return null;
  }

  barrierObject(id: string): THREE.Object3D | null {
    return this.barriers.get(id)?.object ?? null;
  }
}
