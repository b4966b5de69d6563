/**
 * Composition root: socket, stores, scene, gizmo, person driving, panel,
 * and the render loop that applies the newest broadcast each frame.
 */

import { GhostTracker } from "./gizmo";
import { GizmoController } from "./gizmoctl";
import { Gateway, gatewayUrl } from "./net";
import { Panel } from "./panel";
import { PersonDriver } from "./person";
import {
  addWaypoint,
  deleteBarrier,
  execute,
  lockPath,
  pause,
  reset,
  resume,
  setSimSpeed,
  spawnBox,
  spawnSphere,
} from "./protocol";
import { SceneView } from "./scene";
import { StateStore } from "./state";

const app = document.getElementById("app")!;
const store = new StateStore();
const ghosts = new GhostTracker();
const view = new SceneView(app, ghosts);

let panel: Panel;
const gateway = new Gateway(gatewayUrl(), store, (code, detail) =>
  panel.toast(`${code}: ${detail}`),
);

const gizmo = new GizmoController(view, gateway, ghosts, (code, detail) =>
  panel.toast(`${code}: ${detail}`),
);
const person = new PersonDriver(view, gateway, store, ghosts);

panel = new Panel(app, {
  onLock: () => gateway.send((id) => lockPath(id)),
  onExecute: () => gateway.send((id) => execute(id)),
  onPause: () => gateway.send((id) => pause(id)),
  onResume: () => gateway.send((id) => resume(id)),
  onReset: () => gateway.send((id) => reset(id)),
  onSpeed: (mult) => gateway.send((id) => setSimSpeed(id, mult)),
  onMode: (mode) => gizmo.setMode(mode),
  // spawn in front of the arm at bench height; grab the gizmo to place it
  onSpawnSphere: () =>
    gateway.send((id) => spawnSphere(id, [0.6, 0.35, 0.35], 0.12)),
  onSpawnBox: () =>
    gateway.send((id) =>
      spawnBox(id, [0.6, -0.35, 0.3], [1, 0, 0, 0], [0.1, 0.1, 0.1]),
    ),
  onDeleteSelected: () => {
    const id = gizmo.attached;
    if (id === null) return;
    gizmo.detach();
    gateway.send((rid) => deleteBarrier(rid, id));
  },
});

gateway.onOpen = () => panel.toast("connected", false);
gateway.onClose = () => panel.setConnected(false);
gateway.connect();

// ------------------------------------------------------------ pointer flow

const canvas = view.renderer.domElement;

canvas.addEventListener("pointerdown", (ev) => {
  if (ev.button !== 0 || gizmo.busy) return;

  if (panel.addWaypointMode) {
    const hit = view.pickTable(ev);
    if (hit !== null) {
      gateway.send(
        (id) => addWaypoint(id, hit),
        (resp) => {
          if (resp.error) panel.toast(`${resp.error.code}: ${resp.error.detail}`);
        },
      );
    }
    return;
  }

  const barrierId = view.pickBarrier(ev);
  if (barrierId === null) {
    gizmo.detach();
    panel.setSelection(null);
    return;
  }
  const barrier = store.barrier(barrierId);
  if (barrier?.kind === "person") {
    // immutable through the gizmo; drive it by dragging instead
    gizmo.detach();
    panel.setSelection(null);
    panel.tooltip(
      "person barrier follows the tracked person (drag it, or use WASD)",
      ev.clientX,
      ev.clientY,
    );
    person.startDrag();
    return;
  }
  gizmo.attachTo(barrierId);
  panel.setSelection(barrierId);
});

canvas.addEventListener("pointermove", (ev) => person.moveDrag(ev));
window.addEventListener("pointerup", () => person.endDrag());
window.addEventListener("keydown", (ev) => {
  if (ev.key === "Escape") {
    gizmo.detach();
    panel.setSelection(null);
    panel.addWaypointMode = false;
  }
});

// -------------------------------------------------------------- render loop

let lastFrame = performance.now();

function frame(now: number): void {
  const dt = Math.min((now - lastFrame) / 1000, 0.1);
  lastFrame = now;

  const fresh = store.applyLatest(now);
  if (fresh !== null) {
    ghosts.onStateApplied();
    view.update(fresh);
    panel.update(fresh);
    gizmo.onState();
  }
  person.tick(dt);
  view.render();
  requestAnimationFrame(frame);
}

requestAnimationFrame(frame);
