/**
 * Workflow panel: status readout, phase-gated buttons, stop banner, toasts,
 * and the transient tooltip used when someone pokes the person barrier.
 */

import type { GizmoMode } from "./gizmo";
import type { Phase, StateMessage } from "./protocol";

export type PanelActions = {
  onLock: () => void;
  onExecute: () => void;
  onPause: () => void;
  onResume: () => void;
  onReset: () => void;
  onSpeed: (multiplier: number) => void;
  onMode: (mode: GizmoMode) => void;
  onSpawnSphere: () => void;
  onSpawnBox: () => void;
  onDeleteSelected: () => void;
};

const PHASE_TINTS: Record<Phase, string> = {
  collecting: "#2e6fd8",
  locked: "#8e6fd8",
  executing: "#27ae60",
  stopped: "#d64541",
  done: "#8a8f98",
  failed: "#d64541",
};

function button(label: string, onClick: () => void, cls = ""): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.className = cls;
  b.addEventListener("click", onClick);
  return b;
}

export class Panel {
  private readonly status: HTMLDivElement;
  private readonly banner: HTMLDivElement;
  private readonly toasts: HTMLDivElement;
  private readonly tooltipEl: HTMLDivElement;
  private tooltipTimer: ReturnType<typeof setTimeout> | null = null;

  private readonly addWaypointBtn: HTMLButtonElement;
  private readonly lockBtn: HTMLButtonElement;
  private readonly executeBtn: HTMLButtonElement;
  private readonly pauseBtn: HTMLButtonElement;
  private readonly resetBtn: HTMLButtonElement;
  private readonly deleteBtn: HTMLButtonElement;
  private readonly speedSlider: HTMLInputElement;
  private readonly speedLabel: HTMLSpanElement;
  private readonly modeButtons = new Map<GizmoMode, HTMLButtonElement>();

  private _addWaypointMode = false;
  private paused = true;

  constructor(root: HTMLElement, private readonly actions: PanelActions) {
    this.status = document.createElement("div");
    this.status.id = "status";
    this.status.textContent = "connecting";
    root.appendChild(this.status);

    this.banner = document.createElement("div");
    this.banner.id = "banner";
    this.banner.textContent = "Robot stopped - replanning";
    this.banner.style.display = "none";
    root.appendChild(this.banner);

    const bar = document.createElement("div");
    bar.id = "toolbar";

    this.addWaypointBtn = button("+ waypoint", () => {
      this.addWaypointMode = !this._addWaypointMode;
    });
    this.lockBtn = button("LOCK PATH", actions.onLock, "primary");
    this.executeBtn = button("EXECUTE", actions.onExecute, "primary");
    this.pauseBtn = button("resume", () => {
      if (this.paused) this.actions.onResume();
      else this.actions.onPause();
    });
    this.resetBtn = button("reset", actions.onReset);
    bar.append(this.addWaypointBtn, this.lockBtn, this.executeBtn, this.pauseBtn, this.resetBtn);

    const spawn = document.createElement("div");
    spawn.className = "group";
    spawn.append(
      button("+ sphere", actions.onSpawnSphere),
      button("+ box", actions.onSpawnBox),
    );
    this.deleteBtn = button("delete", actions.onDeleteSelected);
    this.deleteBtn.disabled = true;
    spawn.appendChild(this.deleteBtn);
    bar.appendChild(spawn);

    const modes = document.createElement("div");
    modes.className = "group";
    for (const mode of ["translate", "rotate", "scale"] as GizmoMode[]) {
      const b = button(mode, () => this.setMode(mode));
      this.modeButtons.set(mode, b);
      modes.appendChild(b);
    }
    bar.appendChild(modes);

    const speedWrap = document.createElement("div");
    speedWrap.className = "group";
    this.speedSlider = document.createElement("input");
    this.speedSlider.type = "range";
    this.speedSlider.min = "-1";
    this.speedSlider.max = "1";
    this.speedSlider.step = "0.01";
    this.speedSlider.value = "0";
    this.speedLabel = document.createElement("span");
    this.speedLabel.textContent = "1.0x";
    this.speedSlider.addEventListener("change", () => {
      const mult = Math.pow(10, Number(this.speedSlider.value));
      actions.onSpeed(Math.round(mult * 100) / 100);
    });
    this.speedSlider.addEventListener("input", () => {
      const mult = Math.pow(10, Number(this.speedSlider.value));
      this.speedLabel.textContent = `${mult.toFixed(mult < 1 ? 2 : 1)}x`;
    });
    speedWrap.append(this.speedSlider, this.speedLabel);
    bar.appendChild(speedWrap);

    root.appendChild(bar);

    this.toasts = document.createElement("div");
    this.toasts.id = "toasts";
    root.appendChild(this.toasts);

    this.tooltipEl = document.createElement("div");
    this.tooltipEl.id = "tooltip";
    this.tooltipEl.style.display = "none";
    root.appendChild(this.tooltipEl);

    this.setMode("translate");
  }

  get addWaypointMode(): boolean {
    return this._addWaypointMode;
  }

  set addWaypointMode(on: boolean) {
    this._addWaypointMode = on;
    this.addWaypointBtn.classList.toggle("active", on);
  }

  setMode(mode: GizmoMode): void {
    for (const [m, b] of this.modeButtons) b.classList.toggle("active", m === mode);
    this.actions.onMode(mode);
  }

  setSelection(barrierId: string | null): void {
    this.deleteBtn.disabled = barrierId === null;
  }

  setConnected(connected: boolean): void {
    if (!connected) {
      this.status.textContent = "disconnected, retrying";
      this.status.style.borderColor = "#d64541";
    }
  }

  update(state: StateMessage): void {
    const m = state.metrics;
    this.status.style.borderColor = PHASE_TINTS[state.phase];
    this.status.innerHTML =
      `<b style="color:${PHASE_TINTS[state.phase]}">${state.phase}</b>` +
      ` t=${state.sim_time.toFixed(2)}s` +
      `${state.paused ? " paused" : ""}<br>` +
      `waypoints ${m.waypoints_completed}/${state.waypoints.length}` +
      ` | stops ${m.stop_count}` +
      ` | replans ${m.replan_count_current}+${m.replan_count_future}` +
      ` | contacts ${m.ground_truth_collision_count}`;

    this.banner.style.display = state.phase === "stopped" ? "block" : "none";

    this.paused = state.paused;
    this.pauseBtn.textContent = state.paused ? "resume" : "pause";

    this.lockBtn.disabled = state.phase !== "collecting";
    this.executeBtn.disabled = state.phase !== "locked";
    this.addWaypointBtn.disabled = state.phase !== "collecting";
    if (state.phase !== "collecting" && this._addWaypointMode) {
      this.addWaypointMode = false;
    }
  }

  toast(text: string, isError = true): void {
    const el = document.createElement("div");
    el.className = isError ? "toast error" : "toast";
    el.textContent = text;
    this.toasts.appendChild(el);
    setTimeout(() => el.remove(), 4000);
  }

  /** Short-lived hint near the cursor (e.g. why the person has no gizmo). */
  tooltip(text: string, x: number, y: number): void {
    this.tooltipEl.textContent = text;
    this.tooltipEl.style.left = `${x + 12}px`;
    this.tooltipEl.style.top = `${y + 12}px`;
    this.tooltipEl.style.display = "block";
    if (this.tooltipTimer !== null) clearTimeout(this.tooltipTimer);
    this.tooltipTimer = setTimeout(() => {
      this.tooltipEl.style.display = "none";
    }, 2200);
  }
}
