import { describe, expect, it } from "vitest";
import type { StateMessage } from "../src/protocol";
import { StateStore } from "../src/state";

function stateAt(t: number): StateMessage {
  return {
    type: "state",
    sim_time: t,
    phase: "executing",
    paused: false,
    sim_speed: 1,
    robot: { q: [0, 0], ee: { position: [2, 0, 0], orientation: [1, 0, 0, 0] } },
    barriers: {
      version: 1,
      items: [
        {
          id: "person",
          kind: "person",
          label: "person",
          shape: {
            kind: "cylinder",
            center_xy: [5, 5],
            base_z: 0,
            height: 2,
            radius: 0.4,
          },
        },
      ],
    },
    waypoints: [],
    subpaths: [],
    metrics: {
      stop_count: 0,
      replan_count_current: 0,
      replan_count_future: 0,
      ground_truth_collision_count: 0,
      waypoints_completed: 0,
      min_clearance_over_run: null,
      event_count: 0,
    },
  };
}

describe("StateStore", () => {
  it("adopts only the newest of a burst", () => {
    const store = new StateStore();
    store.push(stateAt(0.1));
    store.push(stateAt(0.2));
    store.push(stateAt(0.3));
    const applied = store.applyLatest(1000);
    expect(applied?.sim_time).toBe(0.3);
    // intermediate broadcasts are gone, not queued
    expect(store.applyLatest(1001)).toBeNull();
    expect(store.current?.sim_time).toBe(0.3);
  });

  it("current is stable between applies (atomic rendering source)", () => {
    const store = new StateStore();
    store.push(stateAt(1.0));
    store.applyLatest(0);
    const before = store.current;
    store.push(stateAt(2.0)); // arrived but not yet applied
    expect(store.current).toBe(before);
    expect(store.current?.sim_time).toBe(1.0);
    store.applyLatest(1);
    expect(store.current?.sim_time).toBe(2.0);
  });

  it("exposes barrier lookup and the person", () => {
    const store = new StateStore();
    expect(store.person).toBeNull();
    store.push(stateAt(0));
    store.applyLatest(0);
    expect(store.person?.id).toBe("person");
    expect(store.barrier("person")?.kind).toBe("person");
    expect(store.barrier("obs-9")).toBeNull();
  });

  it("records the apply timestamp for latency accounting", () => {
    const store = new StateStore();
    store.push(stateAt(0));
    store.applyLatest(123.5);
    expect(store.lastApplied).toBe(123.5);
  });
});
