import { describe, expect, it } from "vitest";
import {
  GhostTracker,
  quatToWire,
  ScaleTracker,
  transformFieldsFor,
} from "../src/gizmo";
import { transformBarrier } from "../src/protocol";

describe("transform payloads", () => {
  const pose = {
    position: [1.0, 0.2, 0.3] as [number, number, number],
    quaternion: quatToWire(0, 0, 0.383, 0.924),
  };

  it("translate sends absolute position only", () => {
    const fields = transformFieldsFor("translate", pose, [1, 1, 1]);
    expect(fields).toEqual({ position: [1.0, 0.2, 0.3] });
  });

  it("rotate sends the quaternion in wire (w, x, y, z) order", () => {
    const fields = transformFieldsFor("rotate", pose, [1, 1, 1]);
    expect(fields).toEqual({ orientation: [0.924, 0, 0, 0.383] });
  });

  it("scale sends the increment and suppresses no-ops", () => {
    expect(transformFieldsFor("scale", pose, [1, 1, 1])).toBeNull();
    expect(transformFieldsFor("scale", pose, [2, 1, 1])).toEqual({
      scale: [2, 1, 1],
    });
  });

  it("doubling a box produces the doubled wire payload", () => {
    const fields = transformFieldsFor("scale", pose, [2, 2, 2])!;
    const msg = transformBarrier("c9", "obs-1", fields);
    expect(JSON.parse(JSON.stringify(msg))).toEqual({
      type: "transform_barrier",
      request_id: "c9",
      id: "obs-1",
      scale: [2, 2, 2],
    });
  });
});

describe("ScaleTracker increments", () => {
  it("streams ratios whose product equals the gesture total", () => {
    const tracker = new ScaleTracker();
    // throttled sends at gesture scales [2,1,1] then [4,2,1]
    const inc1 = tracker.increment([2, 1, 1]);
    expect(inc1).toEqual([2, 1, 1]);
    tracker.markSent([2, 1, 1]);
    const inc2 = tracker.increment([4, 2, 1]);
    expect(inc2).toEqual([2, 2, 1]);
    tracker.markSent([4, 2, 1]);
    // server applied 2*2=4, 1*2=2, 1*1=1: exactly the gesture scale
    expect(inc1.map((v, i) => v * inc2[i])).toEqual([4, 2, 1]);
  });

  it("reset starts the next gesture from unity", () => {
    const tracker = new ScaleTracker();
    tracker.markSent([3, 3, 3]);
    tracker.reset();
    expect(tracker.increment([2, 2, 2])).toEqual([2, 2, 2]);
  });
});

describe("GhostTracker lifecycle", () => {
  it("holds the ghost through the gesture and one confirming state", () => {
    const ghosts = new GhostTracker();
    ghosts.begin("obs-1");
    expect(ghosts.isGhosted("obs-1")).toBe(true);

    // broadcasts during the drag must not release it
    ghosts.onStateApplied();
    expect(ghosts.isGhosted("obs-1")).toBe(true);

    ghosts.confirm("obs-1"); // final send acked
    expect(ghosts.isGhosted("obs-1")).toBe(true); // still ghosted...
    ghosts.onStateApplied(); // ...until the authoritative state lands
    expect(ghosts.isGhosted("obs-1")).toBe(false);
  });

  it("release is immediate on rejection (snap-back)", () => {
    const ghosts = new GhostTracker();
    ghosts.begin("obs-2");
    ghosts.release("obs-2");
    expect(ghosts.isGhosted("obs-2")).toBe(false);
  });

  it("confirm without begin is a no-op", () => {
    const ghosts = new GhostTracker();
    ghosts.confirm("obs-3");
    ghosts.onStateApplied();
    expect(ghosts.isGhosted("obs-3")).toBe(false);
  });
});
