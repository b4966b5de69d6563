/**
 * Wire protocol for the barrier-sim gateway.
 *
 * One JSON document per WebSocket text message; field layout documented in
 * docs/protocol.md in the repository root. Everything here is plain data so
 * that serialize(parse(x)) is the identity on well-formed traffic.
 */

export type Vec3 = [number, number, number];
export type Vec2 = [number, number];
/** Unit quaternion, (w, x, y, z) order on the wire. */
export type Quat = [number, number, number, number];

export type RequestId = string | number;

export type SphereShape = { kind: "sphere"; center: Vec3; radius: number };
export type CylinderShape = {
  kind: "cylinder";
  center_xy: Vec2;
  base_z: number;
  height: number;
  radius: number;
};
export type BoxShape = {
  kind: "box";
  position: Vec3;
  orientation: Quat;
  half_extents: Vec3;
};
export type WireShape = SphereShape | CylinderShape | BoxShape;

export type Barrier = {
  id: string;
  kind: "person" | "obstacle";
  label: string;
  shape: WireShape;
};

export type Waypoint = { id: number; label: string; position: Vec3 };

export type Phase =
  | "collecting"
  | "locked"
  | "executing"
  | "stopped"
  | "done"
  | "failed";

export type SubPathStatus =
  | "unplanned"
  | "planned"
  | "executing"
  | "invalid"
  | "replanning"
  | "completed";

export type SubPath = {
  index: number;
  status: SubPathStatus;
  waypoint: Waypoint;
  polyline: Vec3[] | null;
};

export type Metrics = {
  stop_count: number;
  replan_count_current: number;
  replan_count_future: number;
  ground_truth_collision_count: number;
  waypoints_completed: number;
  min_clearance_over_run: number | null;
  event_count: number;
};

export type StateMessage = {
  type: "state";
  sim_time: number;
  phase: Phase;
  paused: boolean;
  sim_speed: number;
  robot: { q: number[]; ee: { position: Vec3; orientation: Quat } };
  barriers: { version: number; items: Barrier[] };
  waypoints: Waypoint[];
  subpaths: SubPath[];
  metrics: Metrics;
};

export type WireError = { code: string; detail: string };

export type ResponseMessage = {
  type: "response";
  request_id: RequestId | null;
  ok?: boolean;
  result?: Record<string, unknown> | null;
  error?: WireError;
};

export type ServerMessage = StateMessage | ResponseMessage;

export type CommandMessage = { type: string; request_id: RequestId } & Record<
  string,
  unknown
>;

// ---------------------------------------------------------------- builders

export function addWaypoint(
  id: RequestId,
  position: Vec3,
  label?: string,
): CommandMessage {
  const msg: CommandMessage = { type: "add_waypoint", request_id: id, position };
  if (label !== undefined) msg.label = label;
  return msg;
}

export function lockPath(id: RequestId): CommandMessage {
  return { type: "lock_path", request_id: id };
}

export function execute(id: RequestId): CommandMessage {
  return { type: "execute", request_id: id };
}

export function pause(id: RequestId): CommandMessage {
  return { type: "pause", request_id: id };
}

export function resume(id: RequestId): CommandMessage {
  return { type: "resume", request_id: id };
}

export function reset(id: RequestId): CommandMessage {
  return { type: "reset", request_id: id };
}

export function setSimSpeed(id: RequestId, multiplier: number): CommandMessage {
  return { type: "set_sim_speed", request_id: id, multiplier };
}

export function spawnSphere(
  id: RequestId,
  center: Vec3,
  radius: number,
  label?: string,
): CommandMessage {
  const msg: CommandMessage = {
    type: "spawn_barrier",
    request_id: id,
    kind: "sphere",
    center,
    radius,
  };
  if (label !== undefined) msg.label = label;
  return msg;
}

export function spawnBox(
  id: RequestId,
  position: Vec3,
  orientation: Quat,
  halfExtents: Vec3,
  label?: string,
): CommandMessage {
  const msg: CommandMessage = {
    type: "spawn_barrier",
    request_id: id,
    kind: "box",
    position,
    orientation,
    half_extents: halfExtents,
  };
  if (label !== undefined) msg.label = label;
  return msg;
}

export type TransformFields = {
  position?: Vec3;
  orientation?: Quat;
  scale?: Vec3;
};

export function transformBarrier(
  id: RequestId,
  barrierId: string,
  fields: TransformFields,
): CommandMessage {
  return { type: "transform_barrier", request_id: id, id: barrierId, ...fields };
}

export function deleteBarrier(id: RequestId, barrierId: string): CommandMessage {
  return { type: "delete_barrier", request_id: id, id: barrierId };
}

export function movePerson(id: RequestId, xy: Vec2): CommandMessage {
  return { type: "move_person", request_id: id, position: xy };
}

// ---------------------------------------------------------- encode / decode

export function serialize(msg: CommandMessage): string {
  return JSON.stringify(msg);
}

/**
 * Parse one server frame. Unknown or malformed frames return null rather
 * than throwing; the render loop must survive a byzantine server.
 */
export function parseServerMessage(text: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const t = (doc as { type?: unknown }).type;
  if (t === "state" || t === "response") return doc as ServerMessage;
  return null;
}

export function isState(msg: ServerMessage): msg is StateMessage {
  return msg.type === "state";
}

export function isResponse(msg: ServerMessage): msg is ResponseMessage {
  return msg.type === "response";
}
