"""WebSocket gateway: one simulation, many viewers, a single mutation context.

The asyncio event loop is the scheduler: command handling and sim stepping
are both synchronous sections on that loop, so they never interleave and no
handler races the stepper. Wall-clock pacing converts elapsed real time into
whole sim steps (speed multiplier applies here only; sim-time semantics are
untouched). Broadcasts go out at 20 Hz whether or not the sim is paused so
viewers always converge on the current state.
"""
from __future__ import annotations

import asyncio
import socket
import time
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from ..barriers import PersonState
from ..errors import PlanningFailed, PortInUse, SchemaError, SimError, SimSpeedRange
from ..geometry import Pose
from ..mission import Phase
from ..scenario import ScenarioSpec
from ..shapes import OrientedBox
from ..sim import Simulation
from . import protocol

BROADCAST_HZ = 20.0
SPEED_MIN = 0.1
SPEED_MAX = 10.0
# cap sim-seconds consumed per pacing pass so a planning-heavy step burst
# cannot snowball the wall-clock debt
MAX_CATCHUP = 0.25

DEFAULT_PORT = 8732
PORT_ENV_VAR = "BARRIERSIM_PORT"

_PLACEHOLDER = """<!doctype html>
<title>barriersim</title>
<p>No client bundle found. The WebSocket endpoint is live at <code>/ws</code>;
build the frontend (frontend/dist) to get the interactive view.</p>
"""


class SimHost:
    """Owns the Simulation and is the only code that mutates it."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self._build()

    def _build(self) -> None:
        self.sim = Simulation(self.spec)
        # scenario waypoints are pre-collected so a client can lock right away
        for pos, label in self.spec.waypoints:
            self.sim.mission.add_waypoint(pos, label, sim_time=0.0)
        self.paused = True
        self.sim_speed = 1.0
        self._debt = 0.0
        self._finalized = False
        self._polyline_cache: dict = {}

    # -- pacing -------------------------------------------------------------

    def _mission_over(self) -> bool:
        # interactive sessions ignore the headless max_time cap
        return self.sim.mission.phase in (Phase.DONE, Phase.FAILED)

    def advance_wall(self, wall_dt: float) -> None:
        if self.paused or self._mission_over():
            self._maybe_finalize()
            return
        self._debt = min(self._debt + wall_dt * self.sim_speed, MAX_CATCHUP)
        dt = self.spec.dt
        while self._debt >= dt and not self._mission_over():
            self.sim.step()
            self._debt -= dt
        self._maybe_finalize()

    def _maybe_finalize(self) -> None:
        if self._mission_over() and not self._finalized:
            self.sim.finalize()
            self._finalized = True

    # -- state --------------------------------------------------------------

    def state(self) -> dict:
        return protocol.state_message(self.sim, paused=self.paused,
                                      sim_speed=self.sim_speed,
                                      polyline_cache=self._polyline_cache)

    # -- commands -----------------------------------------------------------

    def handle_raw(self, raw: str) -> dict:
        rid = None
        try:
            doc = protocol.decode(raw)
            rid = doc.get("request_id") if isinstance(doc.get("request_id"), (str, int)) else None
            cmd = protocol.parse_command(doc)
        except SimError as exc:  # SCHEMA, or INVALID_DIMENSIONS from shape parsing
            return protocol.error_response(rid, exc.code, str(exc))
        return self.handle(cmd)

    def handle(self, cmd: protocol.Command) -> dict:
        try:
            result = self._dispatch(cmd)
        except PlanningFailed as exc:
            return protocol.error_response(
                cmd.request_id, exc.code,
                f"{exc} (cause: {exc.cause.code})")
        except SimError as exc:
            return protocol.error_response(cmd.request_id, exc.code, str(exc))
        except ValueError as exc:
            # shape constructors reject degenerate dims before the registry sees them
            return protocol.error_response(cmd.request_id, "INVALID_DIMENSIONS", str(exc))
        return protocol.ok_response(cmd.request_id, result)

    def _dispatch(self, cmd: protocol.Command) -> Optional[dict]:
        sim = self.sim
        f = cmd.fields
        t = sim.sim_time
        if cmd.type == "add_waypoint":
            wp = sim.mission.add_waypoint(f["position"], f["label"], sim_time=t)
            return {"waypoint_id": wp.id}
        if cmd.type == "lock_path":
            sim.mission.lock_path(sim.registry.snapshot(t), sim_time=t)
            return None
        if cmd.type == "execute":
            sim.mission.execute(sim_time=t)
            return None
        if cmd.type == "spawn_barrier":
            bid = sim.registry.spawn_obstacle(f["shape"], f["label"])
            return {"barrier_id": bid}
        if cmd.type == "transform_barrier":
            orientation = f["orientation"]
            if orientation is None:
                old = sim.registry.get(f["id"])
                if isinstance(old.shape, OrientedBox):
                    orientation = old.shape.pose.orientation
            sim.registry.transform_barrier(f["id"], Pose(f["position"], orientation),
                                           f["scale"])
            return None
        if cmd.type == "delete_barrier":
            sim.registry.delete_barrier(f["id"])
            return None
        if cmd.type == "move_person":
            xy = f["position"]
            sim.set_person_position(xy)
            # apply immediately so a drag is visible even while paused
            sim.registry.update_person(PersonState([xy[0], xy[1], self.spec.person.height]))
            return None
        if cmd.type == "pause":
            self.paused = True
            return None
        if cmd.type == "resume":
            self.paused = False
            self._debt = 0.0
            return None
        if cmd.type == "reset":
            self._build()
            return None
        if cmd.type == "set_sim_speed":
            m = f["multiplier"]
            if not (SPEED_MIN <= m <= SPEED_MAX):
                raise SimSpeedRange(
                    f"multiplier {m:g} outside [{SPEED_MIN}, {SPEED_MAX}]")
            self.sim_speed = float(m)
            return None
        raise SchemaError(f"unknown command type {cmd.type!r}")  # unreachable


def default_static_dir() -> Path:
    # repo layout: <root>/src/barriersim/gateway/server.py and <root>/frontend/dist
    return Path(__file__).resolve().parents[3] / "frontend" / "dist"


def _frontend_dir(static_dir) -> Optional[Path]:
    d = Path(static_dir) if static_dir is not None else default_static_dir()
    return d if (d / "index.html").is_file() else None


def create_app(spec: ScenarioSpec, static_dir=None) -> FastAPI:
    host = SimHost(spec)
    clients: set[WebSocket] = set()

    async def pacing_loop() -> None:
        last = time.monotonic()
        period = 1.0 / BROADCAST_HZ
        next_cast = last
        while True:
            now = time.monotonic()
            host.advance_wall(now - last)
            last = now
            if now >= next_cast:
                encoded = protocol.encode(host.state())
                for ws in list(clients):
                    try:
                        await ws.send_text(encoded)
                    except Exception:
                        clients.discard(ws)
                next_cast = now + period
            await asyncio.sleep(min(0.005, period / 4))

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(pacing_loop())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(lifespan=lifespan)
    app.state.host = host

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        await ws.send_text(protocol.encode(host.state()))
        clients.add(ws)
        try:
            while True:
                raw = await ws.receive_text()
                await ws.send_text(protocol.encode(host.handle_raw(raw)))
        except WebSocketDisconnect:
            pass
        finally:
            clients.discard(ws)

    bundle = _frontend_dir(static_dir)
    if bundle is not None:
        app.mount("/", StaticFiles(directory=str(bundle), html=True), name="client")
    else:
        @app.get("/")
        async def placeholder() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER)

    return app


def probe_port(host: str, port: int) -> None:
    """Bind check before handing the socket to the server; PortInUse if taken."""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            s.bind((host, port))
        except OSError as exc:
            raise PortInUse(f"cannot bind {host}:{port}: {exc}") from None


def serve(spec: ScenarioSpec, host: str, port: int, static_dir=None) -> None:
    import uvicorn

    probe_port(host, port)
    app = create_app(spec, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
