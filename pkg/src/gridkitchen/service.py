"""HTTP and WebSocket facade for playing kitchen episodes interactively.

Wraps the interactive simulator in named sessions so browser clients (or
scripted ones) can drive agents one action at a time.  Finalized episodes
are appended to the same results JSONL format the experiment runner
writes, with controller="human", so mixed files score with one call.
"""

from __future__ import annotations

import asyncio
import json
import os
import secrets
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .engine import KitchenSim, PlanError, RunRecord, SimError, action_from_json
from .taskgen import GenerationError, TaskBundle
from .world import WorldError

LOBBY = "lobby"
RUNNING = "running"
FINISHED = "finished"

CONTROLLERS = ("human", "scripted")

# Env var holding the shared bearer token.  Unset means the service is open.
DEFAULT_TOKEN_ENV = "GRIDKITCHEN_TOKEN"


@dataclass
class Session:
    """One episode plus its broadcast log.

    frames is the totally ordered sequence every subscriber sees: each
    frame carries its own seq (its index), so a client can join late,
    replay the backlog, and splice the live stream without gaps.
    """

    session_id: str
    bundle: TaskBundle
    sim: KitchenSim
    status: str
    participants: dict[str, str]
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    frames: list[dict] = field(default_factory=list)
    subscribers: list[asyncio.Queue] = field(default_factory=list)
    record: RunRecord | None = None
    row_written: bool = False
    started_mono: float | None = None
    started_at: str | None = None
    events_seen: int = 0

    def push(self, kind: str, payload: dict) -> None:
        frame = {"type": kind, "seq": len(self.frames)}
        frame.update(payload)
        self.frames.append(frame)
        for queue in self.subscribers:
            queue.put_nowait(frame)

    def drain_events(self) -> None:
        # Rejections land in sim.events too, so the stream shows them.
        for event in self.sim.events[self.events_seen :]:
            self.push("event", {"event": event.to_json()})
        self.events_seen = len(self.sim.events)

    def push_state(self) -> None:
        self.push("state", {"state": self.sim.snapshot(), "status": self.status})

    def start(self) -> None:
        self.status = RUNNING
        self.started_mono = time.monotonic()
        self.started_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self.push_state()

    def finish(self, reason: str = "abandoned") -> None:
        """Seal the episode.  finalize() leaves a decided outcome alone,
        so calling this after a natural ending keeps the real result."""
        if self.record is not None:
            return
        self.record = self.sim.finalize(reason)
        self.status = FINISHED
        self.drain_events()
        self.push_state()
        self.push("record", {"record": self.record.to_json()})

    def result_row(self) -> dict:
        # Key set mirrors the experiment runner's rows exactly; scoring
        # groups on (model, method, ...) so human play lands in its own
        # group next to model groups from the same bundles.
        wall = None
        if self.started_mono is not None:
            wall = round(time.monotonic() - self.started_mono, 3)
        return {
            "bundle_id": self.bundle.bundle_id,
            "model": "human",
            "method": "live",
            "controller": "human",
            "category": self.bundle.category,
            "difficulty": self.bundle.difficulty.get("recipe"),
            "map": self.bundle.difficulty.get("map"),
            "n_agents": self.bundle.n_agents,
            "n_dishes": self.bundle.n_dishes,
            "seed": self.bundle.seed,
            "t_max": self.bundle.t_max,
            "d_max": self.bundle.d_max,
            "infra_failure": False,
            "raw_output": None,
            "parse_error": None,
            "cot": None,
            "record": None if self.record is None else self.record.to_json(),
            "usage": None,
            "error": None,
            "started_at": self.started_at,
            "wall_seconds": wall,
        }


def _append_row(path: str, row: dict) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    # A torn tail line (crash mid-write) must not swallow the new row.
    needs_newline = False
    if os.path.exists(path) and os.path.getsize(path) > 0:
        with open(path, "rb") as fh:
            fh.seek(-1, os.SEEK_END)
            needs_newline = fh.read(1) != b"\n"
    with open(path, "a", encoding="utf-8") as fh:
        if needs_newline:
            fh.write("\n")
        fh.write(json.dumps(row, sort_keys=True) + "\n")


def create_app(
    results_path: str | None = None,
    static_dir: str | None = None,
    token_env: str = DEFAULT_TOKEN_ENV,
) -> FastAPI:
    app = FastAPI(title="gridkitchen session service")
    app.state.sessions = {}
    app.state.results_path = results_path
    app.state.token_env = token_env

    def check_auth(authorization: str | None) -> None:
        expected = os.environ.get(token_env) if token_env else None
        if expected is None:
            return
        if authorization != f"Bearer {expected}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    def get_session(sid: str) -> Session:
        session = app.state.sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return session

    async def read_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="request body must be JSON")
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail="request body must be a JSON object")
        return body

    @app.post("/sessions")
    async def create_session(request: Request):
        check_auth(request.headers.get("authorization"))
        body = await read_body(request)
        if "bundle" not in body:
            raise HTTPException(status_code=400, detail="missing 'bundle'")
        try:
            bundle = TaskBundle.from_json(body["bundle"])
            sim = KitchenSim(
                bundle.grid,
                bundle.orders,
                constants=bundle.constants,
                t_max=bundle.t_max,
                interactive=True,
            )
        except (GenerationError, WorldError, SimError, KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"invalid bundle: {exc}")

        participants = {aid: "human" for aid in sorted(sim.agents)}
        overrides = body.get("participants", {})
        if not isinstance(overrides, dict):
            raise HTTPException(status_code=400, detail="'participants' must be an object")
        for aid, controller in overrides.items():
            if aid not in participants:
                raise HTTPException(status_code=400, detail=f"unknown agent {aid!r}")
            if controller not in CONTROLLERS:
                raise HTTPException(status_code=400, detail=f"unknown controller {controller!r}")
            participants[aid] = controller

        sid = secrets.token_hex(8)
        session = Session(
            session_id=sid,
            bundle=bundle,
            sim=sim,
            status=LOBBY,
            participants=participants,
        )
        app.state.sessions[sid] = session
        if body.get("start", True):
            async with session.lock:
                session.start()
        return {"session_id": sid, "status": session.status, "participants": participants}

    @app.post("/sessions/{sid}/start")
    async def start_session(request: Request, sid: str):
        check_auth(request.headers.get("authorization"))
        session = get_session(sid)
        async with session.lock:
            if session.status != LOBBY:
                raise HTTPException(status_code=409, detail=f"session is {session.status}")
            session.start()
            return {"session_id": sid, "status": session.status}

    @app.get("/sessions/{sid}/state")
    async def session_state(request: Request, sid: str):
        check_auth(request.headers.get("authorization"))
        session = get_session(sid)
        async with session.lock:
            out = {
                "session_id": sid,
                "status": session.status,
                "participants": session.participants,
                "state": session.sim.snapshot(),
                "needs_decision": session.sim.needs_decision(),
                "legal": {
                    aid: session.sim.legal_actions(aid) for aid in session.participants
                },
            }
            if session.record is not None:
                out["record"] = session.record.to_json()
            return out

    @app.post("/sessions/{sid}/actions")
    async def submit_action(request: Request, sid: str):
        check_auth(request.headers.get("authorization"))
        session = get_session(sid)
        body = await read_body(request)
        agent_id = body.get("agent")
        if agent_id not in session.participants:
            raise HTTPException(status_code=403, detail=f"unknown agent {agent_id!r}")
        if session.participants[agent_id] != "human":
            raise HTTPException(
                status_code=403, detail=f"agent {agent_id!r} is not human-controlled"
            )
        if "action" not in body:
            raise HTTPException(status_code=400, detail="missing 'action'")
        try:
            action = action_from_json(body["action"])
        except PlanError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        async with session.lock:
            if session.status != RUNNING:
                raise HTTPException(
                    status_code=409,
                    detail=f"session is {session.status}; commands accepted only while running",
                )
            try:
                event = session.sim.submit(agent_id, action)
            except SimError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            session.drain_events()
            if session.sim.over:
                session.finish()
            else:
                session.push_state()
            return {
                "session_id": sid,
                "event": event.to_json(),
                "state": session.sim.snapshot(),
                "status": session.status,
                "needs_decision": session.sim.needs_decision(),
            }

    @app.post("/sessions/{sid}/finalize")
    async def finalize_session(request: Request, sid: str):
        check_auth(request.headers.get("authorization"))
        session = get_session(sid)
        async with session.lock:
            if session.status == LOBBY:
                raise HTTPException(status_code=409, detail="session has not started")
            session.finish()
            row = session.result_row()
            if not session.row_written and app.state.results_path is not None:
                _append_row(app.state.results_path, row)
                session.row_written = True
            return {
                "session_id": sid,
                "status": session.status,
                "record": session.record.to_json(),
                "row": row,
            }

    @app.websocket("/sessions/{sid}/events")
    async def session_events(websocket: WebSocket, sid: str):
        await websocket.accept()
        expected = os.environ.get(token_env) if token_env else None
        if expected is not None and websocket.headers.get("authorization") != f"Bearer {expected}":
            await websocket.send_json({"type": "error", "error": "unauthorized"})
            await websocket.close()
            return
        session = app.state.sessions.get(sid)
        if session is None:
            await websocket.send_json({"type": "error", "error": f"unknown session {sid!r}"})
            await websocket.close()
            return

        queue: asyncio.Queue = asyncio.Queue()
        async with session.lock:
            # Snapshot + subscribe under the lock: no frame can slip
            # between the backlog copy and the live stream.
            backlog = list(session.frames)
            session.subscribers.append(queue)
        try:
            done = False
            for frame in backlog:
                await websocket.send_json(frame)
                done = done or frame["type"] == "record"
            while not done:
                frame = await queue.get()
                await websocket.send_json(frame)
                done = frame["type"] == "record"
        except WebSocketDisconnect:
            pass
        finally:
            async with session.lock:
                if queue in session.subscribers:
                    session.subscribers.remove(queue)
            try:
                await websocket.close()
            except RuntimeError:
                pass

    if static_dir is not None and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
